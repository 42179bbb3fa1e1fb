"""Causal structure discovery from categorical data.

Four methods share this module: the pairwise minimum-entropy oracle (three
measures), source peeling with conditional independence tests, exhaustive
entropic scoring of skeleton orientations, and a discrete additive-noise
baseline.  All directions are decided by argmin with a smallest-index /
lexicographic tie-break so runs are reproducible.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass

import numpy as np

from .citest import dsep_ci, g_test_ci
from .coupling import mec
from .errors import InvalidParameterError, TooManyOrientationsError
from .graphs import (
    Dag,
    enumerate_orientations,
    orientation_bits,
    sample_orientations,
)
from .probcore import Dataset, JointTable, make_rng

__all__ = [
    "OracleVerdict",
    "DiscoveryConfig",
    "PeelResult",
    "mec_oracle",
    "TruthOracle",
    "peel",
    "peel_with_stats",
    "enumerate_discover",
    "percentile",
    "percentile_from_counts",
    "anm_baseline",
]

MEASURES = ("exogenous", "marginal", "total")


@dataclass(frozen=True)
class OracleVerdict:
    """A pairwise orientation decision with its two candidate scores.

    ``forward_score`` belongs to i -> j in the call's argument order.  The
    direction must be the argmin, ties broken toward the smaller index.
    """

    i: int
    j: int
    direction: tuple
    forward_score: float
    reverse_score: float
    measure: str

    def __post_init__(self):
        fwd = (self.i, self.j)
        rev = (self.j, self.i)
        if self.forward_score < self.reverse_score:
            want = fwd
        elif self.reverse_score < self.forward_score:
            want = rev
        else:
            want = fwd if self.i < self.j else rev
        assert self.direction == want, (
            f"direction {self.direction} violates argmin tie-break {want}"
        )

    @property
    def source(self):
        return self.direction[0]

    @property
    def sink(self):
        return self.direction[1]


@dataclass(frozen=True)
class DiscoveryConfig:
    measure: str = "total"
    ci: str = "g-test"
    alpha: float = 0.05
    smoothing: float = 0.0
    cap: int = 10**6
    seed: int = 0

    def __post_init__(self):
        if self.measure not in MEASURES:
            raise InvalidParameterError(f"unknown measure {self.measure!r}")
        if self.ci not in ("g-test", "d-separation"):
            raise InvalidParameterError(f"unknown ci backend {self.ci!r}")
        if not 0.0 < self.alpha < 1.0:
            raise InvalidParameterError("alpha must lie in (0, 1)")
        if self.smoothing < 0:
            raise InvalidParameterError("smoothing must be >= 0")
        if self.cap < 1:
            raise InvalidParameterError("cap must be >= 1")


def _verdict(i, j, fwd, rev, measure):
    if fwd < rev:
        direction = (i, j)
    elif rev < fwd:
        direction = (j, i)
    else:
        direction = (i, j) if i < j else (j, i)
    return OracleVerdict(i, j, direction, fwd, rev, measure)


def mec_oracle(data, i, j, cond=(), measure="total", smoothing=0.0):
    """Orient the pair (i, j) given ``cond`` by comparing coupling entropies.

    exogenous: mec(j | {i} u cond) vs mec(i | {j} u cond).
    total:     adds the upstream term mec(i | cond) resp. mec(j | cond).
    marginal:  mec(i | cond) vs mec(j | cond), i.e. the smaller conditional
               entropy is taken as the cause.
    """
    if measure not in MEASURES:
        raise InvalidParameterError(f"unknown measure {measure!r}")
    cond = tuple(sorted(cond))
    if i == j or i in cond or j in cond:
        raise InvalidParameterError("i, j must be distinct and outside cond")
    with_i = tuple(sorted(cond + (i,)))
    with_j = tuple(sorted(cond + (j,)))
    if measure == "exogenous":
        fwd = mec(data, j, with_i, smoothing)
        rev = mec(data, i, with_j, smoothing)
    elif measure == "total":
        fwd = mec(data, i, cond, smoothing) + mec(data, j, with_i, smoothing)
        rev = mec(data, j, cond, smoothing) + mec(data, i, with_j, smoothing)
    else:
        fwd = mec(data, i, cond, smoothing)
        rev = mec(data, j, cond, smoothing)
    return _verdict(i, j, fwd, rev, measure)


class TruthOracle:
    """Source-pathwise oracle answered from a known DAG.

    For a pair inside the remaining node set R (everything outside the
    conditioning set), a node that is a source of the induced subgraph on R
    and has a directed path to the other endpoint is declared the cause.
    On a dependent pair exactly one endpoint can be such a source; the
    remaining branches exist only for defensive determinism.
    """

    def __init__(self, truth):
        self.truth = truth

    def _is_source_in(self, v, remaining):
        return all(p not in remaining for p in self.truth.parents(v))

    def _reaches(self, a, b, remaining):
        stack = [a]
        seen = {a}
        while stack:
            v = stack.pop()
            for w in self.truth.children(v):
                if w == b:
                    return True
                if w in remaining and w not in seen:
                    seen.add(w)
                    stack.append(w)
        return False

    def __call__(self, data, i, j, cond=(), measure=None, smoothing=0.0):
        remaining = set(range(self.truth.n)) - set(cond)
        if i not in remaining or j not in remaining:
            raise InvalidParameterError("pair must lie outside cond")
        i_src = self._is_source_in(i, remaining)
        j_src = self._is_source_in(j, remaining)
        if i_src and self._reaches(i, j, remaining):
            return OracleVerdict(i, j, (i, j), 0.0, 1.0, "source-pathwise")
        if j_src and self._reaches(j, i, remaining):
            return OracleVerdict(i, j, (j, i), 1.0, 0.0, "source-pathwise")
        if i_src != j_src:
            # noisy-CI defense: never eliminate the one remaining source
            winner = (i, j) if i_src else (j, i)
            fwd, rev = (0.0, 1.0) if i_src else (1.0, 0.0)
            return OracleVerdict(i, j, winner, fwd, rev, "source-pathwise")
        direction = (i, j) if i < j else (j, i)
        return OracleVerdict(i, j, direction, 0.0, 0.0, "source-pathwise")


@dataclass(frozen=True)
class PeelResult:
    dag: Dag
    order: tuple
    oracle_calls: int
    ci_calls: int
    fallback_rounds: int


def _columns_of(data):
    if isinstance(data, (Dataset, JointTable)):
        return data.columns
    raise InvalidParameterError("expected a Dataset or JointTable")


def _ci_backend(config, truth):
    if config.ci == "d-separation":
        if truth is None:
            raise InvalidParameterError("d-separation CI needs the true DAG")
        return dsep_ci(truth, config.alpha)
    return g_test_ci


def peel_with_stats(data, config=None, truth=None, oracle=None):
    """Source peeling, returning the DAG plus call statistics.

    Round by round, every still-alive remaining pair is CI-tested given the
    sources found so far; dependent pairs ask the orientation oracle and the
    loser is marked non-source for the round.  Unmarked nodes become the
    next block of the topological order.  Afterwards each ordered pair
    (T(i), T(j)) is kept as an edge iff it fails CI given the predecessors
    of T(j) minus T(i).  Pairs cached as independent are never retested
    during peeling.

    The oracle defaults to the pairwise coupling-entropy comparison, or to
    the source-pathwise answer when ``truth`` is given; pass ``oracle`` to
    override with any callable of the same shape.
    """
    config = config or DiscoveryConfig()
    names = _columns_of(data)
    n = len(names)
    ci = _ci_backend(config, truth)
    if oracle is None:
        if truth is not None:
            oracle = TruthOracle(truth)
        else:
            def oracle(d, i, j, cond=(), measure=config.measure,
                       smoothing=config.smoothing):
                return mec_oracle(d, i, j, cond, measure, smoothing)

    remaining = set(range(n))
    indep = set()  # unordered pairs found conditionally independent
    order = []
    oracle_calls = 0
    ci_calls = 0
    fallback_rounds = 0
    sink_marks = {v: 0 for v in range(n)}

    while remaining:
        cond = tuple(sorted(set(range(n)) - remaining))
        marked = set()
        alive = sorted(remaining)
        for a in range(len(alive)):
            for b in range(a + 1, len(alive)):
                i, j = alive[a], alive[b]
                if i in marked or j in marked or (i, j) in indep:
                    continue
                ci_calls += 1
                if ci(data, i, j, cond, alpha=config.alpha).independent:
                    indep.add((i, j))
                    continue
                oracle_calls += 1
                sink = oracle(data, i, j, cond).sink
                marked.add(sink)
                sink_marks[sink] += 1
        survivors = sorted(remaining - marked)
        if not survivors:
            # structurally unreachable (every round leaves an unmarked
            # node), kept as a guard against pathological custom oracles
            fallback_rounds += 1
            pick = min(remaining, key=lambda v: (sink_marks[v], v))
            warnings.warn(
                f"round eliminated every candidate; promoting node {pick}"
            )
            survivors = [pick]
        order.extend(survivors)
        remaining -= set(survivors)

    edges = set()
    for jpos in range(1, n):
        for ipos in range(jpos):
            i, j = order[ipos], order[jpos]
            cond = tuple(sorted(set(order[:jpos]) - {i}))
            ci_calls += 1
            if not ci(data, i, j, cond, alpha=config.alpha).independent:
                edges.add((i, j))
    dag = Dag(tuple(names), frozenset(edges))
    return PeelResult(dag, tuple(order), oracle_calls, ci_calls,
                      fallback_rounds)


def peel(data, config=None, truth=None, oracle=None):
    """As peel_with_stats, returning only the discovered Dag."""
    return peel_with_stats(data, config, truth, oracle).dag


def _score_dag(data, dag, smoothing, memo):
    total = 0.0
    for v in range(dag.n):
        key = (v, dag.parents(v))
        if key not in memo:
            memo[key] = mec(data, v, dag.parents(v), smoothing)
        total += memo[key]
    return total


def enumerate_discover(data, skeleton, config=None):
    """Score every acyclic orientation of the skeleton; return the argmin.

    The score of a candidate DAG is the sum over nodes of the greedy
    coupling entropy given the candidate's parents.  Returns the winning
    Dag, its score, and the full list of (orientation bits, score) pairs
    sorted by bit string; ties go to the lexicographically smallest bits.
    """
    config = config or DiscoveryConfig()
    dags = enumerate_orientations(skeleton, cap=config.cap)
    memo = {}
    scored = sorted(
        ((orientation_bits(d, skeleton), _score_dag(data, d, config.smoothing, memo), d)
         for d in dags),
        key=lambda t: t[0],
    )
    best_bits, best_score, best = min(scored, key=lambda t: (t[1], t[0]))
    return best, best_score, [(b, s) for b, s, _ in scored]


def percentile_from_counts(better, total):
    """1 - better/total, the rank of the truth among scored candidates."""
    if total < 1 or better < 0 or better > total:
        raise InvalidParameterError("need 0 <= better <= total, total >= 1")
    return 1.0 - better / total


def percentile(data, truth, skeleton, config=None):
    """Fraction of candidate orientations not strictly beating the truth.

    All orientations are scored when their count fits the cap; otherwise
    the candidate set is the true graph plus 10^4 - 1 sampled orientations.
    Returns 1 - (#candidates with strictly smaller score) / #candidates.
    """
    config = config or DiscoveryConfig()
    if truth.skeleton().edges != skeleton.edges or truth.names != skeleton.names:
        raise InvalidParameterError("truth is not an orientation of skeleton")
    truth_bits = orientation_bits(truth, skeleton)
    try:
        dags = enumerate_orientations(skeleton, cap=config.cap)
    except TooManyOrientationsError:
        rng = make_rng(config.seed)
        dags = [truth] + sample_orientations(skeleton, 10**4 - 1, rng)
    by_bits = {orientation_bits(d, skeleton): d for d in dags}
    by_bits[truth_bits] = truth
    memo = {}
    scores = {b: _score_dag(data, d, config.smoothing, memo)
              for b, d in by_bits.items()}
    better = sum(1 for s in scores.values() if s < scores[truth_bits])
    return percentile_from_counts(better, len(scores))


def _mode_fit(x, code, n_configs, card):
    """Per-configuration modal value of x, ties to the smallest state."""
    counts = np.zeros((n_configs, card), dtype=np.int64)
    np.add.at(counts, (code, x), 1)
    return counts.argmax(axis=1)


def _pair_p_value(a, ka, b, kb, alpha):
    d = Dataset(("a", "b"), np.array([ka, kb]),
                np.stack([a, b], axis=1).astype(np.int64))
    return g_test_ci(d, 0, 1, (), alpha).p_value


def anm_baseline(data, skeleton, alpha=0.05):
    """Discrete additive-noise sink elimination over a known skeleton.

    Each round regresses every remaining node on its remaining skeleton
    neighbors (fit = per-configuration conditional mode), forms the cyclic
    residual (x - fit) mod n, and G-tests it against each neighbor.  The
    node with the largest minimum p-value becomes the sink (ties to the
    smallest index); its edges orient inward and it leaves the pool.
    """
    if not isinstance(data, Dataset):
        raise InvalidParameterError("anm_baseline needs a Dataset")
    if tuple(skeleton.names) != tuple(data.columns):
        raise InvalidParameterError("skeleton names must match data columns")
    n = data.n_vars
    remaining = set(range(n))
    edges = set()
    while remaining:
        best_v, best_p = None, -1.0
        residuals = {}
        for v in sorted(remaining):
            nbrs = sorted(u for u in skeleton.neighbors(v) if u in remaining)
            x = data.rows[:, v]
            card = int(data.cards[v])
            code = np.zeros(data.n_rows, dtype=np.int64)
            n_cfg = 1
            for u in nbrs:
                code = code * int(data.cards[u]) + data.rows[:, u]
                n_cfg *= int(data.cards[u])
            fit = _mode_fit(x, code, n_cfg, card)
            resid = (x - fit[code]) % card
            residuals[v] = resid
            p_min = 1.0
            for u in nbrs:
                p = _pair_p_value(resid, card, data.rows[:, u],
                                  int(data.cards[u]), alpha)
                p_min = min(p_min, p)
            if p_min > best_p:
                best_v, best_p = v, p_min
        for u in sorted(skeleton.neighbors(best_v)):
            if u in remaining and u != best_v:
                edges.add((u, best_v))
        remaining.discard(best_v)
    return Dag(tuple(data.columns), frozenset(edges))
