"""Discrete structural causal models: uniform-random function tables with
entropy-targeted exogenous noise, cyclic additive-noise models, ancestral
sampling, and exact joint computation.

Every node i holds an ordered parent tuple, an exogenous Categorical over m
states, and a table mapping (parent configuration, exogenous state) to a
node state.  Parent configurations are mixed-radix codes over the parents in
ascending index order, first parent most significant.
"""

from __future__ import annotations

import json
from dataclasses import dataclass

import numpy as np

from .errors import CapacityError, InvalidParameterError
from .graphs import Dag, topological_order
from .probcore import (
    Categorical,
    Dataset,
    JointTable,
    entropy_targeted_dirichlet,
)

HES_TARGET_BITS = 3.3

__all__ = [
    "NoiseSpec",
    "Scm",
    "random_scm",
    "anm_scm",
    "sample",
    "exact_joint",
    "support_check",
    "scm_to_json",
    "scm_from_json",
    "HES_TARGET_BITS",
]


@dataclass(frozen=True)
class NoiseSpec:
    """How exogenous noise is drawn.

    ``dirichlet-targeted`` draws each exogenous distribution with entropy
    within ``tol`` of ``target_h`` bits; ``cyclic-uniform`` is the uniform
    zero-mean offset noise on {-k, ..., k} used by additive models.
    """

    kind: str
    target_h: float = 0.0
    tol: float = 0.05
    half_width: int = 0

    def __post_init__(self):
        if self.kind not in ("dirichlet-targeted", "cyclic-uniform"):
            raise InvalidParameterError(f"unknown noise kind {self.kind!r}")
        if self.kind == "dirichlet-targeted":
            if self.target_h < 0 or self.tol <= 0:
                raise InvalidParameterError("need target_h >= 0 and tol > 0")
        elif self.half_width < 0:
            raise InvalidParameterError("half_width must be >= 0")

    @classmethod
    def dirichlet(cls, target_h, tol=0.05):
        return cls(kind="dirichlet-targeted", target_h=float(target_h), tol=float(tol))

    @classmethod
    def cyclic(cls, half_width):
        return cls(kind="cyclic-uniform", half_width=int(half_width))


@dataclass(frozen=True)
class Scm:
    """An SCM over ``graph``: per node, parents, exogenous noise, and table.

    ``tables[i]`` has shape (product of parent cardinalities, m_i) and every
    entry lies in [0, cards[i]).
    """

    graph: Dag
    cards: tuple
    parents: tuple
    exos: tuple
    tables: tuple

    def __post_init__(self):
        n_nodes = self.graph.n
        if not (len(self.cards) == len(self.parents) == len(self.exos)
                == len(self.tables) == n_nodes):
            raise InvalidParameterError("per-node field lengths must match graph")
        for i in range(n_nodes):
            if tuple(self.parents[i]) != self.graph.parents(i):
                raise InvalidParameterError(
                    f"parents of node {i} do not match the graph"
                )
            m = len(self.exos[i])
            n_cfg = 1
            for p in self.parents[i]:
                n_cfg *= int(self.cards[p])
            table = np.asarray(self.tables[i])
            if table.shape != (n_cfg, m):
                raise InvalidParameterError(
                    f"table of node {i} must have shape ({n_cfg}, {m})"
                )
            if table.size and (table.min() < 0 or table.max() >= self.cards[i]):
                raise InvalidParameterError(
                    f"table entries of node {i} must lie in [0, {self.cards[i]})"
                )

    @property
    def n_nodes(self):
        return self.graph.n

    def config_index(self, i, parent_states):
        """Mixed-radix code of a parent-state assignment for node i."""
        code = 0
        for p, s in zip(self.parents[i], parent_states):
            code = code * int(self.cards[p]) + int(s)
        return code

    def node_conditional(self, i):
        """Matrix of P(node i = s | parent config), shape (configs, card)."""
        table = np.asarray(self.tables[i])
        exo = self.exos[i].probs
        n_cfg = table.shape[0]
        cond = np.zeros((n_cfg, int(self.cards[i])))
        for e in range(table.shape[1]):
            np.add.at(cond, (np.arange(n_cfg), table[:, e]), exo[e])
        return cond


def _hes_target(m, tol):
    """High-entropy-source target, capped to stay reachable on m states."""
    return min(HES_TARGET_BITS, float(np.log2(m)) - tol)


def random_scm(g, n_states, m_states, noise, high_entropy_sources=False, rng=None):
    """Draw an SCM on ``g`` with uniform-random tables.

    Every table cell is i.i.d. uniform over the node's states; every
    exogenous distribution is drawn by entropy-targeted Dirichlet per
    ``noise`` (which must be dirichlet-targeted).  With
    ``high_entropy_sources`` the parentless nodes instead target
    ``HES_TARGET_BITS`` (capped at log2(m) - tol so small m stays feasible).
    """
    if n_states < 1 or m_states < 1:
        raise InvalidParameterError("n_states and m_states must be >= 1")
    if noise.kind != "dirichlet-targeted":
        raise InvalidParameterError("random_scm needs dirichlet-targeted noise")
    if rng is None:
        raise InvalidParameterError("rng is required")
    cards = tuple(int(n_states) for _ in range(g.n))
    parents = tuple(g.parents(i) for i in range(g.n))
    exos = []
    tables = []
    source_target = _hes_target(m_states, noise.tol)
    for i in range(g.n):
        target = noise.target_h
        if high_entropy_sources and not parents[i]:
            target = source_target
        exo = entropy_targeted_dirichlet(m_states, target, noise.tol, rng)
        n_cfg = 1
        for p in parents[i]:
            n_cfg *= cards[p]
        table = rng.integers(0, n_states, size=(n_cfg, m_states))
        exos.append(exo)
        tables.append(table)
    return Scm(g, cards, parents, tuple(exos), tuple(tables))


def anm_scm(g, n_states, half_width, rng):
    """Additive-noise SCM: node = (f(parents) + offset) mod n.

    ``f`` is uniform random per parent configuration; the offset is uniform
    on {-k, ..., k} (2k + 1 states, entropy log2(2k + 1)).  Source nodes use
    the same construction with a single configuration, so a source marginal
    is uniform over a (2k + 1)-wide window of states.
    """
    k = int(half_width)
    if k < 0:
        raise InvalidParameterError("half_width must be >= 0")
    if 2 * k + 1 > n_states:
        raise InvalidParameterError(
            f"noise support 2k+1 = {2 * k + 1} exceeds n_states = {n_states}"
        )
    cards = tuple(int(n_states) for _ in range(g.n))
    parents = tuple(g.parents(i) for i in range(g.n))
    m = 2 * k + 1
    exos = []
    tables = []
    for i in range(g.n):
        n_cfg = 1
        for p in parents[i]:
            n_cfg *= cards[p]
        f = rng.integers(0, n_states, size=n_cfg)
        offsets = np.arange(-k, k + 1)
        table = (f[:, None] + offsets[None, :]) % n_states
        exos.append(Categorical(np.full(m, 1.0 / m)))
        tables.append(table)
    return Scm(g, cards, parents, tuple(exos), tuple(tables))


def sample(scm, n_samples, rng):
    """Ancestral sampling: n_samples rows in graph-node column order."""
    if n_samples < 1:
        raise InvalidParameterError("n_samples must be >= 1")
    n_samples = int(n_samples)
    cols = np.zeros((n_samples, scm.n_nodes), dtype=np.int64)
    for v in topological_order(scm.graph):
        exo = scm.exos[v].probs
        e = rng.choice(exo.size, size=n_samples, p=exo)
        code = np.zeros(n_samples, dtype=np.int64)
        for p in scm.parents[v]:
            code = code * int(scm.cards[p]) + cols[:, p]
        table = np.asarray(scm.tables[v])
        cols[:, v] = table[code, e]
    return Dataset(scm.graph.names, np.array(scm.cards), cols)


_JOINT_CAP = 10**7


def exact_joint(scm):
    """The exact joint distribution of the SCM as a JointTable.

    Processes nodes topologically, multiplying in each node's conditional
    given its parents; refuses state spaces above 10^7 configurations.
    """
    total = 1
    for c in scm.cards:
        total *= int(c)
        if total > _JOINT_CAP:
            raise CapacityError(
                f"joint would exceed {_JOINT_CAP} configurations"
            )
    joint = np.ones((), dtype=float)
    processed = []  # ascending node indices whose axes joint already carries
    for v in topological_order(scm.graph):
        cond = scm.node_conditional(v)  # (configs over ascending parents, card)
        pars = scm.parents[v]
        new_axes = sorted(processed + [v])
        pos_v = new_axes.index(v)
        block = cond.reshape(tuple(int(scm.cards[p]) for p in pars) + (int(scm.cards[v]),))
        block = np.moveaxis(block, -1, _rank_among(v, list(pars)))
        shape = tuple(
            int(scm.cards[a]) if (a in pars or a == v) else 1 for a in new_axes
        )
        block = block.reshape(shape)
        joint = np.expand_dims(joint, pos_v) * block
        processed = new_axes
    return JointTable(scm.graph.names, np.array(scm.cards), joint)


def _rank_among(v, others):
    """Position of v once inserted into the sorted list ``others``."""
    return sum(1 for o in others if o < v)


def support_check(p, alpha_count, beta):
    """True iff at least alpha_count states of p carry mass >= beta."""
    probs = p.probs if isinstance(p, Categorical) else np.asarray(p, float)
    return int((probs >= beta).sum()) >= int(alpha_count)


def scm_to_json(scm):
    """Serialize an SCM (graph, cards, exogenous vectors, tables)."""
    return json.dumps({
        "nodes": list(scm.graph.names),
        "edges": sorted([a, b] for a, b in scm.graph.edges),
        "cards": [int(c) for c in scm.cards],
        "exos": [[float(x) for x in e.probs] for e in scm.exos],
        "tables": [np.asarray(t).tolist() for t in scm.tables],
    })


def scm_from_json(text):
    try:
        obj = json.loads(text)
        g = Dag(tuple(obj["nodes"]), frozenset(tuple(e) for e in obj["edges"]))
        return Scm(
            graph=g,
            cards=tuple(int(c) for c in obj["cards"]),
            parents=tuple(g.parents(i) for i in range(g.n)),
            exos=tuple(Categorical(np.array(e)) for e in obj["exos"]),
            tables=tuple(np.array(t, dtype=np.int64) for t in obj["tables"]),
        )
    except (KeyError, TypeError, json.JSONDecodeError) as exc:
        raise InvalidParameterError(f"bad SCM JSON: {exc}") from exc
