"""Greedy minimum-entropy coupling, a small-support brute-force oracle, and
the conditional coupling-entropy estimator MEC(X|S).

The greedy scheme is the min-of-maxima rule: repeatedly take the most
probable remaining state of each marginal, emit one joint cell carrying the
smallest of those maxima, subtract it everywhere, and recurse on the
residuals.  Its entropy upper-bounds the true minimum-entropy coupling and
always dominates each input marginal's entropy.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass

import numpy as np
from scipy.special import xlogy

from .errors import InvalidParameterError, UnsupportedSizeError
from .probcore import (
    Categorical,
    Dataset,
    JointTable,
    empirical_conditionals,
    entropy,
    joint_conditionals,
)

_LN2 = float(np.log(2.0))
_RESIDUAL_EPS = 1e-12

__all__ = ["Coupling", "greedy_coupling", "bruteforce_coupling", "mec"]


@dataclass(frozen=True)
class Coupling:
    """A sparse joint assignment over several marginals.

    ``cells`` maps index tuples (one coordinate per marginal) to masses that
    sum to 1; ``entropy_bits`` is the Shannon entropy of those masses.
    """

    cells: tuple
    entropy_bits: float
    marginal_count: int

    def masses(self):
        return np.array([w for _, w in self.cells])

    def project(self, i, support):
        """Marginal of coordinate ``i`` implied by the coupling cells."""
        out = np.zeros(support)
        for idx, w in self.cells:
            out[idx[i]] += w
        return out


def greedy_coupling(marginals):
    """Couple the given marginals greedily, minimizing joint entropy.

    Supports may differ across marginals.  Ties in the per-marginal argmax
    break toward the smallest state index, making the output deterministic.
    """
    marginals = list(marginals)
    if not marginals:
        raise InvalidParameterError("need at least one marginal")
    vecs = [m.probs if isinstance(m, Categorical) else Categorical(np.asarray(m, float)).probs
            for m in marginals]
    m = len(vecs)
    width = max(v.size for v in vecs)
    residual = np.zeros((m, width))
    for i, v in enumerate(vecs):
        residual[i, : v.size] = v
    rows = np.arange(m)
    cells: dict = {}
    # each pass zeroes at least one residual entry, so the loop runs at most
    # sum-of-support-sizes times before every marginal is exhausted
    while True:
        idx = residual.argmax(axis=1)
        w = float(residual[rows, idx].min())
        if w <= _RESIDUAL_EPS:
            break
        key = tuple(int(s) for s in idx)
        cells[key] = cells.get(key, 0.0) + w
        residual[rows, idx] -= w
        np.clip(residual, 0.0, None, out=residual)
    total = sum(cells.values())
    items = tuple((k, v / total) for k, v in cells.items())
    mass = np.array([v for _, v in items])
    ent = float(-xlogy(mass, mass).sum() / _LN2)
    coup = Coupling(cells=items, entropy_bits=ent, marginal_count=m)
    for i, v in enumerate(vecs):
        got = coup.project(i, width)[: v.size]
        if not np.allclose(got, v, atol=1e-7):
            raise AssertionError(
                f"greedy coupling failed to reproduce marginal {i} within 1e-7"
            )
    return coup


def _entropy_of(vec):
    return float(-xlogy(vec, vec).sum() / _LN2)


def _polytope_vertices(p, q):
    """All vertices of the transportation polytope with margins p, q.

    A vertex corresponds to a spanning forest of the bipartite support graph;
    with r + c nodes, enumerate the cell subsets of size r + c - 1 that are
    acyclic and solve each by leaf elimination, keeping the feasible ones.
    """
    r, c = p.size, q.size
    cells = list(itertools.product(range(r), range(c)))
    out = []
    for basis in itertools.combinations(cells, r + c - 1):
        # acyclicity check on the bipartite graph (rows 0..r-1, cols r..r+c-1)
        parent = list(range(r + c))

        def find(x):
            while parent[x] != x:
                parent[x] = parent[parent[x]]
                x = parent[x]
            return x

        acyclic = True
        for i, j in basis:
            a, b = find(i), find(r + j)
            if a == b:
                acyclic = False
                break
            parent[a] = b
        if not acyclic:
            continue
        mat = np.zeros((r, c))
        row_left = p.astype(float).copy()
        col_left = q.astype(float).copy()
        remaining = set(basis)
        progressed = True
        while remaining and progressed:
            progressed = False
            for i, j in list(remaining):
                row_deg = sum(1 for (a, _) in remaining if a == i)
                col_deg = sum(1 for (_, b) in remaining if b == j)
                if row_deg == 1:
                    mat[i, j] = row_left[i]
                    col_left[j] -= row_left[i]
                    row_left[i] = 0.0
                    remaining.discard((i, j))
                    progressed = True
                elif col_deg == 1:
                    mat[i, j] = col_left[j]
                    row_left[i] -= col_left[j]
                    col_left[j] = 0.0
                    remaining.discard((i, j))
                    progressed = True
        if remaining:
            continue
        if mat.min() < -1e-9:
            continue
        out.append(np.clip(mat, 0.0, None).ravel())
    return out


def bruteforce_coupling(p, q, grid=0.05):
    """Minimum coupling entropy of two marginals with support at most 3.

    Scans the free (r-1)(c-1) block of the transportation polytope at the
    given grid resolution and also evaluates every polytope vertex; entropy
    is concave, so its minimum is attained at a vertex and the grid serves as
    an independent cross-check.  Returns the smallest entropy found, in bits.
    """
    pv = p.probs if isinstance(p, Categorical) else Categorical(np.asarray(p, float)).probs
    qv = q.probs if isinstance(q, Categorical) else Categorical(np.asarray(q, float)).probs
    if pv.size > 3 or qv.size > 3:
        raise UnsupportedSizeError("bruteforce_coupling handles supports up to 3")
    if not (0 < grid <= 0.1):
        raise InvalidParameterError("grid resolution must lie in (0, 0.1]")
    r, c = pv.size, qv.size
    best = np.inf
    for vert in _polytope_vertices(pv, qv):
        best = min(best, _entropy_of(vert))
    free = [(i, j) for i in range(r - 1) for j in range(c - 1)]
    if not free:
        return best
    axes = []
    for i, j in free:
        hi = min(float(pv[i]), float(qv[j]))
        axes.append(np.arange(0.0, hi + grid, grid).clip(max=hi))
    grids = np.meshgrid(*axes, indexing="ij")
    flat = np.stack([g.ravel() for g in grids], axis=1)
    mats = np.zeros((flat.shape[0], r, c))
    for k, (i, j) in enumerate(free):
        mats[:, i, j] = flat[:, k]
    # complete the last column and row from the marginal constraints
    mats[:, : r - 1, c - 1] = pv[: r - 1] - mats[:, : r - 1, : c - 1].sum(axis=2)
    mats[:, r - 1, :] = qv - mats[:, : r - 1, :].sum(axis=1)
    feasible = (mats >= -1e-9).all(axis=(1, 2))
    if feasible.any():
        good = np.clip(mats[feasible], 0.0, None).reshape(feasible.sum(), -1)
        ents = -xlogy(good, good).sum(axis=1) / _LN2
        best = min(best, float(ents.min()))
    return best


def mec(data, target, given=(), smoothing=0.0):
    """Coupling-entropy estimate of the randomness needed to produce `target`
    from the variables in `given`.

    Builds the conditional of `target` under every observed configuration of
    `given` and returns the greedy coupling entropy of that family; a single
    exogenous variable independent of the configuration must couple all the
    conditionals at once, so configuration weights do not enter the
    objective.  With `given` empty this is the plug-in marginal entropy.
    Accepts a :class:`Dataset` (plug-in conditionals, honoring `smoothing`)
    or a :class:`JointTable` (exact conditionals, `smoothing` ignored).
    """
    if isinstance(data, JointTable):
        conds = joint_conditionals(data, target, given)
    elif isinstance(data, Dataset):
        conds = empirical_conditionals(data, target, given, smoothing)
    else:
        raise InvalidParameterError("expected a Dataset or JointTable")
    if not set(given):
        return entropy(conds[0][2])
    return greedy_coupling([c for _, _, c in conds]).entropy_bits
