"""Categorical distributions, Shannon entropy, entropy-targeted Dirichlet
sampling, and plug-in estimation from integer-coded samples.

All entropies throughout the package are base-2 (bits).  Randomness always
flows through an explicit ``numpy.random.Generator`` so that every caller is
reproducible from a seed; :func:`make_rng` and :func:`stable_seed` are the two
blessed ways to obtain one.
"""

from __future__ import annotations

import csv
import hashlib
import io
import json
from dataclasses import dataclass, field

import numpy as np
from scipy.special import xlogy

from .errors import (
    ConvergenceFailureError,
    DataFormatError,
    InsufficientDataError,
    InvalidParameterError,
    TargetUnreachableError,
)

_LN2 = float(np.log(2.0))
_MASS_ATOL = 1e-9

__all__ = [
    "Categorical",
    "Dataset",
    "JointTable",
    "make_rng",
    "stable_seed",
    "entropy",
    "dirichlet_sample",
    "entropy_targeted_dirichlet",
    "empirical_conditionals",
    "joint_conditionals",
]


def make_rng(seed):
    """Return a deterministic generator (PCG64) for the given integer seed."""
    return np.random.default_rng(seed)


def stable_seed(*parts):
    """Derive a 64-bit seed from the given parts, stable across processes.

    Uses SHA-256 over a delimited rendering of ``parts``; unlike ``hash()``
    the result does not depend on interpreter salting, platform, or run.
    """
    text = "\x1f".join(repr(p) for p in parts)
    digest = hashlib.sha256(text.encode("utf-8")).digest()
    return int.from_bytes(digest[:8], "big")


@dataclass(frozen=True)
class Categorical:
    """A finite probability vector over ``k >= 1`` states.

    Masses must be non-negative and sum to 1 within 1e-9; both are checked at
    construction so downstream code can assume validity.
    """

    probs: np.ndarray

    def __post_init__(self):
        p = np.asarray(self.probs, dtype=float)
        if p.ndim != 1 or p.size < 1:
            raise InvalidParameterError("Categorical needs a 1-D vector with k >= 1")
        if np.any(p < -_MASS_ATOL):
            raise InvalidParameterError("Categorical masses must be non-negative")
        total = float(p.sum())
        if abs(total - 1.0) > _MASS_ATOL:
            raise InvalidParameterError(
                f"Categorical masses must sum to 1 (got {total!r})"
            )
        p = np.clip(p, 0.0, None)
        p.setflags(write=False)
        object.__setattr__(self, "probs", p)

    def __len__(self):
        return int(self.probs.size)

    def __getitem__(self, i):
        return float(self.probs[i])


def _as_prob_vector(p):
    if isinstance(p, Categorical):
        return p.probs
    return Categorical(np.asarray(p, dtype=float)).probs


def entropy(p):
    """Shannon entropy of a Categorical (or raw mass vector) in bits."""
    v = _as_prob_vector(p)
    return float(-xlogy(v, v).sum() / _LN2)


@dataclass(frozen=True)
class Dataset:
    """Integer-coded samples: a row per observation, a column per variable.

    ``cards[v]`` is the number of states of variable ``v``; every entry in
    column ``v`` must lie in ``[0, cards[v])``.
    """

    columns: tuple
    cards: np.ndarray
    rows: np.ndarray

    def __post_init__(self):
        cols = tuple(str(c) for c in self.columns)
        cards = np.asarray(self.cards, dtype=np.int64)
        rows = np.asarray(self.rows, dtype=np.int64)
        if rows.ndim != 2:
            raise InvalidParameterError("rows must be a 2-D matrix")
        if rows.shape[1] != len(cols) or cards.shape != (len(cols),):
            raise InvalidParameterError("columns, cards, and row width must agree")
        if np.any(cards < 1):
            raise InvalidParameterError("every cardinality must be >= 1")
        if rows.size and (rows.min() < 0 or np.any(rows.max(axis=0) >= cards)):
            raise InvalidParameterError("entries must lie in [0, cards[v]) per column")
        rows.setflags(write=False)
        cards.setflags(write=False)
        object.__setattr__(self, "columns", cols)
        object.__setattr__(self, "cards", cards)
        object.__setattr__(self, "rows", rows)

    @property
    def n_rows(self):
        return int(self.rows.shape[0])

    @property
    def n_vars(self):
        return int(self.rows.shape[1])

    def column(self, v):
        return self.rows[:, v]

    def to_csv(self, path, schema_path=None):
        """Write the CSV, plus an optional sidecar recording cardinalities."""
        with open(path, "w", newline="", encoding="utf-8") as fh:
            writer = csv.writer(fh, lineterminator="\n")
            writer.writerow(self.columns)
            writer.writerows(self.rows.tolist())
        if schema_path is not None:
            schema = {"cards": {n: int(k) for n, k in
                                zip(self.columns, self.cards)}}
            with open(schema_path, "w", encoding="utf-8") as fh:
                json.dump(schema, fh, indent=2)
                fh.write("\n")

    @classmethod
    def from_csv(cls, path, schema_path=None):
        """Read a dataset CSV (header row of names, integer cells).

        Cardinalities default to max observed + 1 per column; a sidecar JSON
        schema ``{"cards": {"name": k, ...}}`` overrides them.
        """
        with open(path, "r", encoding="utf-8") as fh:
            return cls.from_csv_text(fh.read(), schema_path=schema_path)

    @classmethod
    def from_csv_text(cls, text, schema_path=None):
        reader = csv.reader(io.StringIO(text))
        try:
            header = next(reader)
        except StopIteration:
            raise DataFormatError("dataset CSV is empty") from None
        names = [h.strip() for h in header]
        data = []
        for lineno, row in enumerate(reader, start=2):
            if not row or (len(row) == 1 and not row[0].strip()):
                continue
            if len(row) != len(names):
                raise DataFormatError(
                    f"row {lineno}: expected {len(names)} cells, got {len(row)}"
                )
            try:
                data.append([int(cell) for cell in row])
            except ValueError:
                raise DataFormatError(
                    f"row {lineno}: non-integer cell in {row!r}"
                ) from None
        matrix = np.asarray(data, dtype=np.int64).reshape(len(data), len(names))
        if matrix.size and matrix.min() < 0:
            raise DataFormatError("dataset entries must be non-negative")
        cards = (matrix.max(axis=0) + 1) if matrix.size else np.ones(len(names), np.int64)
        if schema_path is not None:
            with open(schema_path, "r", encoding="utf-8") as fh:
                schema = json.load(fh)
            declared = schema.get("cards", {})
            cards = cards.copy()
            for i, name in enumerate(names):
                if name in declared:
                    cards[i] = int(declared[name])
        return cls(tuple(names), cards, matrix)


@dataclass(frozen=True)
class JointTable:
    """A dense exact joint distribution over named categorical variables.

    The population analogue of :class:`Dataset`: estimators that accept
    either will use exact conditionals instead of plug-in counts when handed
    one of these.  ``probs`` has one axis per variable, shaped by ``cards``.
    """

    columns: tuple
    cards: np.ndarray
    probs: np.ndarray

    def __post_init__(self):
        cols = tuple(str(c) for c in self.columns)
        cards = np.asarray(self.cards, dtype=np.int64)
        probs = np.asarray(self.probs, dtype=float)
        if probs.shape != tuple(int(c) for c in cards):
            raise InvalidParameterError("probs shape must equal tuple(cards)")
        if len(cols) != cards.size:
            raise InvalidParameterError("columns and cards must agree")
        if np.any(probs < -_MASS_ATOL):
            raise InvalidParameterError("joint masses must be non-negative")
        if abs(float(probs.sum()) - 1.0) > _MASS_ATOL:
            raise InvalidParameterError("joint masses must sum to 1")
        probs = np.clip(probs, 0.0, None)
        probs.setflags(write=False)
        cards.setflags(write=False)
        object.__setattr__(self, "columns", cols)
        object.__setattr__(self, "cards", cards)
        object.__setattr__(self, "probs", probs)

    @property
    def n_vars(self):
        return int(self.cards.size)

    def marginal(self, v):
        axes = tuple(a for a in range(self.n_vars) if a != v)
        return Categorical(self.probs.sum(axis=axes))


def dirichlet_sample(k, alpha, rng):
    """One draw from the symmetric Dirichlet(alpha) over k states."""
    if int(k) < 1:
        raise InvalidParameterError("k must be >= 1")
    if not (alpha > 0):
        raise InvalidParameterError("alpha must be > 0")
    k = int(k)
    if k == 1:
        return Categorical(np.array([1.0]))
    draw = rng.dirichlet(np.full(k, float(alpha)))
    draw = np.clip(draw, 0.0, None)
    return Categorical(draw / draw.sum())


_ALPHA_BRACKET = (1e-4, 1e4)
_ALPHA_STEPS = 60
_ALPHA_MC_DRAWS = 200
_REJECTION_CAP = 10_000
_ALPHA_CACHE: dict = {}


def _alpha_for_target(k, target_h):
    """Bisect (geometrically) for the alpha whose mean draw entropy is target_h.

    Expected Dirichlet entropy is monotone increasing in alpha, so a bracket
    bisection on a Monte-Carlo estimate converges; the estimate uses its own
    fixed-seed generator keyed on (k, target) so results are cacheable and
    independent of caller RNG state.
    """
    key = (int(k), round(float(target_h), 9))
    if key in _ALPHA_CACHE:
        return _ALPHA_CACHE[key]
    mc = make_rng(stable_seed("alpha-search", key[0], key[1]))
    lo, hi = _ALPHA_BRACKET
    for _ in range(_ALPHA_STEPS):
        mid = float(np.sqrt(lo * hi))
        draws = mc.dirichlet(np.full(k, mid), size=_ALPHA_MC_DRAWS)
        mean_h = float((-xlogy(draws, draws).sum(axis=1) / _LN2).mean())
        if mean_h < target_h:
            lo = mid
        else:
            hi = mid
    alpha = float(np.sqrt(lo * hi))
    _ALPHA_CACHE[key] = alpha
    return alpha


def entropy_targeted_dirichlet(k, target_h, tol, rng):
    """Draw a Categorical over k states with entropy within tol of target_h.

    Binary-searches the symmetric-Dirichlet alpha whose expected entropy
    matches the target, then rejection-samples individual draws into the
    tolerance band (cap 10,000 draws).
    """
    k = int(k)
    if k < 1:
        raise InvalidParameterError("k must be >= 1")
    if not (tol > 0):
        raise InvalidParameterError("tol must be > 0")
    if target_h < 0:
        raise InvalidParameterError("target entropy must be >= 0")
    if k == 1:
        # the single distribution on one state has entropy exactly 0
        if target_h <= tol:
            return Categorical(np.array([1.0]))
        raise TargetUnreachableError(
            f"entropy {target_h} unreachable on 1 state (only 0 is attainable)"
        )
    max_h = float(np.log2(k))
    if target_h > max_h - tol:
        raise TargetUnreachableError(
            f"target {target_h} bits exceeds log2({k}) - tol = {max_h - tol:.6f}"
        )
    alpha = _alpha_for_target(k, target_h)
    best = None
    best_gap = np.inf
    for _ in range(_REJECTION_CAP):
        draw = dirichlet_sample(k, alpha, rng)
        gap = abs(entropy(draw) - target_h)
        if gap <= tol:
            assert abs(entropy(draw) - target_h) <= tol
            return draw
        if gap < best_gap:
            best, best_gap = draw, gap
    raise ConvergenceFailureError(
        f"no draw within {tol} bits of {target_h} after {_REJECTION_CAP} tries "
        f"(best gap {best_gap:.4f})",
        best=best,
        best_entropy=None if best is None else entropy(best),
    )


def _config_codes(data, given):
    """Encode the `given` columns of each row as a single integer code.

    `given` is treated in ascending variable order; the code is the mixed
    radix value of those columns, so sorting codes sorts configurations
    lexicographically.
    """
    given = sorted(given)
    cards = [int(data.cards[g]) for g in given]
    codes = np.zeros(data.n_rows, dtype=np.int64)
    for g, card in zip(given, cards):
        codes = codes * card + data.column(g)
    return given, cards, codes


def _decode_config(code, cards):
    out = []
    for card in reversed(cards):
        out.append(int(code % card))
        code //= card
    return tuple(reversed(out))


def empirical_conditionals(data, target, given, smoothing=0.0):
    """Plug-in conditionals of `target` per observed configuration of `given`.

    Returns a list of ``(config, weight, Categorical)`` triples, one per
    configuration of the `given` variables (ascending index order) that
    occurs at least once; `weight` is the configuration's empirical
    probability.  `smoothing` is added to every count before normalizing the
    conditional (weights stay unsmoothed).  With ``given`` empty the single
    entry holds the marginal of `target`.
    """
    given = set(given)
    if target in given:
        raise InvalidParameterError("target must not be conditioned on itself")
    all_vars = set(range(data.n_vars))
    if not ({target} | given) <= all_vars:
        raise InvalidParameterError("variable index out of range")
    if smoothing < 0:
        raise InvalidParameterError("smoothing must be >= 0")
    if data.n_rows == 0:
        raise InsufficientDataError("empty dataset")
    card_t = int(data.cards[target])
    tcol = data.column(target)
    n = data.n_rows
    if not given:
        counts = np.bincount(tcol, minlength=card_t).astype(float) + smoothing
        return [((), 1.0, Categorical(counts / counts.sum()))]
    g_sorted, g_cards, codes = _config_codes(data, given)
    order = np.argsort(codes, kind="stable")
    codes_sorted = codes[order]
    tcol_sorted = tcol[order]
    uniq, starts = np.unique(codes_sorted, return_index=True)
    bounds = np.append(starts, n)
    out = []
    for u, lo, hi in zip(uniq, bounds[:-1], bounds[1:]):
        counts = np.bincount(tcol_sorted[lo:hi], minlength=card_t).astype(float)
        counts += smoothing
        cfg = _decode_config(int(u), g_cards)
        out.append((cfg, (hi - lo) / n, Categorical(counts / counts.sum())))
    return out


def joint_conditionals(joint, target, given):
    """Exact conditionals of `target` from a JointTable, mirroring
    :func:`empirical_conditionals` (configurations with zero mass omitted)."""
    given = set(given)
    if target in given:
        raise InvalidParameterError("target must not be conditioned on itself")
    if not ({target} | given) <= set(range(joint.n_vars)):
        raise InvalidParameterError("variable index out of range")
    if not given:
        return [((), 1.0, joint.marginal(target))]
    keep = sorted(given | {target})
    drop = tuple(a for a in range(joint.n_vars) if a not in keep)
    sub = joint.probs.sum(axis=drop) if drop else joint.probs
    sub = np.moveaxis(sub, keep.index(target), -1)
    g_sorted = sorted(given)
    flat = sub.reshape(-1, sub.shape[-1])
    g_cards = [int(joint.cards[g]) for g in g_sorted]
    out = []
    for code in range(flat.shape[0]):
        mass = float(flat[code].sum())
        if mass <= 0.0:
            continue
        cfg = _decode_config(code, g_cards)
        out.append((cfg, mass, Categorical(flat[code] / mass)))
    return out
