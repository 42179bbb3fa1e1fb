"""Reader and forward sampler for discrete Bayesian networks in BIF format.

Recognizes ``network``, ``variable`` (discrete only), and ``probability``
blocks, with ``table`` rows for parentless variables and per-parent-state
rows otherwise.  Comments (// and %) and ``property`` lines are skipped.
Every structural problem raises a parse error carrying the offending line
number.  Read-only: no BIF writer is provided.
"""

from __future__ import annotations

import re
import warnings
from dataclasses import dataclass

import numpy as np

from .errors import BifParseError, InvalidParameterError
from .graphs import Dag, topological_order
from .probcore import Dataset

__all__ = ["BayesNet", "parse_bif", "read_bif", "bn_sample", "bn_truth"]

ROW_SUM_TOL = 1e-4


@dataclass(frozen=True)
class BayesNet:
    """A discrete Bayesian network: variables, state names, parents, CPTs.

    ``cpts[i]`` has one row per configuration of ``parents[i]`` (mixed-radix
    over the declared parent order, first parent most significant), each row
    a distribution over the states of variable i.
    """

    names: tuple
    states: tuple
    parents: tuple
    cpts: tuple

    def __post_init__(self):
        n = len(self.names)
        if not (len(self.states) == len(self.parents) == len(self.cpts) == n):
            raise InvalidParameterError("per-variable field lengths must match")
        edges = frozenset(
            (p, i) for i in range(n) for p in self.parents[i]
        )
        object.__setattr__(self, "_dag", Dag(self.names, edges))
        for i in range(n):
            k = len(self.states[i])
            n_cfg = 1
            for p in self.parents[i]:
                n_cfg *= len(self.states[p])
            cpt = np.asarray(self.cpts[i])
            if cpt.shape != (n_cfg, k):
                raise InvalidParameterError(
                    f"CPT of {self.names[i]} must have shape ({n_cfg}, {k})"
                )
            if np.abs(cpt.sum(axis=1) - 1.0).max() > 1e-6:
                raise InvalidParameterError(
                    f"CPT rows of {self.names[i]} must sum to 1"
                )
            if cpt.min() < 0:
                raise InvalidParameterError(
                    f"CPT of {self.names[i]} has negative entries"
                )

    @property
    def n_vars(self):
        return len(self.names)

    def cards(self):
        return np.array([len(s) for s in self.states], dtype=np.int64)


_TOKEN = re.compile(r"[{}()\[\];,|]|[^\s{}()\[\];,|]+")


def _tokenize(text):
    """(token, line) pairs with //- and %-comments stripped."""
    out = []
    for ln, line in enumerate(text.splitlines(), start=1):
        line = line.split("//", 1)[0].split("%", 1)[0]
        for m in _TOKEN.finditer(line):
            out.append((m.group(0), ln))
    return out


class _Cursor:
    def __init__(self, tokens):
        self.tokens = tokens
        self.pos = 0

    def done(self):
        return self.pos >= len(self.tokens)

    def line(self):
        if self.done():
            return self.tokens[-1][1] if self.tokens else 1
        return self.tokens[self.pos][1]

    def peek(self):
        return None if self.done() else self.tokens[self.pos][0]

    def next(self, what="token"):
        if self.done():
            raise BifParseError(f"unexpected end of input, expected {what}",
                                self.line())
        tok, _ = self.tokens[self.pos]
        self.pos += 1
        return tok

    def expect(self, tok):
        got = self.next(repr(tok))
        if got != tok:
            raise BifParseError(f"expected {tok!r}, got {got!r}",
                                self.tokens[self.pos - 1][1])
        return got


def _skip_property(cur):
    while True:
        tok = cur.next("';' ending property")
        if tok == ";":
            return


def _skip_block(cur):
    cur.expect("{")
    depth = 1
    while depth:
        tok = cur.next("'}'")
        if tok == "{":
            depth += 1
        elif tok == "}":
            depth -= 1


def _parse_number(cur, context):
    tok = cur.next("number")
    ln = cur.tokens[cur.pos - 1][1]
    try:
        return float(tok)
    except ValueError:
        raise BifParseError(f"expected a number in {context}, got {tok!r}", ln)


def _parse_name_list(cur, closing):
    names = []
    while True:
        names.append(cur.next("name"))
        tok = cur.next(f"',' or {closing!r}")
        if tok == closing:
            return names
        if tok != ",":
            raise BifParseError(f"expected ',' or {closing!r}, got {tok!r}",
                                cur.tokens[cur.pos - 1][1])


def _parse_variable(cur, variables, var_lines):
    name = cur.next("variable name")
    name_line = cur.tokens[cur.pos - 1][1]
    if name in variables:
        raise BifParseError(f"duplicate variable {name!r}", name_line)
    var_lines[name] = name_line
    cur.expect("{")
    states = None
    while True:
        tok = cur.next("'}'")
        ln = cur.tokens[cur.pos - 1][1]
        if tok == "}":
            break
        if tok == "property":
            _skip_property(cur)
            continue
        if tok != "type":
            raise BifParseError(f"unexpected {tok!r} in variable block", ln)
        kind = cur.next("variable type")
        if kind != "discrete":
            raise BifParseError(f"unsupported variable type {kind!r}",
                                cur.tokens[cur.pos - 1][1])
        cur.expect("[")
        arity = int(_parse_number(cur, "variable arity"))
        cur.expect("]")
        cur.expect("{")
        states = tuple(_parse_name_list(cur, "}"))
        cur.expect(";")
        if len(states) != arity:
            raise BifParseError(
                f"variable {name!r} declares {arity} states but lists "
                f"{len(states)}", ln)
    if states is None:
        raise BifParseError(f"variable {name!r} has no type declaration",
                            name_line)
    variables[name] = states


def _parse_probability(cur, variables, blocks):
    cur.expect("(")
    head_line = cur.line()
    child = cur.next("variable name")
    if child not in variables:
        raise BifParseError(f"unknown variable {child!r}", head_line)
    if child in blocks:
        raise BifParseError(f"duplicate probability block for {child!r}",
                            head_line)
    parents = []
    tok = cur.next("')' or '|'")
    if tok == "|":
        parents = _parse_name_list(cur, ")")
        for p in parents:
            if p not in variables:
                raise BifParseError(f"unknown variable {p!r}", head_line)
    elif tok != ")":
        raise BifParseError(f"expected ')' or '|', got {tok!r}", head_line)
    child_k = len(variables[child])
    n_cfg = 1
    for p in parents:
        n_cfg *= len(variables[p])
    rows = {}
    cur.expect("{")
    while True:
        tok = cur.next("'}'")
        ln = cur.tokens[cur.pos - 1][1]
        if tok == "}":
            break
        if tok == "property":
            _skip_property(cur)
            continue
        if tok == "table":
            if parents:
                raise BifParseError(
                    "table row not allowed with parents; use per-state rows",
                    ln)
            values = _parse_row_values(cur, "table row")
            _store_row(rows, 0, values, child, child_k, ln)
        elif tok == "(":
            config = _parse_name_list(cur, ")")
            if len(config) != len(parents):
                raise BifParseError(
                    f"row names {len(config)} parent states, expected "
                    f"{len(parents)}", ln)
            code = 0
            for p, s in zip(parents, config):
                p_states = variables[p]
                if s not in p_states:
                    raise BifParseError(
                        f"unknown state {s!r} for parent {p!r}", ln)
                code = code * len(p_states) + p_states.index(s)
            values = _parse_row_values(cur, "probability row")
            _store_row(rows, code, values, child, child_k, ln)
        else:
            raise BifParseError(f"unexpected {tok!r} in probability block", ln)
    if len(rows) != n_cfg:
        raise BifParseError(
            f"probability block for {child!r} defines {len(rows)} of "
            f"{n_cfg} parent configurations", head_line)
    cpt = np.zeros((n_cfg, child_k))
    for code, values in rows.items():
        cpt[code] = values
    blocks[child] = (tuple(parents), cpt, head_line)


def _parse_row_values(cur, context):
    values = [_parse_number(cur, context)]
    while True:
        tok = cur.next("',' or ';'")
        if tok == ";":
            return values
        if tok != ",":
            raise BifParseError(f"expected ',' or ';', got {tok!r}",
                                cur.tokens[cur.pos - 1][1])
        values.append(_parse_number(cur, context))


def _store_row(rows, code, values, child, child_k, ln):
    if code in rows:
        raise BifParseError(
            f"duplicate row for the same parent configuration of {child!r}",
            ln)
    if len(values) != child_k:
        raise BifParseError(
            f"row for {child!r} has {len(values)} entries, expected "
            f"{child_k}", ln)
    row = np.array(values, dtype=float)
    if row.min() < 0:
        raise BifParseError(f"negative probability in row for {child!r}", ln)
    total = row.sum()
    if abs(total - 1.0) > ROW_SUM_TOL:
        raise BifParseError(
            f"row for {child!r} sums to {total:.6g}, outside 1 +/- "
            f"{ROW_SUM_TOL}", ln)
    if total != 1.0:
        if abs(total - 1.0) > 1e-9:
            warnings.warn(
                f"line {ln}: row for {child!r} sums to {total:.6g}; "
                "renormalizing")
        row = row / total
    rows[code] = row


def parse_bif(text):
    """Parse BIF text into a validated BayesNet."""
    cur = _Cursor(_tokenize(text))
    variables = {}   # name -> state tuple, declaration order preserved
    var_lines = {}
    blocks = {}      # child -> (parents, cpt, line)
    while not cur.done():
        tok = cur.next("block keyword")
        ln = cur.tokens[cur.pos - 1][1]
        if tok == "network":
            cur.next("network name")
            _skip_block(cur)
        elif tok == "variable":
            _parse_variable(cur, variables, var_lines)
        elif tok == "probability":
            _parse_probability(cur, variables, blocks)
        else:
            raise BifParseError(
                f"expected 'network', 'variable' or 'probability', got "
                f"{tok!r}", ln)
    names = tuple(variables)
    index = {name: k for k, name in enumerate(names)}
    for name in names:
        if name not in blocks:
            raise BifParseError(
                f"variable {name!r} has no probability block",
                var_lines[name])
    parents = tuple(
        tuple(index[p] for p in blocks[name][0]) for name in names
    )
    edges = {(p, i) for i in range(len(names)) for p in parents[i]}
    try:
        Dag(names, frozenset(edges))
    except InvalidParameterError:
        loser = _cycle_witness(names, edges)
        raise BifParseError(
            f"cyclic parent structure involving {loser!r}",
            blocks[loser][2]) from None
    return BayesNet(
        names=names,
        states=tuple(variables[n] for n in names),
        parents=parents,
        cpts=tuple(blocks[n][1] for n in names),
    )


def _cycle_witness(names, edges):
    """Smallest-named variable left over by Kahn's algorithm."""
    n = len(names)
    indeg = [0] * n
    children = {v: [] for v in range(n)}
    for a, b in edges:
        indeg[b] += 1
        children[a].append(b)
    queue = [v for v in range(n) if indeg[v] == 0]
    while queue:
        v = queue.pop()
        for w in children[v]:
            indeg[w] -= 1
            if indeg[w] == 0:
                queue.append(w)
    stuck = [names[v] for v in range(n) if indeg[v] > 0]
    return min(stuck)


def read_bif(path):
    with open(path, "r", encoding="utf-8") as fh:
        return parse_bif(fh.read())


def bn_truth(net):
    """The parent-list DAG of the network."""
    edges = frozenset(
        (p, i) for i in range(net.n_vars) for p in net.parents[i]
    )
    return Dag(net.names, edges)


def bn_sample(net, n_samples, rng):
    """Ancestral sampling; columns follow the declaration order."""
    if n_samples < 1:
        raise InvalidParameterError("n_samples must be >= 1")
    n_samples = int(n_samples)
    cards = net.cards()
    cols = np.zeros((n_samples, net.n_vars), dtype=np.int64)
    for v in topological_order(bn_truth(net)):
        cpt = np.asarray(net.cpts[v])
        code = np.zeros(n_samples, dtype=np.int64)
        for p in net.parents[v]:
            code = code * int(cards[p]) + cols[:, p]
        u = rng.random(n_samples)
        cum = np.cumsum(cpt[code], axis=1)
        idx = (u[:, None] >= cum).sum(axis=1)
        cols[:, v] = np.minimum(idx, int(cards[v]) - 1)
    return Dataset(net.names, cards, cols)
