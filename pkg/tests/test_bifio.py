"""BIF parsing, validation diagnostics, and network sampling."""

import importlib.resources

import numpy as np
import pytest

from entcause import (
    BayesNet,
    BifParseError,
    Dag,
    InvalidParameterError,
    bn_sample,
    bn_truth,
    empirical_conditionals,
    make_rng,
    parse_bif,
    read_bif,
    stable_seed,
)

MINIMAL = """
network tiny { }
variable A {
  type discrete [ 2 ] { s0, s1 };
}
variable B {
  type discrete [ 2 ] { s0, s1 };
}
probability ( A ) {
  table 0.3, 0.7;
}
probability ( B | A ) {
  (s0) 0.9, 0.1;
  (s1) 0.2, 0.8;
}
"""


def _fixture_path(name):
    return importlib.resources.files("entcause").joinpath("data", name)


class TestParseMinimal:
    def test_structure(self):
        net = parse_bif(MINIMAL)
        assert net.names == ("A", "B")
        assert net.states == (("s0", "s1"), ("s0", "s1"))
        assert net.parents == ((), (0,))
        assert sum(np.asarray(c).shape[0] for c in net.cpts) == 3
        assert np.allclose(net.cpts[0], [[0.3, 0.7]])
        assert np.allclose(net.cpts[1], [[0.9, 0.1], [0.2, 0.8]])

    def test_truth_dag_matches_parent_lists(self):
        net = parse_bif(MINIMAL)
        assert bn_truth(net) == Dag(("A", "B"), frozenset({(0, 1)}))

    def test_comments_property_and_whitespace_tolerated(self):
        text = MINIMAL.replace("table 0.3, 0.7;",
                               "property weight 3;\ntable 0.3,0.7 ; // note")
        text = "% leading comment\n" + text.replace("(s0) 0.9",
                                                    "(s0)\n0.9")
        net = parse_bif(text)
        assert np.allclose(net.cpts[1], [[0.9, 0.1], [0.2, 0.8]])

    def test_multi_parent_row_order(self):
        net = read_bif(_fixture_path("cancer.bif"))
        cancer = net.names.index("Cancer")
        assert net.parents[cancer] == (net.names.index("Pollution"),
                                       net.names.index("Smoker"))
        # rows follow the mixed-radix order (low,true), (low,false), ...
        assert np.allclose(np.asarray(net.cpts[cancer])[:, 0],
                           [0.03, 0.001, 0.05, 0.02])


class TestBundledFixtures:
    @pytest.mark.parametrize("name,n_vars,n_edges", [
        ("cancer.bif", 5, 4),
        ("earthquake.bif", 5, 4),
    ])
    def test_parse_and_extract(self, name, n_vars, n_edges):
        net = read_bif(_fixture_path(name))
        assert net.n_vars == n_vars
        truth = bn_truth(net)
        assert len(truth.edges) == n_edges
        assert all(len(s) >= 2 for s in net.states)


MALFORMED = [
    # (snippet, expected line number, reason)
    (MINIMAL.replace("probability ( B | A ) {",
                     "probability ( B | A ) "), None, "missing brace"),
    (MINIMAL.replace("[ 2 ] { s0, s1 };\n}\nvariable B",
                     "[ 3 ] { s0, s1 };\n}\nvariable B"), 4, "arity mismatch"),
    ("""variable A { type discrete [ 2 ] { s0, s1 }; }
variable B { type discrete [ 2 ] { s0, s1 }; }
probability ( A | B ) { (s0) 0.5, 0.5; (s1) 0.5, 0.5; }
probability ( B | A ) { (s0) 0.5, 0.5; (s1) 0.5, 0.5; }
""", 3, "cycle"),
    (MINIMAL + "\nvariable A {\n  type discrete [ 2 ] { x, y };\n}\n",
     17, "duplicate variable"),
    (MINIMAL.replace("probability ( A )", "probability ( C )"), 9,
     "unknown child"),
    (MINIMAL.replace("( B | A )", "( B | Q )"), 12, "unknown parent"),
    (MINIMAL.replace("(s0) 0.9", "(s7) 0.9"), 13, "unknown parent state"),
    (MINIMAL.replace("table 0.3, 0.7;", "table 0.3, 0.3, 0.4;"), 10,
     "row length mismatch"),
    (MINIMAL.replace("table 0.3, 0.7;", "table 0.5, 0.7;"), 10,
     "row sum out of tolerance"),
    (MINIMAL.replace("type discrete [ 2 ] { s0, s1 };",
                     "type continuous;", 1), 4, "unsupported type"),
    (MINIMAL.replace("  (s1) 0.2, 0.8;\n", ""), 12, "missing config row"),
    (MINIMAL.replace("""probability ( A ) {
  table 0.3, 0.7;
}
""", ""), 3, "missing probability block"),
    (MINIMAL.replace("(s1) 0.2, 0.8;", "(s0) 0.2, 0.8;"), 14,
     "duplicate config row"),
    (MINIMAL.replace("table 0.3, 0.7;", "table 0.3, buckets;"), 10,
     "non-numeric probability"),
    (MINIMAL.replace("(s0) 0.9, 0.1;", "table 0.9, 0.1;"), 13,
     "table row with parents"),
]


class TestMalformedInputs:
    @pytest.mark.parametrize(
        "text,line,reason", MALFORMED,
        ids=[reason for _, _, reason in MALFORMED])
    def test_rejected_with_line_number(self, text, line, reason):
        with pytest.raises(BifParseError) as err:
            parse_bif(text)
        if line is not None:
            assert err.value.line == line, reason
        assert "line" in str(err.value)

    def test_row_sum_error_names_the_variable(self):
        bad = MINIMAL.replace("(s0) 0.9, 0.1;", "(s0) 1.1, 0.1;")
        with pytest.raises(BifParseError, match="'B'"):
            parse_bif(bad)

    def test_mild_rounding_renormalized_with_warning(self):
        mild = MINIMAL.replace("table 0.3, 0.7;", "table 0.30004, 0.7;")
        with pytest.warns(UserWarning, match="renormalizing"):
            net = parse_bif(mild)
        assert np.asarray(net.cpts[0]).sum() == pytest.approx(1.0, abs=1e-12)


class TestBayesNetValidation:
    def test_direct_construction_checks_rows(self):
        with pytest.raises(InvalidParameterError):
            BayesNet(
                names=("A",), states=(("s0", "s1"),), parents=((),),
                cpts=(np.array([[0.6, 0.6]]),),
            )
        with pytest.raises(InvalidParameterError):
            BayesNet(
                names=("A",), states=(("s0", "s1"),), parents=((),),
                cpts=(np.array([[0.5, 0.5], [0.5, 0.5]]),),
            )


class TestBnSample:
    def test_point_mass_cpts_repeat_one_row(self):
        net = BayesNet(
            names=("A", "B"),
            states=(("s0", "s1"), ("s0", "s1")),
            parents=((), (0,)),
            cpts=(np.array([[0.0, 1.0]]),
                  np.array([[1.0, 0.0], [0.0, 1.0]])),
        )
        data = bn_sample(net, 25, make_rng(0))
        assert np.array_equal(data.rows, np.tile([1, 1], (25, 1)))

    def test_root_frequency_concentrates(self):
        net = parse_bif(MINIMAL)
        data = bn_sample(net, 10**5, make_rng(stable_seed("bif-freq")))
        freq = float((data.column(0) == 0).mean())
        assert 0.29 <= freq <= 0.31

    def test_marginals_match_exhaustive_joint(self):
        net = read_bif(_fixture_path("earthquake.bif"))
        cards = net.cards()
        joint = np.zeros(tuple(int(c) for c in cards))
        for flat in range(int(np.prod(cards))):
            cfg = np.unravel_index(flat, joint.shape)
            p = 1.0
            for v in range(net.n_vars):
                code = 0
                for par in net.parents[v]:
                    code = code * int(cards[par]) + cfg[par]
                p *= float(net.cpts[v][code][cfg[v]])
            joint[cfg] = p
        assert joint.sum() == pytest.approx(1.0, abs=1e-9)
        data = bn_sample(net, 10**5, make_rng(stable_seed("bif-tv")))
        for v in range(net.n_vars):
            axes = tuple(a for a in range(net.n_vars) if a != v)
            exact = joint.sum(axis=axes)
            emp = np.bincount(data.column(v), minlength=int(cards[v])) / data.n_rows
            assert 0.5 * np.abs(exact - emp).sum() <= 0.01

    def test_sample_then_estimate_recovers_cpt_rows(self):
        net = read_bif(_fixture_path("cancer.bif"))
        data = bn_sample(net, 10**5, make_rng(stable_seed("bif-cpt")))
        cancer = net.names.index("Cancer")
        pars = net.parents[cancer]
        entries = empirical_conditionals(data, cancer, set(pars))
        cpt = np.asarray(net.cpts[cancer])
        for cfg, _w, p in entries:
            code = 0
            for par, s in zip(pars, cfg):
                code = code * len(net.states[par]) + s
            assert 0.5 * np.abs(p.probs - cpt[code]).sum() <= 0.02

    def test_seeded_determinism(self):
        net = parse_bif(MINIMAL)
        a = bn_sample(net, 200, make_rng(9))
        b = bn_sample(net, 200, make_rng(9))
        assert np.array_equal(a.rows, b.rows)

    def test_sample_count_validated(self):
        with pytest.raises(InvalidParameterError):
            bn_sample(parse_bif(MINIMAL), 0, make_rng(0))
