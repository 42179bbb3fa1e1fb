"""Graph structures, d-separation, SHD, orientations, and path coloring."""

import itertools

import pytest

from entcause import (
    Dag,
    InvalidParameterError,
    Skeleton,
    TooManyOrientationsError,
    complete_graph,
    d_separated,
    dag_from_json,
    dag_to_json,
    diamond_graph,
    enumerate_orientations,
    g1_graph,
    g2_graph,
    g3_graph,
    hall_graph,
    line_graph,
    make_rng,
    named_graph,
    orientation_bits,
    random_dag,
    rf_graph_decomposition,
    sample_orientations,
    shd,
    skeleton_from_json,
    skeleton_to_json,
    stable_seed,
    topological_order,
    triangle_graph,
)


def _dag(n, edges):
    return Dag(tuple(f"X{i + 1}" for i in range(n)), frozenset(edges))


class TestDagBasics:
    def test_rejects_self_loop(self):
        with pytest.raises(InvalidParameterError):
            _dag(2, {(0, 0)})

    def test_rejects_cycle(self):
        with pytest.raises(InvalidParameterError):
            _dag(3, {(0, 1), (1, 2), (2, 0)})

    def test_rejects_out_of_range(self):
        with pytest.raises(InvalidParameterError):
            _dag(2, {(0, 2)})

    def test_parents_children_sources(self):
        g = diamond_graph()
        assert g.parents(3) == (1, 2)
        assert g.children(0) == (1, 2)
        assert g.sources() == (0,)
        assert g.descendants(0) == {1, 2, 3}
        assert g.ancestors(3) == {0, 1, 2}

    def test_skeleton_drops_direction(self):
        assert _dag(2, {(1, 0)}).skeleton().edges == frozenset({(0, 1)})


class TestTopologicalOrder:
    def test_chain(self):
        assert topological_order(_dag(3, {(0, 1), (1, 2)})) == [0, 1, 2]

    def test_empty_graph_tie_break(self):
        assert topological_order(_dag(3, set())) == [0, 1, 2]

    def test_diamond_tie_break(self):
        assert topological_order(diamond_graph()) == [0, 1, 2, 3]

    def test_parents_precede_children_on_random_dags(self):
        rng = make_rng(stable_seed("topo-random"))
        for _ in range(50):
            g = random_dag(7, 0.5, rng)
            pos = {v: i for i, v in enumerate(topological_order(g))}
            assert all(pos[a] < pos[b] for a, b in g.edges)


def _all_dags(n):
    names = tuple(f"X{i + 1}" for i in range(n))
    pairs = list(itertools.combinations(range(n), 2))
    for states in itertools.product((0, 1, 2), repeat=len(pairs)):
        edges = set()
        for (a, b), s in zip(pairs, states):
            if s == 1:
                edges.add((a, b))
            elif s == 2:
                edges.add((b, a))
        try:
            yield Dag(names, frozenset(edges))
        except InvalidParameterError:
            continue


def _dsep_by_paths(g, i, j, cond):
    """Independent oracle: enumerate undirected simple paths, test blocking."""
    adj = [set(g.parents(v)) | set(g.children(v)) for v in range(g.n)]
    cond = set(cond)

    def active(path):
        for t in range(1, len(path) - 1):
            v = path[t]
            collider = (path[t - 1], v) in g.edges and (path[t + 1], v) in g.edges
            if collider:
                if not (({v} | g.descendants(v)) & cond):
                    return False
            elif v in cond:
                return False
        return True

    found = []

    def walk(node, seen, path):
        if node == j:
            found.append(active(path))
            return
        for w in sorted(adj[node]):
            if w not in seen:
                seen.add(w)
                path.append(w)
                walk(w, seen, path)
                path.pop()
                seen.discard(w)

    walk(i, {i}, [i])
    return not any(found)


def _cross_check(g):
    nodes = range(g.n)
    for i, j in itertools.combinations(nodes, 2):
        rest = [v for v in nodes if v not in (i, j)]
        for r in range(len(rest) + 1):
            for cond in itertools.combinations(rest, r):
                want = _dsep_by_paths(g, i, j, cond)
                assert d_separated(g, i, j, cond) == want, (g.edges, i, j, cond)


class TestDSeparation:
    def test_chain_blocked_by_middle(self):
        chain = _dag(3, {(0, 1), (1, 2)})
        assert d_separated(chain, 0, 2, {1}) is True

    def test_chain_active_unconditioned(self):
        chain = _dag(3, {(0, 1), (1, 2)})
        assert d_separated(chain, 0, 2, ()) is False

    def test_collider_rules(self):
        collider = _dag(3, {(0, 2), (1, 2)})
        assert d_separated(collider, 0, 1, ()) is True
        assert d_separated(collider, 0, 1, {2}) is False

    def test_collider_opened_by_descendant(self):
        g = _dag(4, {(0, 2), (1, 2), (2, 3)})
        assert d_separated(g, 0, 1, {3}) is False

    def test_invalid_queries(self):
        g = _dag(3, {(0, 1)})
        with pytest.raises(InvalidParameterError):
            d_separated(g, 0, 0, ())
        with pytest.raises(InvalidParameterError):
            d_separated(g, 0, 1, {0})

    def test_agrees_with_path_oracle_up_to_four_nodes(self):
        for n in (2, 3, 4):
            for g in _all_dags(n):
                _cross_check(g)

    def test_agrees_with_path_oracle_random_five_node(self):
        rng = make_rng(stable_seed("dsep-5"))
        for _ in range(300):
            _cross_check(random_dag(5, float(rng.uniform(0.2, 0.8)), rng))

    @pytest.mark.slow
    def test_agrees_with_path_oracle_all_five_node(self):
        for g in _all_dags(5):
            _cross_check(g)


class TestShd:
    def test_identical_graphs(self):
        g = triangle_graph()
        assert shd(g, g) == 0

    def test_single_flip(self):
        a = _dag(3, {(0, 1), (1, 2)})
        b = _dag(3, {(0, 1), (2, 1)})
        assert shd(a, b) == 1

    def test_single_deletion(self):
        a = _dag(3, {(0, 1), (1, 2)})
        b = _dag(3, {(0, 1)})
        assert shd(a, b) == 1

    def test_symmetric(self):
        rng = make_rng(stable_seed("shd-sym"))
        for _ in range(50):
            a = random_dag(5, 0.5, rng)
            b = random_dag(5, 0.5, rng)
            assert shd(a, b) == shd(b, a)

    def test_node_set_mismatch(self):
        with pytest.raises(InvalidParameterError):
            shd(_dag(2, set()), Dag(("A", "B"), frozenset()))


class TestEnumerateOrientations:
    def test_triangle_has_six(self):
        dags = enumerate_orientations(triangle_graph().skeleton())
        assert len(dags) == 6
        assert len({frozenset(d.edges) for d in dags}) == 6

    def test_path_has_four(self):
        s = Skeleton(("X", "Y", "Z"), frozenset({(0, 1), (1, 2)}))
        assert len(enumerate_orientations(s)) == 4

    def test_empty_skeleton_single_dag(self):
        s = Skeleton(("X", "Y"), frozenset())
        dags = enumerate_orientations(s)
        assert len(dags) == 1 and not dags[0].edges

    def test_cap_exceeded(self):
        with pytest.raises(TooManyOrientationsError, match="sample_orientations"):
            enumerate_orientations(triangle_graph().skeleton(), cap=5)

    def test_outputs_preserve_skeleton(self):
        rng = make_rng(stable_seed("enum-skel"))
        for _ in range(20):
            s = random_dag(5, 0.5, rng).skeleton()
            for d in enumerate_orientations(s):
                assert d.skeleton().edges == s.edges


class TestSampleOrientations:
    def test_path_eventually_covers_all_four(self):
        s = Skeleton(("X", "Y", "Z"), frozenset({(0, 1), (1, 2)}))
        dags = sample_orientations(s, 4, make_rng(stable_seed("sample-path")))
        assert len({frozenset(d.edges) for d in dags}) == 4

    def test_single_draw_is_valid(self):
        s = hall_graph().skeleton()
        (d,) = sample_orientations(s, 1, make_rng(0))
        assert d.skeleton().edges == s.edges

    def test_underfilled_triangle_warns(self):
        s = triangle_graph().skeleton()
        with pytest.warns(UserWarning, match="unique orientations"):
            dags = sample_orientations(s, 10, make_rng(1))
        assert len(dags) == 6

    def test_count_validation(self):
        with pytest.raises(InvalidParameterError):
            sample_orientations(triangle_graph().skeleton(), 0, make_rng(0))


class TestOrientationBits:
    def test_forward_and_reverse(self):
        s = Skeleton(("A", "B", "C"), frozenset({(0, 1), (1, 2)}))
        fwd = Dag(("A", "B", "C"), frozenset({(0, 1), (1, 2)}))
        rev = Dag(("A", "B", "C"), frozenset({(1, 0), (2, 1)}))
        assert orientation_bits(fwd, s) == "00"
        assert orientation_bits(rev, s) == "11"

    def test_non_orientation_rejected(self):
        s = Skeleton(("A", "B"), frozenset({(0, 1)}))
        with pytest.raises(InvalidParameterError):
            orientation_bits(Dag(("A", "B"), frozenset()), s)


def _partition(coloring):
    groups = {}
    for v, c in coloring.color.items():
        groups.setdefault(c, set()).add(v)
    return frozenset(frozenset(s) for s in groups.values())


def _color_with_order(g, src, y, order):
    """Reference coloring that takes an explicit topological order."""
    on_path = {v for v in g.descendants(src) if v == y or y in g.descendants(v)}
    on_path.add(src)
    color = {src: 0}
    nxt = 1
    for v in order:
        if v not in on_path or v == src:
            continue
        pars = [p for p in g.parents(v) if p in on_path]
        pcols = {color[p] for p in pars}
        if src in pars or len(pcols) > 1:
            color[v] = nxt
            nxt += 1
        else:
            color[v] = pcols.pop()
    return color


def _all_topo_orders(g):
    out = []

    def rec(prefix, indeg):
        done = len(prefix) == g.n
        avail = [v for v in range(g.n) if indeg[v] == 0 and v not in prefix]
        if done:
            out.append(list(prefix))
            return
        for v in avail:
            nd = dict(indeg)
            for w in g.children(v):
                nd[w] -= 1
            rec(prefix + [v], nd)

    rec([], {v: len(g.parents(v)) for v in range(g.n)})
    return out


class TestPathColoring:
    def test_line_shares_one_color(self):
        c = rf_graph_decomposition(line_graph(4), 0, 3).color
        assert c[1] == c[2] == c[3]
        assert c[0] == 0 and c[1] != 0

    def test_diamond_three_distinct_colors(self):
        c = rf_graph_decomposition(diamond_graph(), 0, 3).color
        assert len({c[1], c[2], c[3]}) == 3

    def test_hall_fixture_coloring(self):
        # X2 and X5 inherit one color; X3, X4, Y each start a new one
        c = rf_graph_decomposition(hall_graph(), 0, 5).color
        assert c[1] == c[4]
        assert len({c[1], c[2], c[3], c[5]}) == 4

    def test_off_path_nodes_uncolored(self):
        g = _dag(4, {(0, 1), (1, 2), (0, 3)})
        c = rf_graph_decomposition(g, 0, 2).color
        assert 3 not in c

    def test_requires_source_and_path(self):
        with pytest.raises(InvalidParameterError):
            rf_graph_decomposition(line_graph(3), 1, 2)
        g = _dag(3, {(0, 1)})
        with pytest.raises(InvalidParameterError):
            rf_graph_decomposition(g, 0, 2)

    def test_partition_independent_of_topological_order(self):
        for g, y in ((diamond_graph(), 3), (hall_graph(), 5)):
            want = _partition(rf_graph_decomposition(g, 0, y))
            for order in _all_topo_orders(g):
                ref = _color_with_order(g, 0, y, order)
                groups = {}
                for v, c in ref.items():
                    groups.setdefault(c, set()).add(v)
                assert frozenset(frozenset(s) for s in groups.values()) == want


class TestFixtures:
    def test_g1_g2_g3_share_a_skeleton(self):
        s1 = g1_graph().skeleton().edges
        assert g2_graph().skeleton().edges == s1
        assert g3_graph().skeleton().edges == s1
        assert shd(g1_graph(), g2_graph()) > 0

    def test_named_graph_lookup(self):
        assert named_graph("triangle").edges == triangle_graph().edges
        assert named_graph("line-6").n == 6
        assert len(named_graph("complete-4").edges) == 6
        rng = make_rng(7)
        g = named_graph("random-5", rng)
        assert g.n == 5

    def test_named_graph_errors(self):
        with pytest.raises(InvalidParameterError):
            named_graph("mystery")
        with pytest.raises(InvalidParameterError):
            named_graph("random-4")
        with pytest.raises(InvalidParameterError):
            named_graph("line-0")


class TestGraphJson:
    def test_dag_round_trip(self):
        g = hall_graph()
        assert dag_from_json(dag_to_json(g)) == g

    def test_skeleton_round_trip(self):
        s = triangle_graph().skeleton()
        assert skeleton_from_json(skeleton_to_json(s)) == s

    def test_serialization_deterministic(self):
        g = diamond_graph()
        assert dag_to_json(g) == dag_to_json(Dag(g.names, frozenset(g.edges)))

    def test_bad_json_rejected(self):
        with pytest.raises(InvalidParameterError):
            dag_from_json("{not json")
        with pytest.raises(InvalidParameterError):
            dag_from_json('{"nodes": ["A"]}')
        with pytest.raises(InvalidParameterError):
            skeleton_from_json('{"nodes": ["A"], "edges": []}')
