
from conftest import EX4_SPEC, IPC_BENCH_SPEC, MC_BENCH_SPEC, spec_text
from lbsynth.arena import build_graph
from lbsynth.fol import f_lit
from lbsynth.fragments import (
    check_bounded_lookback,
    classify,
    collapse_equalities,
    computation_graph,
    is_ipc_atom,
    is_mc_atom,
    max_acyclic_path,
    )
from lbsynth.parser import parse_spec
from lbsynth.terms import Atom, EQUIV_MOD, INT, LinExpr, REAL

X, Y, PX = LinExpr.var("x"), LinExpr.var("y"), LinExpr.var("x@pre")


def lit(op, lhs, rhs, sort=REAL):
    return f_lit(Atom.compare(op, lhs, rhs, sort))


class TestClassify:
    def test_mc_example(self):
        report = classify(parse_spec(MC_BENCH_SPEC))
        assert report.mc and not report.ipc and not report.lookback_free

    def test_ipc_examples(self):
        report = classify(parse_spec(IPC_BENCH_SPEC))
        assert report.ipc and not report.mc
        assert 3 in report.moduli
        not_ipc = classify(parse_spec(spec_text("lia", "(G (> x y))")))
        assert not not_ipc.ipc

    def test_example_1_neither(self):
        report = classify(parse_spec(EX4_SPEC))
        assert not report.mc and not report.lookback_free

    def test_lookback_free_bound_zero(self):
        report = classify(parse_spec(spec_text("lra", "(G (< y x))")))
        assert report.lookback_free
        assert report.bounded is not None and report.bounded.bound == 0

    def test_atom_shapes(self):
        assert is_mc_atom(Atom.compare("<", X, Y, REAL))
        assert is_mc_atom(Atom.compare(">=", X, LinExpr.constant(10), REAL))
        assert not is_mc_atom(Atom.compare("<", X.sub(PX), LinExpr.constant(2), REAL))
        assert is_ipc_atom(Atom.compare("=", X, Y, INT))
        assert is_ipc_atom(Atom.compare("<", X, LinExpr.constant(3), INT))
        assert is_ipc_atom(Atom.make(EQUIV_MOD, X.sub(Y).sub(LinExpr.constant(1)), 3, INT))
        assert not is_ipc_atom(Atom.compare("<", X, Y, INT))


class TestComputationGraph:
    def test_three_phase_example(self):
        rho = [lit("=", X, Y), lit(">", X, PX), lit(">", X, PX)]
        g = computation_graph(rho)
        assert sorted(g.edges) == [
            (((0, "x"), (0, "y"))),
            (((0, "x"), (1, "x"))),
            (((1, "x"), (2, "x"))),
        ]
        collapsed = collapse_equalities(g)
        assert max_acyclic_path(collapsed) == 3
        assert max_acyclic_path(g) == 4     # pre-collapse includes y0

    def test_lookback_free_step_no_cross_edges(self):
        g = computation_graph([lit("<", X, Y)])
        assert all(a[0] == b[0] for a, b in g.edges)

    def test_unbounded_chain(self):
        rho = [lit(">", X, PX)] * 5
        g = collapse_equalities(computation_graph(rho))
        assert max_acyclic_path(g) == 6

    def test_empty(self):
        assert max_acyclic_path(computation_graph([])) == 0

    def test_collapse_never_increases(self):
        import random
        rng = random.Random(3)
        for _ in range(40):
            rho = []
            for _ in range(rng.randint(1, 4)):
                op = rng.choice(["=", "<", ">"])
                lhs = rng.choice([X, Y, PX])
                rhs = rng.choice([X, Y, PX, LinExpr.constant(1)])
                made = Atom.compare(op, lhs, rhs, REAL)
                if isinstance(made, bool):
                    continue
                rho.append(f_lit(made))
            if not rho:
                continue
            g = computation_graph(rho)
            assert max_acyclic_path(collapse_equalities(g)) <= max_acyclic_path(g)


class TestBoundedLookback:
    def test_example_1_refuted(self):
        graph = build_graph(parse_spec(EX4_SPEC))
        result = check_bounded_lookback(graph, 4, 6)
        assert result.status == "exceeded"
        assert result.witness is not None
        # the chain runs through the increment-bound complement literal
        joined = " ".join(str(w) for w in result.witness)
        assert "pre(x)" in joined

    def test_lookback_free_chains_stay_within_instant(self):
        # without lookback the only edges join copies of one instant, so
        # any bound covering the per-instant variable count is proved
        graph = build_graph(parse_spec(spec_text("lra", "(G (< y x))")))
        for bound in (2, 3, 5):
            result = check_bounded_lookback(graph, bound, 6)
            assert result.status == "proved-up-to-unroll"
        report = classify(parse_spec(spec_text("lra", "(G (< y x))")))
        assert report.bounded.bound == 0    # classifier's lookback-free case

    def test_until_loop_chains_through_complement(self):
        # the until-loop guard carries the complemented lookback atom, so
        # the dependency chain grows with the unrolling depth
        spec = spec_text("lra", "(U (= x y) (and (> x (pre x)) (X (> x (pre x)))))")
        graph = build_graph(parse_spec(spec))
        result = check_bounded_lookback(graph, 3, 8)
        assert result.status == "exceeded"

    def test_budget_reports_covered_depth(self):
        graph = build_graph(parse_spec(EX4_SPEC))
        result = check_bounded_lookback(graph, 50, 10, budget=10)
        assert result.status == "proved-up-to-unroll"
        assert result.depth < 10
