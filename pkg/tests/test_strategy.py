import json
from fractions import Fraction

import pytest

from conftest import EX4_SPEC, REALIZABLE_BENCH, spec_text
from lbsynth.arena import build_graph
from lbsynth.parser import parse_spec
from lbsynth.qe import TheoryBackend
from lbsynth.semantics import evaluate
from lbsynth.strategy import (
    StrategyArtifact,
    StrategyError,
    init_play,
    load_artifact,
    respond,
    save_artifact,
    simulate,
    state_trace,
)
from lbsynth.winning import iterate_win


def synthesize(spec):
    problem = parse_spec(spec)
    graph = build_graph(problem)
    table = iterate_win(graph, TheoryBackend(problem.theory), 50)
    return StrategyArtifact.from_synthesis(problem, graph, table)


@pytest.fixture(scope="module")
def ex4_artifact():
    return synthesize(EX4_SPEC)


@pytest.fixture(scope="module")
def bench_artifacts():
    return {name: synthesize(text) for name, text in REALIZABLE_BENCH}


class TestInit:
    def test_fresh_state(self, ex4_artifact):
        st = init_play(ex4_artifact)
        assert st.k == 0 and st.current == ex4_artifact.graph.initial
        assert not st.done and st.history == ()

    def test_true_property_done_immediately(self, bench_artifacts):
        st = init_play(bench_artifacts["true"])
        assert st.done

    def test_states_independent(self, ex4_artifact):
        a, b = init_play(ex4_artifact), init_play(ex4_artifact)
        _, a2 = respond(ex4_artifact, a, {"x": Fraction(3)})
        assert b.k == 0 and a2.k == 1

    def test_unrealizable_rejected(self):
        problem = parse_spec(spec_text("lra", "(X (= (pre y) x))"))
        graph = build_graph(problem)
        table = iterate_win(graph, TheoryBackend("lra"), 20)
        with pytest.raises(StrategyError):
            StrategyArtifact.from_synthesis(problem, graph, table)


class TestRespond:
    def test_example_first_move_bound(self, ex4_artifact):
        gamma, st = respond(ex4_artifact, init_play(ex4_artifact), {"x": Fraction(3)})
        assert gamma["y"] > 5           # any response above x + 2 is sound
        assert st.k == 1 and not st.done

    def test_second_move_arbitrary_and_done(self, ex4_artifact):
        _, st = respond(ex4_artifact, init_play(ex4_artifact), {"x": Fraction(3)})
        gamma, st2 = respond(ex4_artifact, st, {"x": Fraction(4)})
        assert gamma["y"] == 0          # unconstrained values default to zero
        assert st2.done
        trace = state_trace(ex4_artifact, st2)
        assert evaluate(trace, ex4_artifact.effective)

    def test_equality_forced(self, bench_artifacts):
        art = bench_artifacts["eq"]
        gamma, st = respond(art, init_play(art), {"x": Fraction(7)})
        assert gamma == {"y": Fraction(7)} and st.done

    def test_deterministic(self, ex4_artifact):
        a, _ = respond(ex4_artifact, init_play(ex4_artifact), {"x": Fraction(3)})
        b, _ = respond(ex4_artifact, init_play(ex4_artifact), {"x": Fraction(3)})
        assert a == b

    def test_respond_after_done_rejected(self, bench_artifacts):
        art = bench_artifacts["eq"]
        _, st = respond(art, init_play(art), {"x": Fraction(0)})
        with pytest.raises(StrategyError):
            respond(art, st, {"x": Fraction(1)})

    def test_malformed_beta_rejected(self, ex4_artifact):
        with pytest.raises(StrategyError):
            respond(ex4_artifact, init_play(ex4_artifact), {})
        with pytest.raises(StrategyError):
            respond(ex4_artifact, init_play(ex4_artifact), {"x": Fraction(0), "z": Fraction(1)})
        art_int = synthesize(spec_text("lia", "(= x y)"))
        with pytest.raises(StrategyError):
            respond(art_int, init_play(art_int), {"x": Fraction(1, 2)})

    def test_runs_terminate_within_bound(self, bench_artifacts):
        import random
        for name, art in bench_artifacts.items():
            rng = random.Random(5)
            for _ in range(20):
                st = init_play(art)
                steps = 0
                while not st.done:
                    assert steps <= art.bound, name
                    beta = {n: Fraction(rng.randint(-6, 6)) for n, _ in art.env_vars}
                    _, st = respond(art, st, beta)
                    steps += 1


class TestSimulate:
    def test_example_hundred_episodes(self, ex4_artifact):
        report = simulate(ex4_artifact, episodes=100, seed=7)
        assert report.passed == 100 and report.all_passed

    def test_true_property_padded_step(self, bench_artifacts):
        report = simulate(bench_artifacts["true"], episodes=20, seed=1)
        assert report.all_passed

    def test_copy_property_boundary(self, bench_artifacts):
        report = simulate(bench_artifacts["g-copy"], episodes=100, seed=3,
                          adversary="boundary")
        assert report.all_passed

    def test_unknown_adversary(self, ex4_artifact):
        with pytest.raises(ValueError):
            simulate(ex4_artifact, episodes=1, adversary="clairvoyant")

    def test_deterministic_given_seed(self, ex4_artifact):
        a = simulate(ex4_artifact, episodes=10, seed=42)
        b = simulate(ex4_artifact, episodes=10, seed=42)
        assert a.passed == b.passed == 10


class TestPersistence:
    def test_roundtrip(self, ex4_artifact):
        blob = save_artifact(ex4_artifact)
        loaded = load_artifact(blob)
        assert loaded.graph.and_nodes == ex4_artifact.graph.and_nodes
        assert loaded.graph.or_nodes == ex4_artifact.graph.or_nodes
        assert loaded.graph.env_edges == ex4_artifact.graph.env_edges
        assert loaded.graph.ag_edges == ex4_artifact.graph.ag_edges
        assert loaded.win == ex4_artifact.win
        assert loaded.bound == ex4_artifact.bound
        assert loaded.effective == ex4_artifact.effective
        assert save_artifact(loaded) == blob

    def test_loaded_artifact_plays(self, ex4_artifact):
        loaded = load_artifact(save_artifact(ex4_artifact))
        report = simulate(loaded, episodes=25, seed=11, adversary="boundary")
        assert report.all_passed

    def test_truncated_rejected(self, ex4_artifact):
        blob = save_artifact(ex4_artifact)
        with pytest.raises(StrategyError):
            load_artifact(blob[: len(blob) // 2])

    def test_wrong_version_rejected(self, ex4_artifact):
        doc = json.loads(save_artifact(ex4_artifact))
        doc["version"] = 99
        with pytest.raises(StrategyError):
            load_artifact(json.dumps(doc))

    def test_missing_fields_rejected(self):
        with pytest.raises(StrategyError):
            load_artifact(json.dumps({"version": 1, "theory": "lra"}))

    def test_wrong_level_count_rejected(self, ex4_artifact):
        doc = json.loads(save_artifact(ex4_artifact))
        doc["and_nodes"][0]["win"] = doc["and_nodes"][0]["win"][:-1]
        with pytest.raises(StrategyError):
            load_artifact(json.dumps(doc))
