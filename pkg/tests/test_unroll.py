"""Candidate enumeration, latent projection, and window instantiation."""

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

import fixtures
from scgfd.graph import Scg, ScgError, parse_scg
from scgfd.unroll import (
    CandidateSpec,
    EdgeTemplate,
    WindowTooShortError,
    count_candidates,
    enumerate_candidates,
    instantiate_window,
    iter_candidates,
    latent_project,
    template_options,
)


class TestTemplates:
    def test_instantaneous_self_edge_rejected(self):
        with pytest.raises(ScgError):
            EdgeTemplate("directed", "X", "X", 0)
        with pytest.raises(ScgError):
            EdgeTemplate("bidirected", "X", "X", 0)

    def test_lag_zero_bidirected_canonical(self):
        with pytest.raises(ScgError):
            EdgeTemplate("bidirected", "Y", "X", 0)

    def test_options_for_pair_edge(self):
        g = parse_scg("series X Y\nX -> Y\nX <-> Y\n")
        opts = template_options(g, 1)
        assert len(opts[("directed", "X", "Y")]) == 2  # lags 0 and 1
        assert len(opts[("bidirected", "X", "Y")]) == 3  # lag 0 plus both lag-1 roles

    def test_options_for_self_edges(self):
        g = parse_scg("series X\nX -> X\nX <-> X\n")
        opts = template_options(g, 2)
        assert [t.lag for t in opts[("directed", "X", "X")]] == [1, 2]
        assert [t.lag for t in opts[("bidirected", "X", "X")]] == [1, 2]


class TestEnumeration:
    def test_single_edge_three_candidates(self):
        g = parse_scg("series X Y\nX -> Y\n")
        enum = enumerate_candidates(g, 1)
        assert enum.count == 3 and not enum.truncated
        assert count_candidates(g, 1) == 3

    def test_edge_plus_confounder(self):
        g = parse_scg("series X Y\nX -> Y\nX <-> Y\n")
        enum = enumerate_candidates(g, 1)
        assert enum.count == 21
        assert count_candidates(g, 1) == 21

    def test_edgeless_graph(self):
        g = parse_scg("series A B\n")
        enum = enumerate_candidates(g, 1)
        assert enum.count == 1
        assert enum.candidates[0].templates == frozenset()
        assert count_candidates(g, 1) == 1

    def test_running_example_count(self):
        enum = enumerate_candidates(fixtures.scg1(), 1)
        assert enum.count == count_candidates(fixtures.scg1(), 1) == 63

    def test_reciprocal_pair_prunes_instantaneous_cycles(self):
        enum = enumerate_candidates(fixtures.UNSATISFIABLE["a"], 1)
        assert enum.count == count_candidates(fixtures.UNSATISFIABLE["a"], 1) == 105
        for spec in enum.candidates:
            lag0 = {(t.src, t.dst) for t in spec.templates
                    if t.kind == "directed" and t.lag == 0}
            assert not (("X", "W") in lag0 and ("W", "X") in lag0)

    def test_truncation_flag(self):
        enum = enumerate_candidates(fixtures.scg1(), 1, cap=10)
        assert enum.truncated and enum.count == 10

    def test_deterministic_order(self):
        a = enumerate_candidates(fixtures.scg1(), 1).candidates
        b = enumerate_candidates(fixtures.scg1(), 1).candidates
        assert a == b

    def test_count_law_on_all_fixture_graphs(self):
        graphs = [fixtures.scg1(), fixtures.scg2(), fixtures.scg3()]
        graphs += list(fixtures.SATISFYING.values())
        graphs += list(fixtures.LAG_ZERO_ONLY.values())
        graphs += list(fixtures.UNSATISFIABLE.values())
        for g in graphs:
            enum = enumerate_candidates(g, 1, cap=200000)
            assert not enum.truncated
            assert enum.count == count_candidates(g, 1)


class TestProjection:
    def test_drawn_candidates_project_back(self):
        for name in ("scg1_candidate_a", "scg1_candidate_b", "scg2_candidate_a", "scg2_candidate_b", "scg3_candidate_a", "scg3_candidate_b"):
            spec = getattr(fixtures, name)()
            assert latent_project(spec) == spec.scg

    def test_empty_templates_project_to_edgeless(self):
        g = parse_scg("series A B\n")
        spec = CandidateSpec(g, 1, frozenset())
        proj = latent_project(spec)
        assert proj.series == ("A", "B") and not proj.directed and not proj.bidirected

    def test_round_trip_over_stream(self):
        for spec in iter_candidates(fixtures.scg2(), 1):
            assert latent_project(spec) == fixtures.scg2()

    def test_mismatched_templates_rejected(self):
        g = fixtures.scg1()
        with pytest.raises(ScgError):
            CandidateSpec(g, 1, frozenset({EdgeTemplate("directed", "X", "W", 0)}))

    def test_instantaneous_cycle_rejected_at_spec(self):
        g = parse_scg("series X Y\nX -> Y\nY -> X\n")
        bad = frozenset(
            {EdgeTemplate("directed", "X", "Y", 0), EdgeTemplate("directed", "Y", "X", 0)}
        )
        with pytest.raises(ScgError):
            CandidateSpec(g, 1, bad)

    def test_lag_above_maximum_rejected(self):
        g = parse_scg("series X Y\nX -> Y\n")
        with pytest.raises(ScgError):
            CandidateSpec(g, 1, frozenset({EdgeTemplate("directed", "X", "Y", 2)}))


@st.composite
def small_specs(draw):
    n = draw(st.integers(min_value=2, max_value=3))
    series = tuple(f"V{i}" for i in range(n))
    pairs = [(a, b) for a in series for b in series]
    directed = draw(st.sets(st.sampled_from(pairs), min_size=1, max_size=3))
    g = Scg(series, frozenset(directed), frozenset())
    enum = enumerate_candidates(g, 1, cap=64)
    idx = draw(st.integers(min_value=0, max_value=len(enum.candidates) - 1))
    return enum.candidates[idx]


class TestWindows:
    def test_dense_candidate_window_edges(self):
        ft = instantiate_window(fixtures.scg1_candidate_a(), 3)
        assert set(ft.parents[("W", 2)]) == {("X", 2), ("X", 1), ("W", 1)}
        assert set(ft.parents[("Y", 2)]) == {("W", 2), ("W", 1), ("Y", 1)}
        assert set(ft.parents[("X", 2)]) == set()
        assert (("X", 2), ("Y", 2)) in ft.bi_edges  # instantaneous confounding
        assert (("X", 0), ("X", 1)) in ft.bi_edges  # cause-series confounding
        assert (("X", 1), ("Y", 2)) in ft.bi_edges  # cause one slice earlier
        assert (("X", 2), ("Y", 1)) in ft.bi_edges  # effect one slice earlier

    def test_minimum_window_boundary(self):
        spec = fixtures.scg1_candidate_a()
        ft = instantiate_window(spec, 2)
        assert ft.window_length == 2
        with pytest.raises(WindowTooShortError):
            instantiate_window(spec, 1)

    def test_unknown_vertex_checked(self):
        ft = instantiate_window(fixtures.scg1_candidate_a(), 3)
        with pytest.raises(ScgError):
            ft.check_vertex(("X", 3))

    @given(small_specs(), st.integers(min_value=2, max_value=5))
    @settings(max_examples=40, deadline=None)
    def test_every_window_is_acyclic_and_time_respecting(self, spec, L):
        ft = instantiate_window(spec, L)  # construction verifies acyclicity
        for v, parents in ft.parents.items():
            for p in parents:
                assert p[1] <= v[1]
