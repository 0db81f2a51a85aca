import numpy as np
import pytest

from nsumkit.errors import DomainError, InfeasibleModelError
from nsumkit.graphs import (
    FACTORIAL_SBM_MATRIX,
    ER,
    ERGM,
    PA,
    SBM,
    Deviation,
    Graph,
    SmallWorld,
    factorial_model,
    factorial_models,
    assign_hidden,
    calibrated_edge_coefficient,
    degrees,
    deviation_spec,
    ergm_chain,
    generate,
    mixture_attach_count,
)
from nsumkit.stats import RngStream


def stream(*path):
    return RngStream(555, path)


def checked(graph):
    graph.audit_simple()
    d = graph.degrees_array()
    assert d.sum() == 2 * graph.num_edges  # handshake
    return graph


class TestGraphContainer:
    def test_rejects_self_loops(self):
        with pytest.raises(DomainError):
            Graph(3, np.array([0, 1]), np.array([0, 2]))

    def test_rejects_out_of_range(self):
        with pytest.raises(DomainError):
            Graph(3, np.array([0]), np.array([3]))

    def test_neighbors_sorted(self):
        g = Graph(4, np.array([2, 0, 1]), np.array([0, 3, 0]))
        assert g.neighbors(0).tolist() == [1, 2, 3]

    def test_edge_list_dump(self, tmp_path):
        g = Graph(4, np.array([2, 0]), np.array([0, 3]))
        path = tmp_path / "edges.txt"
        g.write_edge_list(path)
        assert path.read_text() == "0 2\n0 3\n"


class TestErdosRenyi:
    def test_mean_degree_band(self):
        means = [generate(ER(0.1), 1000, stream(0, k)).mean_degree for k in range(20)]
        assert np.mean(means) == pytest.approx(99.9, abs=1.0)

    def test_extremes(self):
        empty = generate(ER(0.0), 100, stream(1))
        assert empty.num_edges == 0
        full = generate(ER(1.0), 50, stream(2))
        assert full.num_edges == 50 * 49 // 2

    def test_simple_and_handshake(self):
        checked(generate(ER(0.1), 500, stream(3)))


class TestStochasticBlockModel:
    def test_default_matrix_density(self):
        spec = SBM((1 / 3, 1 / 3, 1 / 3), FACTORIAL_SBM_MATRIX)
        dens = [generate(spec, 999, stream(4, k)).density for k in range(20)]
        assert np.mean(dens) == pytest.approx(0.1022, abs=0.005)

    def test_simple(self):
        spec = SBM((0.5, 0.5), ((0.2, 0.01), (0.01, 0.2)))
        checked(generate(spec, 400, stream(5)))

    def test_validation(self):
        with pytest.raises(DomainError):
            SBM((0.6, 0.6), ((0.1, 0.1), (0.1, 0.1)))
        with pytest.raises(DomainError):
            SBM((0.5, 0.5), ((0.1, 0.2), (0.3, 0.1)))


class TestPreferentialAttachment:
    def test_density_near_target(self):
        spec = PA(power=1.4, m_per_step=50)
        dens = [generate(spec, 1000, stream(6, k)).density for k in range(10)]
        assert np.mean(dens) == pytest.approx(0.10, abs=0.02)

    def test_edge_count_is_deterministic(self):
        g = generate(PA(power=1.4, m_per_step=50), 1000, stream(7))
        assert g.num_edges == 50 * 49 // 2 + 950 * 50

    def test_heavier_tail_than_er(self):
        g_pa = generate(PA(power=1.4, m_per_step=50), 1000, stream(8))
        g_er = generate(ER(0.1), 1000, stream(9))
        assert g_pa.degrees_array().std() > 2 * g_er.degrees_array().std()

    def test_simple(self):
        checked(generate(PA(power=1.4, m_per_step=10), 300, stream(10)))


class TestSmallWorld:
    def test_pure_lattice(self):
        g = generate(SmallWorld(nei=5, p_rewire=0.0), 100, stream(11))
        assert g.num_edges == 500
        assert (g.degrees_array() == 10).all()

    def test_rewired_keeps_edge_count(self):
        g = checked(generate(SmallWorld(nei=50, p_rewire=0.1), 1000, stream(12)))
        assert g.num_edges == 50_000
        assert g.density == pytest.approx(0.1001, abs=1e-4)

    def test_lattice_too_dense(self):
        with pytest.raises(DomainError):
            generate(SmallWorld(nei=50, p_rewire=0.1), 99, stream(13))


class TestErgm:
    def test_feasibility_limit(self):
        with pytest.raises(InfeasibleModelError):
            generate(ERGM(theta_edge=-1.0, theta_triangle=-1.0, proposals=10),
                     1001, stream(14))

    def test_zero_triangle_weight_is_er(self):
        # logistic(logit(0.35)) = 0.35: same draw as the plain ER model
        spec = ERGM(theta_edge=np.log(0.35 / 0.65), theta_triangle=0.0)
        a = generate(spec, 300, stream(15))
        b = generate(ER(0.35), 300, stream(15))
        assert np.array_equal(a.edge_u, b.edge_u)
        assert np.array_equal(a.edge_v, b.edge_v)

    def test_simple_and_handshake(self):
        g = generate(ERGM(theta_edge=-2.0, theta_triangle=-0.2, proposals=200_000),
                     300, stream(16))
        checked(g)

    def test_calibration_is_deterministic(self):
        a = calibrated_edge_coefficient(-0.5, 300, 100_000)
        b = calibrated_edge_coefficient(-0.5, 300, 100_000)
        assert a == b

    def test_stationarity_doubling(self):
        # default factorial parameters: doubling the horizon moves the mean
        # sampled density by less than 0.01
        spec = factorial_model("ergm", 1000)
        doubled = ERGM(theta_edge=spec.theta_edge,
                       theta_triangle=spec.theta_triangle,
                       proposals=2 * ((3 * 1000 * 1000) // 2),
                       target_density=spec.target_density)
        base = np.mean([generate(spec, 1000, stream(17, k)).density
                        for k in range(4)])
        double = np.mean([generate(doubled, 1000, stream(18, k)).density
                          for k in range(4)])
        assert abs(base - double) < 0.01

    def test_chain_density_tracking(self):
        chain = ergm_chain(ERGM(theta_edge=0.0, theta_triangle=-0.1,
                                proposals=50_000), 200, stream(19))
        tracked = chain.advance(50_000, track=True)
        assert 0.0 < tracked < 1.0
        assert chain.density == pytest.approx(tracked, abs=0.05)


class TestHiddenLabels:
    def test_every_node_hidden(self):
        g = generate(ER(0.2), 50, stream(20))
        labeled = assign_hidden(g, 1.0, stream(21))
        assert labeled.hidden.all()

    def test_exact_count(self):
        g = generate(ER(0.1), 1000, stream(22))
        labeled = assign_hidden(g, 0.1, stream(23))
        assert labeled.hidden_count == 100

    def test_uniform_frequencies(self):
        g = generate(ER(0.05), 1000, stream(24))
        counts = np.zeros(1000)
        for k in range(500):
            counts += assign_hidden(g, 0.1, stream(25, k)).hidden
        freq = counts / 500
        # per-node sd is sqrt(0.1*0.9/500) ~ 0.0134; the extreme over 1000
        # nodes sits near 3.2 sd, so 0.05 (~3.7 sd) is the sound joint band
        assert freq.mean() == pytest.approx(0.1, abs=1e-12)
        assert freq.min() > 0.1 - 0.05
        assert freq.max() < 0.1 + 0.05

    def test_relabeling_replaces(self):
        g = generate(ER(0.1), 200, stream(26))
        first = assign_hidden(g, 0.5, stream(27))
        second = assign_hidden(first, 0.1, stream(28))
        assert second.hidden_count == 20

    def test_empty_hidden_rejected(self):
        g = generate(ER(0.1), 100, stream(29))
        with pytest.raises(DomainError):
            assign_hidden(g, 0.001, stream(30))


class TestDegrees:
    def test_empty_graph(self):
        g = Graph(5, np.empty(0, dtype=np.int64), np.empty(0, dtype=np.int64))
        s = degrees(g)
        assert s.degrees.tolist() == [0] * 5
        assert s.hidden_degrees.tolist() == [0] * 5

    def test_triangle_with_one_hidden(self):
        g = Graph(3, np.array([0, 0, 1]), np.array([1, 2, 2]),
                  hidden=np.array([True, False, False]))
        s = degrees(g)
        assert s.degrees.tolist() == [2, 2, 2]
        assert s.hidden_degrees.tolist() == [0, 1, 1]

    def test_er_hidden_share(self):
        g = assign_hidden(generate(ER(0.1), 1000, stream(31)), 0.1, stream(32))
        s = degrees(g)
        ratio = s.hidden_degrees.mean() / s.degrees.mean()
        assert ratio == pytest.approx(0.1, rel=0.10)

    def test_hidden_never_exceeds_degree(self):
        g = assign_hidden(generate(PA(1.4, 20), 400, stream(33)), 0.2, stream(34))
        s = degrees(g)
        assert (s.hidden_degrees <= s.degrees).all()


class TestDeviationFamilies:
    def test_zero_delta_collapses_to_er(self):
        for family in ("pa_mixture", "sbm_2block", "ergm_plus", "ergm_minus"):
            assert deviation_spec(family, 0.0, 1000) == ER(0.1)

    def test_sbm_two_block_matrix(self):
        spec = deviation_spec("sbm_2block", 0.5, 1000)
        assert spec.block_fractions == (0.5, 0.5)
        flat = [x for row in spec.block_matrix for x in row]
        assert flat == pytest.approx([0.15, 0.05, 0.05, 0.15])
        # the mean density is preserved exactly
        assert sum(flat) / 4 == pytest.approx(0.1)

    def test_pa_mixture_full_delta_is_pure_growth(self):
        spec = deviation_spec("pa_mixture", 1.0, 1000)
        assert spec == PA(power=1.4, m_per_step=50)

    def test_mixture_attachment_keeps_density(self):
        for delta in (0.25, 0.5, 0.75):
            g = generate(Deviation("pa_mixture", delta), 1000, stream(35, int(delta * 4)))
            checked(g)
            assert g.density == pytest.approx(0.1, abs=0.015)

    def test_attach_count_boundaries(self):
        assert mixture_attach_count(1000, 1.0, 0.1) == 50
        assert mixture_attach_count(1000, 0.0, 0.1) == 100

    def test_ergm_family_signs(self):
        plus = deviation_spec("ergm_plus", 0.4, 1000)
        minus = deviation_spec("ergm_minus", 0.4, 1000)
        assert plus.theta_triangle == pytest.approx(0.4)
        assert minus.theta_triangle == pytest.approx(-0.4)

    def test_delta_domain(self):
        with pytest.raises(DomainError):
            deviation_spec("sbm_2block", 1.2, 1000)
        with pytest.raises(DomainError):
            Deviation("unknown", 0.5)

    def test_positive_triangle_weight_hits_density_band(self):
        spec = deviation_spec("ergm_plus", 1.0, 1000)
        dens = [generate(spec, 1000, stream(36, k)).density for k in range(6)]
        assert np.mean(dens) == pytest.approx(0.1, abs=0.015)


class TestCommonDensity:
    @pytest.mark.parametrize("name", ["er", "ergm", "pa", "sbm", "smallworld"])
    def test_factorial_models_share_ten_percent_density(self, name):
        spec = factorial_model(name, 1000)
        dens = [generate(spec, 1000, stream(37, k)).density for k in range(20)]
        assert 0.08 <= np.mean(dens) <= 0.12

    def test_all_five_listed(self):
        assert [label for label, _ in factorial_models(1000)] == [
            "er", "ergm", "pa", "sbm", "smallworld"]
