import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from gdbfm import kernels
from gdbfm.channel import bsc, derive_stream, transmit
from gdbfm.codes import trapping_set_instance
from gdbfm.decoder import (ConfigError, DecodeOutcome, GdbfConfig,
                           MomentumState, decode, flip_candidates,
                           global_energy, hard_decision, local_energies,
                           run_python, step)
from gdbfm.graph import syndrome


class TestConfig:
    def test_variant_names(self):
        with pytest.raises(ConfigError):
            GdbfConfig(variant="SGD")

    def test_rho_shape(self):
        with pytest.raises(ConfigError):
            GdbfConfig(variant="GDBF_WM", rho=(1, 2))      # increasing
        with pytest.raises(ConfigError):
            GdbfConfig(variant="GDBF_WM", rho=(2, 0))      # not positive
        with pytest.raises(ConfigError):
            GdbfConfig(variant="GDBF", rho=(2,))           # no momentum slot
        assert GdbfConfig(variant="GDBF_WM", rho=(2, 2, 1)).L == 3

    def test_p_gating(self):
        with pytest.raises(ConfigError):
            GdbfConfig(variant="GDBF", p=0.5)
        with pytest.raises(ConfigError):
            GdbfConfig(variant="PGDBF", p=0.0)
        GdbfConfig(variant="PGDBF_WM", p=1.0, rho=(1,))    # p = 1 is legal

    def test_ngdbf_momentum_warns(self):
        with pytest.warns(UserWarning):
            GdbfConfig(variant="NGDBF", rho=(1,))

    def test_rho_lookup_boundaries(self):
        cfg = GdbfConfig(variant="GDBF_WM", rho=(3, 2, 1))
        lookup = cfg.rho_lookup()
        assert lookup.tolist() == [0, 3, 2, 1, 0]


def test_hard_decision_zero_is_plus():
    assert hard_decision([0.0, -0.2, 0.3]).tolist() == [1, -1, 1]


class TestEnergies:
    def test_global_energy_oracle(self, toy_graph):
        rng = np.random.default_rng(1)
        for _ in range(20):
            x = rng.choice([-1, 1], size=toy_graph.N)
            y = rng.standard_normal(toy_graph.N)
            expected = 2.0 * np.dot(x, y) + sum(
                np.prod(x[toy_graph.chk_neighbors(m)])
                for m in range(toy_graph.M))
            assert global_energy(toy_graph, x, y, 2.0) == pytest.approx(expected)

    def test_local_energy_oracle(self, toy_graph):
        rng = np.random.default_rng(2)
        x = rng.choice([-1, 1], size=toy_graph.N)
        y = rng.standard_normal(toy_graph.N)
        c = syndrome(toy_graph, x)
        E = local_energies(toy_graph, x, y, c, alpha=1.5)
        for n in range(toy_graph.N):
            expected = 1.5 * x[n] * y[n] + sum(
                c[m] for m in toy_graph.var_neighbors(n))
            assert E[n] == pytest.approx(expected)

    def test_flip_drop_identity(self, toy_graph):
        # flipping one bit changes the global energy by exactly -2 E_n
        rng = np.random.default_rng(3)
        x = rng.choice([-1, 1], size=toy_graph.N)
        y = rng.standard_normal(toy_graph.N)
        E = local_energies(toy_graph, x, y, syndrome(toy_graph, x), alpha=1.0)
        before = global_energy(toy_graph, x, y, 1.0)
        for n in range(toy_graph.N):
            x2 = x.copy()
            x2[n] = -x2[n]
            after = global_energy(toy_graph, x2, y, 1.0)
            assert after - before == pytest.approx(-2.0 * E[n])

    def test_momentum_term(self, toy_graph):
        x = np.ones(toy_graph.N, dtype=np.int8)
        y = np.ones(toy_graph.N)
        c = syndrome(toy_graph, x)
        l = np.array([1, 2, 3, 4, 5, 1, 2, 3, 4, 5])
        E0 = local_energies(toy_graph, x, y, c, 1.0)
        E = local_energies(toy_graph, x, y, c, 1.0, rho=(5, 3, 1), l=l)
        bonus = np.array([5, 3, 1, 0, 0, 5, 3, 1, 0, 0], dtype=float)
        assert np.allclose(E - E0, bonus)

    def test_momentum_requires_state(self, toy_graph):
        x = np.ones(toy_graph.N, dtype=np.int8)
        with pytest.raises(ValueError):
            local_energies(toy_graph, x, x.astype(float),
                           syndrome(toy_graph, x), 1.0, rho=(1,))


def test_flip_candidates():
    assert flip_candidates([1.0, 2.0, 1.0], 0.0).tolist() == [0, 2]
    assert flip_candidates([1.0, 2.0, 1.0], 1.0).tolist() == [0, 1, 2]
    assert flip_candidates([5.0], 0.0).tolist() == [0]
    with pytest.raises(ValueError):
        flip_candidates([], 0.0)
    with pytest.raises(ValueError):
        flip_candidates([1.0], -0.1)


class TestTrappingSet:
    def test_plain_descent_oscillates(self):
        graph, y = trapping_set_instance()
        cfg = GdbfConfig(variant="GDBF", alpha=1.0, max_iter=20)
        out = run_python(graph, y, cfg, record_trajectory=True)
        assert not out.success
        for flips in out.trajectory:
            assert flips.tolist() == [0, 1, 2, 3]

    def test_momentum_escapes(self):
        graph, y = trapping_set_instance()
        cfg = GdbfConfig(variant="GDBF_WM", alpha=1.0, rho=(3,), max_iter=20)
        out = run_python(graph, y, cfg, record_trajectory=True)
        assert out.success
        assert out.iterations_used == 3
        assert [f.tolist() for f in out.trajectory] == [[0, 1, 2, 3], [4], [0, 2]]
        assert out.total_flips == 7

    def test_noiseless_converges_in_one(self):
        graph, _ = trapping_set_instance()
        out = decode(graph, np.ones(graph.N), GdbfConfig(variant="GDBF"))
        assert out.success and out.iterations_used == 1 and out.total_flips == 0


class TestSpecialization:
    def test_pgdbf_wm_with_unit_p_empty_rho_is_gdbf(self, reg3x6):
        spec = bsc(0.04)
        gdbf = GdbfConfig(variant="GDBF", alpha=0.5)
        pgwm = GdbfConfig(variant="PGDBF_WM", alpha=0.5, p=1.0, rho=())
        x_tx = np.ones(reg3x6.N)
        for i in range(30):
            y = transmit(x_tx, spec, derive_stream(21, "spec", i))
            a = run_python(reg3x6, y, gdbf, record_trajectory=True)
            b = run_python(reg3x6, y, pgwm, record_trajectory=True)
            assert np.array_equal(a.x_hat, b.x_hat)
            assert a.iterations_used == b.iterations_used
            assert all(np.array_equal(fa, fb)
                       for fa, fb in zip(a.trajectory, b.trajectory))

    def test_ngdbf_with_zero_sigma_is_gdbf(self, reg3x6):
        y = transmit(np.ones(reg3x6.N), bsc(0.03), derive_stream(22, "ng"))
        a = decode(reg3x6, y, GdbfConfig(variant="GDBF", alpha=0.5))
        b = decode(reg3x6, y, GdbfConfig(variant="NGDBF", alpha=0.5,
                                         ngdbf_sigma=0.0))
        assert np.array_equal(a.x_hat, b.x_hat)
        assert a.iterations_used == b.iterations_used


class TestMomentumCounters:
    @settings(max_examples=30, deadline=None)
    @given(seed=st.integers(0, 2**31 - 1))
    def test_saturation_invariant(self, seed, toy_graph):
        # counters stay in [0, L+1] and only flips reset them
        cfg = GdbfConfig(variant="GDBF_WM", alpha=1.0, rho=(2, 1))
        gen = np.random.default_rng(seed)
        y = gen.standard_normal(toy_graph.N)
        x = hard_decision(y)
        state = MomentumState.initial(toy_graph.N, cfg)
        for _ in range(10):
            x, state, flips, c = step(toy_graph, x, y, cfg, state)
            if (c == 1).all():
                break
            assert state.l.min() >= 0 and state.l.max() <= cfg.L + 1
            assert (state.l[flips] == 0).all()

    def test_counter_progression(self):
        graph, y = trapping_set_instance()
        cfg = GdbfConfig(variant="GDBF_WM", alpha=1.0, rho=(3, 2))
        x = hard_decision(y)
        state = MomentumState.initial(graph.N, cfg)
        assert (state.l == 3).all()
        x, state, flips, _ = step(graph, x, y, cfg, state)
        unflipped = np.setdiff1d(np.arange(graph.N), flips)
        assert (state.l[flips] == 0).all()
        assert (state.l[unflipped] == 3).all()    # saturated stays saturated
        x, state, flips2, _ = step(graph, x, y, cfg, state)
        assert (state.l[np.setdiff1d(flips, flips2)] == 1).all()


class TestFlipGate:
    def test_bernoulli_statistics(self, reg3x6):
        # on a failing word every candidate passes an independent p-gate
        cfg = GdbfConfig(variant="PGDBF", alpha=0.5, p=0.7)
        y = transmit(np.ones(reg3x6.N), bsc(0.2), derive_stream(5, "gate"))
        x = hard_decision(y)
        state = MomentumState.initial(reg3x6.N, cfg)
        gen = derive_stream(5, "gatedec").generator()
        det = GdbfConfig(variant="GDBF", alpha=0.5)
        n_cand = flip = 0
        for _ in range(400):
            _, _, cands, c = step(reg3x6, x, y, det, state)
            if (c == 1).all():
                break
            x2, state2, flips, _ = step(reg3x6, x, y, cfg, state, gen)
            assert np.isin(flips, cands).all()
            n_cand += len(cands)
            flip += len(flips)
            x, state = x2, state2
        assert n_cand > 500
        assert abs(flip / n_cand - 0.7) < 5 * np.sqrt(0.21 / n_cand)

    def test_randomized_needs_rng(self, toy_graph):
        y = -np.ones(toy_graph.N)
        y[0] = 1.0
        with pytest.raises(ValueError):
            decode(toy_graph, y, GdbfConfig(variant="PGDBF", p=0.5))
        with pytest.raises(ValueError):
            decode(toy_graph, y, GdbfConfig(variant="NGDBF"))


class TestBackends:
    @pytest.mark.skipif(not kernels.compiled_available(),
                        reason="compiled kernel not built")
    @pytest.mark.parametrize("cfg", [
        GdbfConfig(variant="BF"),
        GdbfConfig(variant="GDBF", alpha=0.5),
        GdbfConfig(variant="GDBF", alpha=0.5, delta=0.5),
        GdbfConfig(variant="PGDBF", alpha=0.5, p=0.9),
        GdbfConfig(variant="GDBF_WM", alpha=0.5, rho=(2, 2, 2, 1)),
        GdbfConfig(variant="PGDBF_WM", alpha=0.5, p=0.9, rho=(2, 1)),
    ], ids=lambda c: c.variant + ("-d" if c.delta else ""))
    def test_bitwise_equality(self, reg3x6, cfg):
        x_tx = np.ones(reg3x6.N)
        for i in range(25):
            y = transmit(x_tx, bsc(0.05), derive_stream(31, "be", i))
            outs = []
            for backend in ("python", "compiled"):
                gen = derive_stream(31, "bed", i).generator()
                outs.append(kernels.run(reg3x6, y, cfg, gen, backend=backend))
            a, b = outs
            assert np.array_equal(a.x_hat, b.x_hat)
            assert (a.success, a.iterations_used, a.total_flips) \
                == (b.success, b.iterations_used, b.total_flips)

    @pytest.mark.skipif(not kernels.compiled_available(),
                        reason="compiled kernel not built")
    def test_ngdbf_bitwise_equality(self, reg3x6):
        cfg = GdbfConfig(variant="NGDBF", alpha=1.0, ngdbf_sigma=0.7,
                         max_iter=50)
        x_tx = np.ones(reg3x6.N)
        for i in range(10):
            y = transmit(x_tx, bsc(0.04), derive_stream(32, "ng", i))
            a = kernels.run(reg3x6, y, cfg,
                            derive_stream(32, "ngd", i).generator(),
                            backend="python")
            b = kernels.run(reg3x6, y, cfg,
                            derive_stream(32, "ngd", i).generator(),
                            backend="compiled")
            assert np.array_equal(a.x_hat, b.x_hat)
            assert a.iterations_used == b.iterations_used

    def test_forced_python_env(self, monkeypatch):
        monkeypatch.setenv("GDBFM_FORCE_PY", "1")
        assert kernels.active_backend() == "python"


def test_failure_reports_max_iter():
    graph, y = trapping_set_instance()
    cfg = GdbfConfig(variant="GDBF", alpha=1.0, max_iter=17)
    out = decode(graph, y, cfg)
    assert not out.success
    assert out.iterations_used == 17
