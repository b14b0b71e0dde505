"""Isospectral midpoint stepping, dissipative splitting, noise draws."""

import numpy as np
import pytest

import zsph

from conftest import random_state


def make_stepper(cache, fact, **model_kwargs):
    model = zsph.ModelSpec(**model_kwargs)
    return zsph.Stepper(model, cache, fact)


class TestNoiseDraws:
    def test_bound_formula(self):
        h = 0.01
        assert zsph.truncation_bound(h) == pytest.approx(
            np.sqrt(4.0 * abs(np.log(h)))
        )

    def test_step_domain(self):
        for h in (0.0, 1.0, 1.5, -0.1):
            with pytest.raises(zsph.InvalidStepError):
                zsph.truncation_bound(h)

    def test_clipping_and_mean(self):
        scaling = zsph.build_noise_scaling(1.0, 24, 0.5)
        rng = np.random.default_rng(0)
        total = 0.0
        count = 0
        bound = zsph.truncation_bound(0.01)
        draws = 10**6 // scaling.mode_count + 1
        for _ in range(draws):
            draw = zsph.sample_noise_draw(0.01, scaling, rng)
            assert np.abs(draw.zetas).max() <= bound
            total += draw.zetas.sum()
            count += len(draw.zetas)
        assert abs(total / count) < 4.0 / np.sqrt(count)


class TestMidpointStep:
    def test_single_mode_stationary(self, cache16, fact16):
        # W proportional to one basis mode commutes with its own stream matrix
        w = 1j * cache16.matrix(3, 0)
        stepper = make_stepper(cache16, fact16, variant="euler", h=0.01)
        w1 = stepper.isospectral_midpoint_step(w)
        assert np.abs(w1 - w).max() < 1e-13

    def test_spectrum_preserved(self, cache16, fact16):
        stepper = make_stepper(cache16, fact16, variant="euler", h=0.01)
        w = random_state(cache16, 0)
        ref = zsph.spectrum(w)
        for _ in range(50):
            w = stepper.composite_step(w)
        assert zsph.spectrum_drift(w, ref) < 1e-12

    def test_casimirs_preserved(self, cache16, fact16):
        stepper = make_stepper(cache16, fact16, variant="euler", h=0.01)
        w = random_state(cache16, 1)
        c0 = zsph.casimirs(w, 4)
        for _ in range(50):
            w = stepper.composite_step(w)
        c1 = zsph.casimirs(w, 4)
        for a, b in zip(c0, c1):
            assert b == pytest.approx(a, rel=1e-11, abs=1e-11)

    def test_energy_error_second_order(self, cache16, fact16):
        # halving h shrinks the energy drift by about 4 (order-2 method)
        w0 = random_state(cache16, 2)
        drifts = []
        for h in (0.02, 0.01):
            stepper = make_stepper(cache16, fact16, variant="euler", h=h)
            w = w0.copy()
            e0 = zsph.energy(w, fact16)
            for _ in range(int(round(1.0 / h))):
                w = stepper.composite_step(w)
            drifts.append(abs(zsph.energy(w, fact16) - e0) / e0)
        ratio = drifts[0] / drifts[1]
        assert 2.5 < ratio < 6.0

    def test_deterministic(self, cache16, fact16):
        stepper = make_stepper(cache16, fact16, variant="euler", h=0.01)
        w = random_state(cache16, 3)
        a = stepper.composite_step(w.copy())
        b = stepper.composite_step(w.copy())
        assert np.array_equal(a, b)

    def test_draw_required_iff_stochastic(self, cache16, fact16):
        stepper = make_stepper(cache16, fact16, variant="euler", h=0.01)
        scaling = zsph.build_noise_scaling(1.0, 2, 0.5)
        draw = zsph.sample_noise_draw(0.01, scaling, np.random.default_rng(0))
        with pytest.raises(ValueError):
            stepper.isospectral_midpoint_step(random_state(cache16, 0), draw)
        st = make_stepper(
            cache16, fact16, variant="stochastic", h=0.01, scaling=scaling
        )
        with pytest.raises(ValueError):
            st.isospectral_midpoint_step(random_state(cache16, 0))


class TestStochasticStep:
    def test_enstrophy_and_spectrum_exact(self, cache16, fact16):
        scaling = zsph.build_noise_scaling(1.0, 4, 0.5)
        stepper = make_stepper(
            cache16, fact16, variant="stochastic", h=0.01, scaling=scaling
        )
        rng = np.random.default_rng(7)
        w = random_state(cache16, 4)
        s0 = zsph.enstrophy(w)
        ref = zsph.spectrum(w)
        for _ in range(50):
            draw = zsph.sample_noise_draw(0.01, scaling, rng)
            w = stepper.composite_step(w, draw)
        assert zsph.enstrophy(w) == pytest.approx(s0, rel=1e-11)
        assert zsph.spectrum_drift(w, ref) < 1e-11

    def test_zero_noise_matches_deterministic(self, cache16, fact16):
        scaling = zsph.build_noise_scaling(1.0, 4, 0.5)
        st = make_stepper(
            cache16, fact16, variant="stochastic", h=0.01, scaling=scaling
        )
        det = make_stepper(cache16, fact16, variant="euler", h=0.01)
        w = random_state(cache16, 5)
        draw = zsph.NoiseDraw(zetas=np.zeros(scaling.mode_count), bound=1.0)
        assert np.abs(st.composite_step(w, draw) - det.composite_step(w)).max() < 1e-13

    def test_noise_matrix_skew_hermitian(self, cache16, fact16):
        scaling = zsph.build_noise_scaling(1.0, 4, 0.5)
        st = make_stepper(
            cache16, fact16, variant="stochastic", h=0.01, scaling=scaling
        )
        draw = zsph.sample_noise_draw(0.01, scaling, np.random.default_rng(1))
        mat = st.noise_matrix(draw)
        assert np.abs(mat + mat.conj().T).max() < 1e-12


class TestDissipativeSplitting:
    def test_pure_diffusion_exact(self, cache16, fact16):
        # bracket disabled: coefficients follow exp(-nu l(l+1) t) exactly
        nu, h, steps = 0.01, 0.02, 100
        model = zsph.ModelSpec(
            variant="navier_stokes", h=h, nu=nu, disable_bracket=True
        )
        stepper = zsph.Stepper(model, cache16, fact16)
        coeffs0 = zsph.random_initial_condition(6, l_max=10)
        w = zsph.project(coeffs0, cache16)
        for _ in range(steps):
            w = stepper.composite_step(w)
        out = zsph.extract(w, cache16)
        t = h * steps
        for l in range(1, 11):
            for m in range(-l, l + 1):
                expected = coeffs0.get(l, m) * np.exp(-nu * l * (l + 1) * t)
                assert abs(out.get(l, m) - expected) < 1e-10

    def test_ns_energy_decay_rate(self, cache16, fact16):
        # one small step loses energy at rate nu * enstrophy
        nu, h = 0.05, 1e-4
        stepper = make_stepper(cache16, fact16, variant="navier_stokes", h=h, nu=nu)
        w = random_state(cache16, 7)
        e0 = zsph.energy(w, fact16)
        s0 = zsph.enstrophy(w)
        e1 = zsph.energy(stepper.composite_step(w), fact16)
        assert (e0 - e1) / h == pytest.approx(nu * s0, rel=1e-2)

    def test_nide_substep_override(self, cache16, fact16):
        scaling = zsph.build_noise_scaling(2.0, 2, 0.5)
        model = zsph.ModelSpec(
            variant="nide",
            h=0.01,
            nide=zsph.NideSpec.power_law(scaling),
            nide_substeps=3,
        )
        stepper = zsph.Stepper(model, cache16, fact16)
        w = random_state(cache16, 8)
        w1 = stepper.composite_step(w)
        assert np.abs(w1 + w1.conj().T).max() < 1e-12

    def test_nide_step_dissipates(self, cache16, fact16):
        scaling = zsph.build_noise_scaling(1.0, 4, 0.5)
        stepper = make_stepper(
            cache16,
            fact16,
            variant="nide",
            h=0.01,
            nide=zsph.NideSpec.power_law(scaling),
        )
        w = random_state(cache16, 9)
        e0, s0 = zsph.energy(w, fact16), zsph.enstrophy(w)
        w = stepper.composite_step(w)
        assert zsph.energy(w, fact16) < e0
        assert zsph.enstrophy(w) < s0


class TestModelSpecValidation:
    def test_variant_names(self):
        with pytest.raises(ValueError):
            zsph.ModelSpec(variant="rk4", h=0.01)

    def test_requirements(self):
        with pytest.raises(ValueError):
            zsph.ModelSpec(variant="nide", h=0.01)
        with pytest.raises(ValueError):
            zsph.ModelSpec(variant="stochastic", h=0.01)
        with pytest.raises(ValueError):
            zsph.ModelSpec(variant="euler", h=-0.01)
