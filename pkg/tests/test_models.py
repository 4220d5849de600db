"""Built-in models: classical limits, damping signs, snapshot semantics."""

import math

import numpy as np
import pytest

from oscispec import (
    PolyMatrix,
    SolveOptions,
    UnsupportedModelError,
    build_cable_snapshot,
    build_fixed_fixed_string,
    build_fixed_free_string,
    build_machine_unit,
    build_model,
    build_pipeline,
    build_point_mass_string,
    build_spacecraft_bar,
    characteristic_determinant,
    closed_form_roots,
    model_defaults,
    solve_spectrum,
    validate,
)

OPTS = SolveOptions(scan=(0.3, 10.5, 240), step=1e-3, tol=1e-11)


def _imags(roots, count):
    return [r.lam.imag for r in roots[:count]]


class TestValidation:
    @pytest.mark.parametrize(
        "builder",
        [
            build_machine_unit,
            build_spacecraft_bar,
            build_cable_snapshot,
            build_pipeline,
            build_fixed_free_string,
            build_fixed_fixed_string,
            build_point_mass_string,
        ],
    )
    def test_every_builder_validates(self, builder):
        assert validate(builder()) == []

    def test_unknown_parameter_rejected(self):
        with pytest.raises(ValueError, match="unknown parameter"):
            build_model("pipeline", bogus=1.0)

    def test_defaults_exposed(self):
        d = model_defaults("spacecraft_bar")
        assert d["beta"] == 0.01 and "right_end" in d


class TestMachineUnit:
    def test_clamped_clamped_torsion_spectrum(self):
        prob = build_machine_unit(
            G=4.0, rho=1.0, L=2.0, zeta1=0.0, left_end="clamped", right_end="clamped"
        )
        roots = solve_spectrum(prob, OPTS)
        a = math.sqrt(4.0 / 1.0)
        expected = [k * math.pi * a / 2.0 for k in (1, 2, 3)]
        assert _imags(roots, 3) == pytest.approx(expected, abs=1e-7)
        assert all(abs(r.lam.real) < 1e-9 for r in roots[:3])

    def test_free_free_admits_rigid_rotation(self):
        prob = build_machine_unit(zeta1=0.0, J1=0.0, J2=0.0, beta=0.0, alpha1=0.0)
        assert abs(characteristic_determinant(prob, 0.0, step=1e-3)) <= 1e-12

    def test_shaft_dissipation_damps_all_modes(self):
        prob = build_machine_unit(
            zeta1=0.05, left_end="clamped", right_end="clamped"
        )
        roots = solve_spectrum(prob, OPTS)
        assert len(roots) >= 2
        assert all(r.lam.real < 0 for r in roots)
        # the third mode sits deep below the axis; a rectangle search finds it
        deep = solve_spectrum(
            prob,
            SolveOptions(rect=(-3.0, -0.5, 8.5, 10.5, 4, 4), step=1e-3),
        )
        third = [r for r in deep if 8.5 < r.lam.imag < 10.5]
        assert third and all(r.lam.real < 0 for r in third)

    def test_pole_reported(self):
        prob = build_machine_unit(zeta1=1.0)
        from oscispec import PoleError

        with pytest.raises(PoleError):
            prob.coefficients.evaluators[0](0.5, -1.0)  # G*Ip + zeta1*lam = 0


class TestSpacecraftBar:
    def test_clamped_clamped_limit(self):
        prob = build_spacecraft_bar(beta=0.0, b=0.0, d=0.0, right_end="clamped")
        roots = solve_spectrum(prob, OPTS)
        assert _imags(roots, 3) == pytest.approx(
            [math.pi, 2 * math.pi, 3 * math.pi], abs=1e-7
        )

    def test_degenerate_assembly_becomes_free_end(self):
        prob = build_spacecraft_bar(m=0.0, c=0.0, b=0.0, beta=0.0, d=0.0)
        assert prob.params["right_end"] == "free"
        roots = solve_spectrum(prob, OPTS)
        expected = [(2 * k - 1) * math.pi / 2 for k in (1, 2, 3)]
        assert _imags(roots, 3) == pytest.approx(expected, abs=1e-7)

    def test_cubic_boundary_row_coefficients(self):
        prob = build_spacecraft_bar(rho=2.0, S=3.0, E=5.0, beta=0.1, b=0.2,
                                    c=0.7, d=0.4, m=1.5)
        row = prob.boundary_right.matrix
        assert row.degree == 3
        es = 15.0
        lam = 0.3 + 0.9j
        value = row(lam)
        expected_u = 1.5 * (0.4 + 0.2) * lam**3 + 1.5 * 0.7 * lam**2
        expected_ux = es * (0.1 * 1.5 * lam**3 + (1.5 + 0.1 * 0.2) * lam**2
                            + (0.2 + 0.1 * 0.7) * lam + 0.7)
        assert value[0, 0] == pytest.approx(expected_u, rel=1e-14)
        assert value[0, 1] == pytest.approx(expected_ux, rel=1e-14)

    def test_feedback_sweep_moves_leading_decay_rate(self):
        reals = []
        for d in np.linspace(0.0, 0.2, 5):
            prob = build_spacecraft_bar(d=float(d))
            roots = solve_spectrum(prob, SolveOptions(scan=(0.3, 2.0, 60), step=1e-3))
            reals.append(roots[0].lam.real)
        assert max(reals) - min(reals) > 1e-5
        assert all(np.diff(reals) < 0) or all(np.diff(reals) > 0)


class TestCableSnapshot:
    def test_no_loads_is_pinned_pinned_string(self):
        prob = build_cable_snapshot(masses=(), positions=())
        roots = solve_spectrum(prob, OPTS)
        assert _imags(roots, 3) == pytest.approx(
            [math.pi, 2 * math.pi, 3 * math.pi], abs=1e-7
        )

    def test_single_mass_matches_transcendental_roots(self):
        prob = build_cable_snapshot(masses=(1.0,), positions=(0.5,), v=0.0)
        roots = solve_spectrum(prob, OPTS)
        reference = closed_form_roots("point_mass_string", 0.3, 10.5)
        assert len(roots) >= 3
        for got, want in zip(_imags(roots, 3), reference[:3]):
            assert got == pytest.approx(want, abs=1e-8)

    def test_vanishing_mass_recovers_clean_spectrum(self):
        prob = build_cable_snapshot(masses=(1e-6,), positions=(0.5,))
        roots = solve_spectrum(prob, OPTS)
        bare = [math.pi, 2 * math.pi, 3 * math.pi]
        for got, want in zip(_imags(roots, 3), bare):
            assert abs(got - want) < 1e-4

    def test_snapshot_equals_hand_assembled_interface(self):
        m0, tension = 2.0, 3.0
        prob = build_cable_snapshot(rho=1.0, T=tension, l=1.0, masses=(m0,),
                                    positions=(0.4,), v=0.0)
        hand_d = PolyMatrix.from_entries(
            [[[1.0], [0.0]], [[0.0, 0.0, m0], [tension]]]
        )
        hand_b = PolyMatrix.from_entries([[[1.0], [0.0]], [[0.0], [tension]]])
        conj = prob.conjugations[0]
        assert conj.interface == 1
        assert conj.d_matrix == hand_d
        assert conj.b_matrix == hand_b
        assert prob.partition.breakpoints == (0.0, 0.4, 1.0)

    def test_moving_load_speed_enters_interface(self):
        prob = build_cable_snapshot(masses=(0.5,), positions=(0.5,), v=2.0)
        assert validate(prob) == []
        dmat = prob.conjugations[0].d_matrix
        np.testing.assert_allclose(dmat(0.0), [[1.0, 0.0], [0.0, 1.0]])
        lam = 1j
        val = dmat(lam)
        inertia = 0.5 * (1.0 + 4.0)  # m (1 + v^2 rho / T)
        assert val[1, 0] == pytest.approx(inertia * lam**2)
        assert val[1, 1] == pytest.approx(1.0 + 2.0 * 0.5 * 2.0 * lam)

    def test_coincident_positions_rejected(self):
        with pytest.raises(ValueError, match="strictly increasing"):
            build_cable_snapshot(masses=(1.0, 1.0), positions=(0.5, 0.5))


class TestPipeline:
    def test_clamped_hanger_limit_is_fixed_free(self):
        prob = build_pipeline(M=0.0, alpha1=0.0, beta=0.0, left_end="clamped")
        roots = solve_spectrum(prob, OPTS)
        expected = [(2 * k - 1) * math.pi / 2 for k in (1, 2, 3)]
        assert _imags(roots, 3) == pytest.approx(expected, abs=1e-7)

    def test_internal_friction_damps(self):
        prob = build_pipeline(beta=0.02, alpha1=0.0)
        roots = solve_spectrum(prob, OPTS)
        assert len(roots) >= 3
        assert all(r.lam.real < 0 for r in roots)

    def test_cubic_resistance_unsupported(self):
        with pytest.raises(UnsupportedModelError, match="alpha3"):
            build_pipeline(alpha3=0.1)


class TestUnitScaling:
    def test_time_rescaling_scales_eigenvalues(self):
        # same physical string measured with length unit 1/0.5 and time
        # unit 1/2: tension rescales by (sigma_L/sigma_T)^2, eigenvalues by
        # 1/sigma_T
        sigma_l, sigma_t = 0.5, 2.0
        base = build_fixed_fixed_string(rho=1.0, T=1.0, l=1.0)
        scaled = build_fixed_fixed_string(
            rho=1.0, T=(sigma_l / sigma_t) ** 2, l=sigma_l
        )
        r_base = solve_spectrum(base, SolveOptions(scan=(0.5, 10.5, 240), step=1e-3, tol=1e-12))
        r_scaled = solve_spectrum(
            scaled,
            SolveOptions(scan=(0.5 / sigma_t, 10.5 / sigma_t, 240),
                         step=1e-3 * sigma_l, tol=1e-12),
        )
        for a, b in zip(_imags(r_base, 3), _imags(r_scaled, 3)):
            assert abs(b - a / sigma_t) <= 1e-8 * abs(b)
