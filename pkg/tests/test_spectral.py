"""Mode assembly and merged-spectrum solves.

Hand-checkable anchors: on the hemisphere the mode-reduced eigenfunctions
are polynomial, so small bases resolve d(d + n - 2) exactly; on tiny caps
the scaled spectrum must approach the flat-disk Bessel values computed by
the series oracle in oracles.py.
"""

import math

import numpy as np
import pytest

from capspec.errors import (
    ModeCapTooSmall,
    MonotonicityViolation,
    QuadratureNotConverged,
    ValidationError,
)
from capspec.linalg import generalized_sym_eigen
from capspec.quadrature import gauss_jacobi_rule
from capspec.radial import operator_coeffs
from capspec.spectral import (
    ConvergenceStudy,
    Problem,
    SolverConfig,
    Spectrum,
    assemble_mode,
    convergence_study,
    solve_mode,
    solve_spectrum,
)

from oracles import bessel_first_zero


def hemi(n, p, problem, N=16, K=6, **kw):
    return SolverConfig(n=n, p=p, theta0=math.pi / 2, problem=problem,
                        basis_size=N, requested_count=K, **kw)


class TestHemisphereClosedForms:
    def test_n2_membrane_spectrum(self):
        # Dirichlet values on the half-sphere are d(d+1) with the expected
        # multiplicities: 2, 6, 6, 12, 12, 12.
        spec = solve_spectrum(hemi(2, 1, Problem.CLAMPED))
        assert np.allclose(spec.expanded_values(), [2, 6, 6, 12, 12, 12],
                           rtol=0, atol=1e-10)

    def test_n2_entry_structure(self):
        spec = solve_spectrum(hemi(2, 1, Problem.CLAMPED))
        got = [(e.l, e.radial_index, e.multiplicity) for e in spec.entries]
        assert got == [(0, 0, 1), (1, 0, 2), (2, 0, 2), (0, 1, 1)]

    def test_n3_ground_value(self):
        spec = solve_spectrum(hemi(3, 1, Problem.CLAMPED, K=1))
        assert abs(spec.expanded_values()[0] - 3.0) < 1e-10

    def test_mode0_n2_radial_values(self):
        # l = 0 keeps the odd-degree values d(d+1), d = 1, 3, 5.
        mode = solve_mode(hemi(2, 1, Problem.CLAMPED), 0)
        assert np.allclose(mode.radial_values[:3], [2, 12, 30], rtol=0, atol=1e-9)

    def test_assembled_forms_ground_value(self):
        a_form, b_form = assemble_mode(hemi(2, 1, Problem.CLAMPED), 0)
        pairs = generalized_sym_eigen(a_form, b_form)
        assert abs(pairs.values[0] - 2.0) < 1e-10


class TestAssembly:
    def test_forms_nearly_symmetric_odd_order(self):
        cfg = SolverConfig(n=3, p=3, theta0=1.0, problem=Problem.CLAMPED,
                           basis_size=24, requested_count=8)
        a_form, b_form = assemble_mode(cfg, 1)
        assert a_form.asymmetry_defect < 1e-10
        assert b_form.asymmetry_defect < 1e-10

    def test_forms_nearly_symmetric_buckling(self):
        cfg = SolverConfig(n=3, p=3, theta0=1.0, problem=Problem.BUCKLING,
                           basis_size=24, requested_count=8)
        a_form, b_form = assemble_mode(cfg, 1)
        assert a_form.asymmetry_defect < 1e-10
        assert b_form.asymmetry_defect < 1e-10

    def test_quad_doubling_stability(self):
        # a fixed rule at the automatic base size and one at twice that must
        # give the same eigenvalues to well below the doubling tolerance
        base = SolverConfig(n=3, p=2, theta0=1.2, problem=Problem.BUCKLING,
                            basis_size=16, requested_count=6)
        coarse = SolverConfig(n=3, p=2, theta0=1.2, problem=Problem.BUCKLING,
                              basis_size=16, requested_count=6,
                              quad_size=base.quad_base)
        fine = SolverConfig(n=3, p=2, theta0=1.2, problem=Problem.BUCKLING,
                            basis_size=16, requested_count=6,
                            quad_size=2 * base.quad_base)
        va = solve_spectrum(coarse).expanded_values()
        vb = solve_spectrum(fine).expanded_values()
        assert np.max(np.abs(va - vb) / vb) < 1e-9

    def test_underresolved_quadrature_raises(self):
        cfg = SolverConfig(n=2, p=2, theta0=1.0, problem=Problem.CLAMPED,
                           basis_size=16, quad_size=4, requested_count=8)
        with pytest.raises(QuadratureNotConverged):
            assemble_mode(cfg, 0)

    def test_operator_self_adjoint_under_weight(self):
        # integral (Dq1) q2 w == integral q1 (Dq2) w once both factors vanish
        # at x0 (the weight kills the x = 1 boundary term)
        rng = np.random.RandomState(7)
        for l, n, theta0 in ((0, 2, 1.1), (1, 3, 0.7), (2, 4, 2.0)):
            x0 = math.cos(theta0)
            gamma = l + (n - 2) / 2.0
            s, w = gauss_jacobi_rule(gamma, 40)
            a = (1.0 - x0) / 2.0
            x = x0 + a * (s + 1.0)
            eff_w = w * a ** (gamma + 1.0) * (1.0 + x) ** gamma
            vander = np.polynomial.chebyshev.chebvander(s, 9)
            for _ in range(3):
                # prefix a simple zero at x0: multiply by (x - x0) = a(s + 1)
                lin = a * np.array([1.0, 1.0])
                c1 = np.zeros(10)
                c2 = np.zeros(10)
                p1 = np.polynomial.chebyshev.chebmul(lin, rng.randint(-5, 6, size=6).astype(float))
                p2 = np.polynomial.chebyshev.chebmul(lin, rng.randint(-5, 6, size=6).astype(float))
                c1[: len(p1)] = p1
                c2[: len(p2)] = p2
                d1 = operator_coeffs(c1, l, n, x0)
                d2 = operator_coeffs(c2, l, n, x0)
                v1, v2 = vander @ c1, vander @ c2
                dv1, dv2 = vander @ d1, vander @ d2
                lhs = float(np.sum(dv1 * v2 * eff_w))
                rhs = float(np.sum(v1 * dv2 * eff_w))
                scale = max(abs(lhs), abs(rhs), 1.0)
                assert abs(lhs - rhs) < 1e-11 * scale


class TestSpectrumStructure:
    def test_buckling_dominates_membrane(self):
        for n, theta0 in ((2, math.pi / 2), (3, 1.3)):
            buck = SolverConfig(n=n, p=2, theta0=theta0, problem=Problem.BUCKLING,
                                basis_size=20, requested_count=1)
            memb = SolverConfig(n=n, p=1, theta0=theta0, problem=Problem.CLAMPED,
                                basis_size=20, requested_count=1)
            big = solve_spectrum(buck).expanded_values()[0]
            small = solve_spectrum(memb).expanded_values()[0]
            assert big >= small - 1e-12 * small

    def test_ground_value_shrinks_with_cap(self):
        values = []
        for theta0 in (0.8, 1.4, 2.0):
            cfg = SolverConfig(n=3, p=2, theta0=theta0, problem=Problem.CLAMPED,
                               basis_size=24, requested_count=1)
            values.append(solve_spectrum(cfg).expanded_values()[0])
        assert values[0] > values[1] > values[2]

    def test_expanded_values_sorted_and_sized(self):
        cfg = SolverConfig(n=4, p=2, theta0=1.0, problem=Problem.BUCKLING,
                           basis_size=20, requested_count=10)
        spec = solve_spectrum(cfg)
        vals = spec.expanded_values()
        assert len(vals) == 10
        assert np.all(np.diff(vals) >= 0)
        total = sum(e.multiplicity for e in spec.entries)
        without_last = total - spec.entries[-1].multiplicity
        assert total >= 10 > without_last

    def test_mode_cap_too_small(self):
        with pytest.raises(ModeCapTooSmall):
            solve_spectrum(hemi(2, 1, Problem.CLAMPED, mode_cap=2))

    def test_auto_cap_matches_fixed(self):
        auto = solve_spectrum(hemi(3, 2, Problem.BUCKLING, N=20, K=8))
        fixed = solve_spectrum(hemi(3, 2, Problem.BUCKLING, N=20, K=8,
                                    mode_cap=auto.diagnostics["l_max"]))
        assert np.array_equal(auto.expanded_values(), fixed.expanded_values())

    def test_deterministic(self):
        cfg = SolverConfig(n=3, p=3, theta0=1.9, problem=Problem.BUCKLING,
                           basis_size=20, requested_count=6)
        va = solve_spectrum(cfg).expanded_values()
        vb = solve_spectrum(cfg).expanded_values()
        assert np.array_equal(va, vb)

    def test_guard_flag(self):
        wide = SolverConfig(n=4, p=1, theta0=2.9, problem=Problem.CLAMPED,
                            basis_size=28, requested_count=1)
        assert solve_spectrum(wide).diagnostics["lambda1_guard_ok"] is False
        assert solve_spectrum(hemi(4, 1, Problem.CLAMPED, K=1)).diagnostics[
            "lambda1_guard_ok"] is True

    def test_convergence_estimates_small_on_hemisphere(self):
        spec = solve_spectrum(hemi(3, 2, Problem.BUCKLING, N=24, K=8))
        assert max(spec.diagnostics["convergence"]) < 1e-10

    def test_asymmetry_diagnostic_tracked(self):
        spec = solve_spectrum(hemi(3, 3, Problem.BUCKLING, N=20, K=4))
        assert 0.0 <= spec.diagnostics["max_form_asymmetry"] < 1e-10


class TestFlatLimit:
    # on a cap of radius theta0 -> 0 the scaled values lambda * theta0^2
    # approach the flat-disk constants: squares of Bessel zeros
    def test_membrane_ground(self):
        j01 = bessel_first_zero(0)
        cfg = SolverConfig(n=2, p=1, theta0=0.02, problem=Problem.CLAMPED,
                           basis_size=24, requested_count=1)
        got = solve_spectrum(cfg).expanded_values()[0] * 0.02**2
        assert abs(got - j01**2) / j01**2 < 0.01

    def test_membrane_second(self):
        j11 = bessel_first_zero(1)
        cfg = SolverConfig(n=2, p=1, theta0=0.02, problem=Problem.CLAMPED,
                           basis_size=24, requested_count=3)
        got = solve_spectrum(cfg).expanded_values()[1] * 0.02**2
        assert abs(got - j11**2) / j11**2 < 0.01

    def test_buckling_ground(self):
        # the plate buckling ground value on the flat disk is also j_{1,1}^2
        j11 = bessel_first_zero(1)
        cfg = SolverConfig(n=2, p=2, theta0=0.02, problem=Problem.BUCKLING,
                           basis_size=24, requested_count=1)
        got = solve_spectrum(cfg).expanded_values()[0] * 0.02**2
        assert abs(got - j11**2) / j11**2 < 0.01


class TestConvergenceStudy:
    def test_nested_values_non_increasing(self):
        cfg = SolverConfig(n=2, p=2, theta0=1.9, problem=Problem.BUCKLING,
                           basis_size=32, requested_count=8)
        study = convergence_study(cfg, (8, 16, 32))
        assert isinstance(study, ConvergenceStudy)
        assert study.values.shape == (3, 8)
        assert np.all(study.values[1] <= study.values[0] + 1e-10)
        assert np.all(study.values[2] <= study.values[1] + 1e-10)
        assert np.all(study.estimates < 1e-6)

    def test_repeated_sizes_identical(self):
        cfg = SolverConfig(n=3, p=2, theta0=1.0, problem=Problem.CLAMPED,
                           basis_size=16, requested_count=4)
        study = convergence_study(cfg, (16, 16))
        assert np.array_equal(study.values[0], study.values[1])
        assert np.all(study.estimates == 0.0)

    def test_bad_size_lists(self):
        cfg = SolverConfig(n=2, p=2, theta0=1.0, problem=Problem.CLAMPED,
                           basis_size=16, requested_count=4)
        with pytest.raises(ValidationError):
            convergence_study(cfg, (16,))
        with pytest.raises(ValidationError):
            convergence_study(cfg, (16, 8))


class TestValidation:
    def test_rejects_bad_dimension(self):
        for n in (1, 0, 2.5):
            with pytest.raises(ValidationError):
                SolverConfig(n=n, p=2, theta0=1.0, problem=Problem.CLAMPED)

    def test_rejects_bad_order(self):
        with pytest.raises(ValidationError):
            SolverConfig(n=2, p=0, theta0=1.0, problem=Problem.CLAMPED)
        with pytest.raises(ValidationError):
            SolverConfig(n=2, p=1, theta0=1.0, problem=Problem.BUCKLING)

    def test_rejects_bad_radius(self):
        for theta0 in (0.0, math.pi, -0.3, 4.0):
            with pytest.raises(ValidationError):
                SolverConfig(n=2, p=2, theta0=theta0, problem=Problem.CLAMPED)

    def test_rejects_basis_below_count(self):
        with pytest.raises(ValidationError):
            SolverConfig(n=2, p=2, theta0=1.0, problem=Problem.CLAMPED,
                         basis_size=4, requested_count=8)

    def test_problem_accepts_string(self):
        cfg = SolverConfig(n=2, p=2, theta0=1.0, problem="buckling")
        assert cfg.problem is Problem.BUCKLING

    def test_spectrum_is_frozen(self):
        spec = solve_spectrum(hemi(2, 1, Problem.CLAMPED, K=1))
        assert isinstance(spec, Spectrum)
        with pytest.raises(Exception):
            spec.entries = ()
        scratch = spec.expanded_values()
        scratch[0] = -1.0
        assert spec.expanded_values()[0] > 0.0
