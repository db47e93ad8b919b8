import math

import numpy as np
import pytest
from scipy import integrate

from fkloop import analytics as A


Q_GRID = (0.25, 1.0, 2.0, 3.0, 3.9)


@pytest.fixture(scope="module", params=Q_GRID)
def pr(request):
    return A.params_from_q(request.param)


class TestParams:
    def test_gamma_identities(self, pr):
        assert abs(pr.gamma_plus - 1.0 / (2.0 * pr.x_c)) < 1e-12
        assert abs(
            pr.gamma_plus - 2.0**1.5 * math.cos(math.pi * pr.theta / 2.0)
        ) < 1e-12

    def test_theta_range(self, pr):
        assert 0.0 < pr.theta < 0.5

    def test_known_points(self):
        assert abs(A.params_from_q(2.0).theta - 0.25) < 1e-14
        assert abs(A.params_from_q(1.0).theta - 1.0 / 3.0) < 1e-14
        assert abs(A.params_from_q(1.0).gamma_plus - math.sqrt(6.0)) < 1e-12

    def test_domain(self):
        for bad in (0.0, 4.0, -1.0, 5.0):
            with pytest.raises(ValueError):
                A.params_from_q(bad)

    def test_p_matches_n(self, pr):
        assert abs(2.0 * pr.p / (1.0 - pr.p) - pr.n) < 1e-12


class TestDensity:
    def test_normalisation(self, pr):
        total, err = integrate.quad(
            lambda y: A.rho(y, pr), pr.gamma_minus, pr.gamma_plus,
            epsabs=1e-13, epsrel=1e-12, limit=300,
        )
        assert abs(total - 1.0) < 1e-10

    def test_nonnegative(self, pr):
        ys = np.linspace(pr.gamma_minus, pr.gamma_plus, 201)[1:-1]
        assert all(A.rho(float(y), pr) >= 0.0 for y in ys)

    def test_f0_is_one(self, pr):
        assert abs(A.partition_F_scaled(0, pr) - 1.0) < 1e-9

    def test_against_mpmath_oracle(self):
        pr = A.params_from_q(2.0)
        for ell in (0, 1, 2, 5, 20):
            ref = A.partition_F_reference(ell, pr)
            got = A.partition_F_scaled(ell, pr)
            assert abs(got - ref) < 1e-9 * max(abs(ref), 1e-3)

    def test_asymptotics_enter_band(self):
        # scaled F_ell approaches c_F / ell^{2-theta} monotonically
        for q in (1.0, 2.0, 3.0):
            p = A.params_from_q(q)
            devs = []
            for ell in (100, 1000, 10000):
                asym, _ = A.asymptotic_F(ell, p)
                devs.append(abs(A.partition_F_scaled(ell, p) / asym - 1.0))
            assert devs[-1] < 0.05
            assert devs[0] > devs[1] > devs[2]


class TestResolvent:
    def test_equation_on_cut(self):
        for q in (1.0, 2.0, 3.0):
            p = A.params_from_q(q)
            zs = np.linspace(p.gamma_minus, p.gamma_plus, 52)[1:-1]
            worst = max(abs(A.resolvent_equation_residual(float(z), p)) for z in zs)
            assert worst < 1e-6

    def test_pv_against_excision_oracle(self):
        pr = A.params_from_q(2.0)
        for frac in (0.2, 0.5, 0.8):
            z = pr.gamma_minus + frac * pr.cut_width
            a = A.resolvent_pv(z, pr)
            b = A.resolvent_pv_excision(z, pr)
            assert abs(a - b) < 1e-7

    def test_endpoint_identity(self):
        for q in (1.0, 2.0, 3.0):
            p = A.params_from_q(q)
            assert abs(A.resolvent_W(p.gamma_plus, p) - 2.0 / p.gamma_plus) < 1e-8

    def test_large_z_expansion(self, pr):
        # W(z) = 1/z + F_1/z^2 + O(z^-3)
        z = 80.0
        w = A.resolvent_W(z, pr)
        f1 = A.partition_F(1, pr)
        assert abs(w - (1.0 / z + f1 / z**2)) < 5.0 / z**3


class TestKernel:
    def test_closed_form_vs_pv_integral(self):
        pr = A.params_from_q(2.0)
        for om in np.linspace(-4.0, 4.0, 20):
            k = A.kernel_K(complex(om), pr)
            kn = A.kernel_K_numeric(complex(om), pr)
            assert abs(k - kn) < 1e-8 * abs(k)

    def test_wiener_hopf_split(self):
        for q in (1.0, 2.0, 3.0):
            p = A.params_from_q(q)
            oms = [x + 0.3j * s for x in np.linspace(-6, 6, 50)
                   for s in (-1.0, 1.0)]
            worst = max(A.wiener_hopf_residual(om, p) for om in oms)
            assert worst < 1e-10

    def test_factor_analyticity_sides(self):
        # K_plus has no zeros/poles in the upper half plane sample
        pr = A.params_from_q(2.0)
        for om in (0.5j, 1.0 + 2.0j, -3.0 + 0.7j):
            val = A.K_plus(om, pr)
            assert np.isfinite(val.real) and np.isfinite(val.imag)
            assert abs(val) > 0


class TestHalfPlaneTransform:
    def test_S_plus_matches_R_plus(self):
        pr = A.params_from_q(2.0)
        pts = [x + 1j * y for x, y in zip(np.linspace(-3, 3, 20),
                                          np.linspace(0.4, 2.4, 20))]
        worst = max(abs(A.S_plus_numeric(om, pr) - A.R_plus(om, pr))
                    for om in pts)
        assert worst < 1e-6

    def test_R_plus_at_i(self):
        for q in (1.0, 2.0, 3.0):
            p = A.params_from_q(q)
            assert abs(A.R_plus(1j, p) - 0.5) < 1e-10

    def test_beta_identity(self):
        pr = A.params_from_q(2.0)
        for k in range(1, 6):
            for s in (1.0, -1.0):
                res = A.beta_identity_residual(
                    1.25 - 0.25j * k, (pr.theta + s) / 2.0
                )
                assert res < 1e-8


class TestConstants:
    def test_pole_coefficients(self, pr):
        r0, r1 = A.consistency_c0_c1(pr)
        assert r0 < 1e-12 and r1 < 1e-12

    def test_predicted_exponents(self):
        p = A.params_from_q(2.0)
        ex = A.predicted_exponents(p)
        assert abs(ex["cluster_tail"] - 2.5) < 1e-14
        assert abs(ex["tau_tail"] - 1.75) < 1e-14
        assert ex["c_F"] > 0 and ex["loop_constant"] > 0
