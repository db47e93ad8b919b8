import math

import numpy as np
import pytest

from fkloop import walks as K
from fkloop.analytics import params_from_q
from fkloop.enumeration import rational_p, tau_law_bounds


PR = params_from_q(2.0)


class TestStream:
    def test_deterministic(self):
        a = K.sample_backward_stream(9, PR.p, run_index=3)
        b = K.sample_backward_stream(9, PR.p, run_index=3)
        assert [a.next_letter() for _ in range(50)] == [
            b.next_letter() for _ in range(50)
        ]

    def test_runs_independent(self):
        a = K.sample_backward_stream(9, PR.p, run_index=0)
        b = K.sample_backward_stream(9, PR.p, run_index=1)
        assert [a.next_letter() for _ in range(50)] != [
            b.next_letter() for _ in range(50)
        ]

    def test_letter_frequencies(self):
        s = K.sample_backward_stream(5, PR.p, run_index=0)
        n = 200_000
        from collections import Counter

        c = Counter(s.next_letter() for _ in range(n))
        assert c["c"] / n == pytest.approx(0.25, abs=0.01)
        assert c["h"] / n == pytest.approx(0.25, abs=0.01)
        assert c["C"] / n == pytest.approx((1 - PR.p) / 4, abs=0.01)
        assert c["H"] / n == pytest.approx((1 - PR.p) / 4, abs=0.01)
        assert c["F"] / n == pytest.approx(PR.p / 2, abs=0.01)


class TestKernelAgainstReference:
    def test_matches_pure_python(self):
        n = 300
        camp = K.run_campaign(PR.p, n, seed=17, cap_letters=10**5)
        for r in range(n):
            stream = K.sample_backward_stream(17, PR.p, run_index=r)
            out = K.hitting_outcome(stream, cap_letters=10**5)
            if out.tau_h is not None:
                assert camp.tau_h[r] == out.tau_h
            else:
                assert camp.tau_h[r] == -2
            expected_first = {"h": 0, "c": 1, None: -1}[out.first]
            assert camp.first[r] == expected_first
            if out.tau_tilde is not None:
                assert camp.tau_tilde[r] == out.tau_tilde
            assert camp.letters[r] == out.letters_used

    def test_step_cap_marks_overflow(self):
        camp = K.run_campaign(PR.p, 2000, seed=4, step_cap=3)
        assert np.any(camp.tau_h == -1)
        assert np.all(camp.tau_h[camp.tau_h >= 1] <= 4)


class TestEstimates:
    def test_binomial_bracket(self):
        est = K._binomial_estimate(40, 1000, 5, seed=1)
        assert est.bracket[0] <= est.point <= est.bracket[1]
        assert est.bracket == (0.04, 0.045)

    def test_cluster_histogram_masses(self):
        hist = K.mc_cluster_perimeter(PR, 20000, seed=2, ell_max=50)
        total = sum(e.point for e in hist.values())
        assert 0.5 < total <= 1.0 + 1e-9

    def test_loop_histogram_min_value(self):
        hist = K.mc_loop_perimeter(PR, 20000, seed=2, ell_max=50)
        assert min(hist) == 1
        assert hist[1].point > 0.3  # tau-tilde = 1 happens half the time


class TestDictionary:
    def test_ratios_near_one(self):
        rows = K.verify_dictionary(PR, 150_000, seed=11, ell_max=6)
        for row in rows:
            z = abs(row["ratio"] - 1.0) / row["ratio_sigma"]
            assert z < 6.0, (row["ell"], row["ratio"], z)

    def test_dp_bounds_bracket_estimates(self):
        rows = K.verify_dictionary(PR, 150_000, seed=11, ell_max=4)
        bounds = tau_law_bounds(4, depth_cap=20, p=rational_p(2.0))
        for row in rows:
            est = row["p_hat"]
            b = bounds[row["ell"]]
            assert float(b.lower) - 4 * est.stderr <= est.point
            assert est.point <= float(b.upper) + 4 * est.stderr


class TestCoupling:
    def test_gap_law_and_factorisation(self):
        out = K.geometric_coupling_check(PR.p, 40_000, seed=3)
        assert out["gap_p_value"] > 1e-4
        assert out["gap_mean"] == pytest.approx(2.0, abs=0.1)
        for row in out["factorization"]:
            assert row["residual_sigmas"] < 6.0


class TestXi:
    def test_truncated_means_shrink(self):
        rep = K.xi_centred_check(PR.p, 300_000, seed=5,
                                 truncation_levels=(1, 10, 100, 1000))
        means = [abs(rep["levels"][m]["both"]["mean"])
                 for m in (1, 10, 100, 1000)]
        assert means[0] > means[1] > means[2]
        assert means[3] < 0.1

    def test_burger_symmetry(self):
        rep = K.xi_centred_check(PR.p, 300_000, seed=5,
                                 truncation_levels=(100,))
        h = rep["levels"][100]["h"]
        c = rep["levels"][100]["c"]
        z = abs(h["mean"] - c["mean"]) / math.hypot(h["stderr"], c["stderr"])
        assert z < 5.0

    def test_sample_xi_values(self):
        vals = K.sample_xi(PR.p, 4000, seed=6)
        ok = vals[vals >= 0]
        assert len(ok) > 3500
        assert ok.min() == 0
        # E[Xi] = 1: heavy tail, so compare a generously truncated mean
        assert float(np.mean(ok[ok <= 1000])) == pytest.approx(1.0, abs=0.3)


class TestSlopeEstimators:
    def _power_hist(self, slope, n=10**7):
        ells = np.arange(1, 2001)
        p = ells ** float(slope)
        p /= p.sum()
        return {
            int(l): K.MCEstimate(
                point=float(pi), stderr=0.0, n_total=n, n_censored=0,
                seed=0, bracket=(float(pi), float(pi)),
            )
            for l, pi in zip(ells, p)
        }

    def test_recovers_exact_power_law(self):
        for s in (-1.5, -2.5):
            hist = self._power_hist(s)
            got, err = K.tail_slope_wls(hist, 10, 500)
            assert got == pytest.approx(s, abs=0.02)

    def test_needs_enough_bins(self):
        hist = self._power_hist(-2.0)
        with pytest.raises(ValueError):
            K.tail_slope_wls({1: hist[1], 2: hist[2]}, 1, 2)

    def test_hill_on_pareto(self):
        rng = np.random.default_rng(0)
        alpha = 1.5
        x = (1.0 / rng.random(200_000)) ** (1.0 / alpha)
        assert K.hill_tail_index(x, 5) == pytest.approx(alpha, abs=0.1)
