"""Closed-form parameter algebra, spectral density, quadrature, and the
Fourier/Wiener-Hopf verification layer for the loop-O(n) partition function.

Conventions.  The model lives at the self-dual point: n = sqrt(q) =
2p/(1-p), theta = arccos(n/2)/pi in (0, 1/2), x_c = 1/sqrt(8(n+2)).  The
spectral density rho is supported on the cut [gamma_-, gamma_+] and the
boundary partition function is F_ell = int rho(y) y^ell dy.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass

import mpmath as mp
import numpy as np
from scipy import integrate

from .gammafn import beta as beta_fn
from .gammafn import gamma as cgamma

__all__ = [
    "ModelParams",
    "params_from_q",
    "rho",
    "partition_F",
    "partition_F_scaled",
    "partition_F_reference",
    "asymptotic_F",
    "resolvent_W",
    "resolvent_pv",
    "resolvent_equation_residual",
    "kernel_K",
    "kernel_K_numeric",
    "wiener_hopf",
    "wiener_hopf_residual",
    "R_plus",
    "r_plus",
    "inverse_ft_check",
    "beta_identity_residual",
    "consistency_c0_c1",
    "predicted_exponents",
]


@dataclass(frozen=True)
class ModelParams:
    q: float
    p: float
    n: float
    theta: float
    x_c: float
    gamma_minus: float
    gamma_plus: float

    def __post_init__(self) -> None:
        if not (0.0 < self.q < 4.0):
            raise ValueError(f"q must lie in (0, 4), got {self.q}")
        if not (0.0 < self.p < 0.5):
            raise ValueError(f"p must lie in (0, 1/2), got {self.p}")
        if not (0.0 < self.theta < 0.5):
            raise ValueError(f"theta must lie in (0, 1/2), got {self.theta}")
        if not (self.gamma_minus <= 0.0 <= self.gamma_plus):
            raise ValueError("cut must contain 0")
        if abs(self.gamma_minus) > self.gamma_plus + 1e-12:
            raise ValueError("|gamma_-| must not exceed gamma_+")

    @property
    def cut_width(self) -> float:
        return self.gamma_plus - self.gamma_minus


def params_from_q(q: float) -> ModelParams:
    """All coupled constants from q, evaluated in extended precision.

    The two expressions for gamma_+ (trig closed form and 1/(2 x_c)) agree
    identically; both are computed and cross-checked before rounding.
    """
    if not (0.0 < q < 4.0):
        raise ValueError(f"q must lie in (0, 4), got {q} (q = 4 excluded)")
    with mp.workdps(50):
        qm = mp.mpf(q)
        n = mp.sqrt(qm)
        p = n / (2 + n)  # solves sqrt(q) = 2p/(1-p)
        theta = mp.acos(n / 2) / mp.pi
        x_c = 1 / mp.sqrt(8 * (n + 2))
        gp_trig = 2 ** mp.mpf("1.5") * mp.cos(mp.pi * theta / 2)
        gp_xc = 1 / (2 * x_c)
        if abs(gp_trig - gp_xc) > mp.mpf("1e-40") * gp_xc:
            raise AssertionError("gamma_+ closed forms disagree beyond rounding")
        width = 2 ** mp.mpf("1.5") / theta * mp.sin(mp.pi * theta / 2)
        gm = gp_trig - width
        return ModelParams(
            q=float(qm),
            p=float(p),
            n=float(n),
            theta=float(theta),
            x_c=float(x_c),
            gamma_minus=float(gm),
            gamma_plus=float(gp_trig),
        )


# ---------------------------------------------------------------------------
# Spectral density and F_ell quadrature
# ---------------------------------------------------------------------------


def rho(y, params: ModelParams):
    """Spectral density on [gamma_-, gamma_+]; vanishes at both endpoints."""
    gm, gp, th = params.gamma_minus, params.gamma_plus, params.theta
    y = np.asarray(y, dtype=float)
    if np.any(y < gm - 1e-12) or np.any(y > gp + 1e-12):
        raise ValueError("y outside the cut [gamma_-, gamma_+]")
    y = np.clip(y, gm, gp)
    a = np.sqrt(2 * gp - gm - y)
    b = np.sqrt(y - gm)
    pref = 2.0 ** (-th - 0.5) / (math.pi * th * (gp - gm))
    val = pref * (gp - y) ** (1 - th) * ((a + b) ** (2 * th) - (a - b) ** (2 * th))
    return val if val.shape else float(val)


def _scaled_integrand(u, ell: int, params: ModelParams):
    """rho(y(u)) (y/gamma_+)^ell dy/du under y = gamma_+ - width e^{-2u}."""
    gm, gp = params.gamma_minus, params.gamma_plus
    width = gp - gm
    e = np.exp(-2.0 * np.asarray(u, dtype=float))
    y = gp - width * e
    jac = 2.0 * width * e
    base = y / gp
    if ell == 0:
        pw = np.ones_like(base)
    else:
        # |y| <= gamma_+ so the power never overflows; negative y alternates
        pw = np.sign(base) ** (ell % 2) * np.exp(
            ell * np.log(np.maximum(np.abs(base), 1e-300))
        )
        pw = np.where(np.abs(base) < 1e-280, 0.0, pw)
    return rho(y, params) * pw * jac


def partition_F_scaled(ell: int, params: ModelParams, tol: float = 1e-10) -> float:
    """F_ell gamma_+^{-ell}, via the u-substitution that resolves the
    concentration of y^ell at the right cut endpoint."""
    if ell < 0:
        raise ValueError("ell must be >= 0")
    # mass concentrates around u ~ (1/2) log ell for large ell
    u_peak = 0.5 * math.log(max(ell, 1))
    upper = u_peak + 20.0
    pts = [0.25, 1.0, u_peak, u_peak + 3.0] if ell > 10 else None
    val, err = integrate.quad(
        _scaled_integrand,
        0.0,
        upper,
        args=(ell, params),
        epsabs=0.0,
        epsrel=tol,
        limit=400,
        points=[p for p in pts if 0 < p < upper] if pts else None,
    )
    if val > 0 and err / val > 50 * tol:
        raise RuntimeError(
            f"quadrature for F_{ell} reached relative error {err / val:.2e} > tol"
        )
    return val


def partition_F(ell: int, params: ModelParams, tol: float = 1e-10) -> float:
    """F_ell = int rho(y) y^ell dy (unscaled; overflows near ell ~ 700)."""
    return partition_F_scaled(ell, params, tol) * params.gamma_plus**ell


def partition_F_reference(ell: int, params: ModelParams) -> float:
    """Independent oracle: mpmath tanh-sinh quadrature directly in y."""
    gm, gp, th = params.gamma_minus, params.gamma_plus, params.theta
    with mp.workdps(30):
        gm_, gp_, th_ = mp.mpf(gm), mp.mpf(gp), mp.mpf(th)
        pref = 2 ** (-th_ - mp.mpf("0.5")) / (mp.pi * th_ * (gp_ - gm_))

        def f(y):
            a = mp.sqrt(2 * gp_ - gm_ - y)
            b = mp.sqrt(y - gm_)
            r = pref * (gp_ - y) ** (1 - th_) * ((a + b) ** (2 * th_) - (a - b) ** (2 * th_))
            return r * (y / gp_) ** ell

        val = mp.quad(f, [gm_, 0, gp_])
    return float(val)


def asymptotic_F(ell: int, params: ModelParams) -> tuple[float, float]:
    """(c_F gamma_+^ell / ell^{2-theta} in scaled form, c_F).

    Returns (asymptote * gamma_+^{-ell}, c_F) so callers can compare against
    partition_F_scaled without overflow.

    The constant follows from the endpoint expansion: rho(y) ~ c_rho
    (gamma_+ - y)^{1-theta} with c_rho = 2^{theta-1/2} width^{theta-1} /
    (pi theta), and int_0^inf s^{1-theta} e^{-ell s/gamma_+} ds =
    Gamma(2-theta)(gamma_+/ell)^{2-theta}, giving the gamma_+^{2-theta}
    factor below (checked against the quadrature to sub-percent at 1e4).
    """
    if ell < 1:
        raise ValueError("ell must be >= 1")
    th = params.theta
    width = params.cut_width
    c_F = (
        2.0 ** (th - 0.5)
        / (math.pi * th)
        * width ** (th - 1.0)
        * params.gamma_plus ** (2.0 - th)
        * cgamma(2.0 - th).real
    )
    return c_F / ell ** (2.0 - th), c_F


# ---------------------------------------------------------------------------
# Resolvent
# ---------------------------------------------------------------------------


def resolvent_W(z, params: ModelParams, tol: float = 1e-10):
    """W(z) = int rho(y)/(z - y) dy for z off the open cut.

    The cut endpoints themselves are allowed: the integrand stays integrable
    there because rho vanishes at both ends.
    """
    gm, gp = params.gamma_minus, params.gamma_plus
    zc = complex(z)
    if zc.imag == 0.0 and gm < zc.real < gp:
        raise ValueError("z lies on the cut; use resolvent_pv")

    def re_part(y):
        d = zc - y
        return (rho(y, params) * d.real / abs(d) ** 2)

    def im_part(y):
        d = zc - y
        return -(rho(y, params) * d.imag / abs(d) ** 2)

    kw = dict(epsabs=1e-13, epsrel=tol, limit=300)
    re, _ = integrate.quad(re_part, gm, gp, **kw)
    if zc.imag == 0.0:
        return re if not isinstance(z, complex) else complex(re, 0.0)
    im, _ = integrate.quad(im_part, gm, gp, **kw)
    return complex(re, im)


def resolvent_pv(z: float, params: ModelParams, tol: float = 1e-10) -> float:
    """PV int rho(y)/(z - y) dy for z strictly inside the cut."""
    gm, gp = params.gamma_minus, params.gamma_plus
    if not (gm < z < gp):
        raise ValueError("resolvent_pv requires z in the open cut")
    # quad's Cauchy weight computes PV int f(y)/(y - z) dy
    val, _ = integrate.quad(
        lambda y: rho(y, params), gm, gp, weight="cauchy", wvar=z,
        epsabs=1e-13, epsrel=tol, limit=300,
    )
    return -val


def resolvent_pv_excision(
    z: float, params: ModelParams, h: float | None = None
) -> float:
    """Symmetric-excision oracle for the principal value.

    Integrates outside (z-h, z+h) and adds the excised contribution
    rho'(z) * O(h^2) correction implicitly by evaluating the symmetrised
    integrand (rho(z+t) - rho(z-t))/t on (0, h), which is regular.
    """
    gm, gp = params.gamma_minus, params.gamma_plus
    if h is None:
        h = 1e-3 * min(z - gm, gp - z)
    kw = dict(epsabs=1e-13, epsrel=1e-10, limit=300)
    left, _ = integrate.quad(lambda y: rho(y, params) / (z - y), gm, z - h, **kw)
    right, _ = integrate.quad(lambda y: rho(y, params) / (z - y), z + h, gp, **kw)

    def sym(t):
        return (rho(z + t, params) - rho(z - t, params)) / t

    mid, _ = integrate.quad(sym, 0.0, h, **kw)
    return left + right - mid


def resolvent_equation_residual(
    z: float, params: ModelParams, tol: float = 1e-9
) -> float:
    """Residual of PV int rho(y) [1/(z-y) - (n/2)/(z+y-1/x_c)] dy = z/2."""
    gm, gp, n = params.gamma_minus, params.gamma_plus, params.n
    pv = resolvent_pv(z, params, tol)
    shift = 1.0 / params.x_c  # = 2 gamma_+
    reg, _ = integrate.quad(
        lambda y: rho(y, params) * (n / 2.0) / (z + y - shift),
        gm, gp, epsabs=1e-13, epsrel=tol, limit=300,
    )
    return (pv - reg) - z / 2.0


# ---------------------------------------------------------------------------
# Fourier kernel and Wiener-Hopf factorisation
# ---------------------------------------------------------------------------


def small_k(z, params: ModelParams):
    """k(z) = 1/sinh z + (n/2)/cosh z."""
    return 1.0 / cmath.sinh(z) + (params.n / 2.0) / cmath.cosh(z)


def kernel_K(omega, params: ModelParams) -> complex:
    """Closed form K(omega) = pi/cosh(pi omega/2) (n/2 + i sinh(pi omega/2))."""
    w = complex(omega)
    if abs(w.imag) >= 1.0:
        raise ValueError("omega outside the strip |Im| < 1")
    hw = cmath.pi * w / 2.0
    return cmath.pi / cmath.cosh(hw) * (params.n / 2.0 + 1j * cmath.sinh(hw))


def kernel_K_numeric(omega, params: ModelParams, tol: float = 1e-11) -> complex:
    """PV Fourier integral of k, computed from the symmetrised regular form.

    Folding y -> -y turns the principal value into the regular integral
    int_0^inf [2i sin(omega y)/sinh y + n cos(omega y)/cosh y] dy.
    """
    w = complex(omega)
    if abs(w.imag) >= 1.0:
        raise ValueError("omega outside the strip |Im| < 1")
    n = params.n
    decay = 1.0 - abs(w.imag)
    upper = 40.0 / decay

    def integrand(y):
        if y == 0.0:
            return complex(n, 2.0 * w.real)  # limits of the two terms
        return 2j * cmath.sin(w * y) / math.sinh(y) + n * cmath.cos(w * y) / math.cosh(y)

    kw = dict(epsabs=1e-14, epsrel=tol, limit=500)
    re, _ = integrate.quad(lambda y: integrand(y).real, 0.0, upper, **kw)
    im, _ = integrate.quad(lambda y: integrand(y).imag, 0.0, upper, **kw)
    return complex(re, im)


def K_plus(omega, params: ModelParams) -> complex:
    """Factor holomorphic on the upper half-plane."""
    w = complex(omega)
    th = params.theta
    return (
        cgamma((3 + 2 * th - 1j * w) / 4)
        * cgamma((3 - 2 * th - 1j * w) / 4)
        / (2 ** (1j * w / 2) * cgamma((1 - 1j * w) / 2))
    )


def K_minus(omega, params: ModelParams) -> complex:
    """Factor holomorphic on {Im < 1}; the Gamma pole at omega = i(1-2theta)
    sits in a denominator, so it is a removable zero and needs no special
    casing."""
    w = complex(omega)
    th = params.theta
    return (
        2 ** (-1j * w / 2)
        * cgamma((1 + 1j * w) / 2)
        / (cgamma((1 + 2 * th + 1j * w) / 4) * cgamma((1 - 2 * th + 1j * w) / 4))
    )


def wiener_hopf(omega, params: ModelParams) -> tuple[complex, complex]:
    """(K_+, K_-) factors, holomorphic on the upper/lower regions."""
    return K_plus(omega, params), K_minus(omega, params)


def wiener_hopf_residual(omega, params: ModelParams) -> float:
    """|K K_+ - 2 pi^2 K_-| / |2 pi^2 K_-| at a strip point."""
    kp = K_plus(omega, params)
    km = K_minus(omega, params)
    k = kernel_K(omega, params)
    denom = 2 * math.pi**2 * km
    return abs(k * kp - denom) / abs(denom)


# ---------------------------------------------------------------------------
# R_+, r_+ and the half-plane transform verification
# ---------------------------------------------------------------------------


def R_plus(omega, params: ModelParams) -> complex:
    """Explicit R_+(omega) = -(4 sqrt2 /(pi theta)) sin(pi theta/2) K_+ /
    ((omega + i)(omega + 3i))."""
    w = complex(omega)
    th = params.theta
    kp = K_plus(w, params)
    return (
        -4.0 * math.sqrt(2.0) / (math.pi * th) * math.sin(math.pi * th / 2.0)
        * kp / ((w + 1j) * (w + 3j))
    )


def r_plus(v, params: ModelParams):
    """Inverse transform r_+(v) on v > 0 in closed form."""
    th = params.theta
    width = params.cut_width
    v = np.asarray(v, dtype=float)
    if np.any(v < 0):
        raise ValueError("r_plus defined for v >= 0")
    s = np.sqrt(np.maximum(np.exp(4.0 * v) - 1.0, 0.0))
    e2 = np.exp(2.0 * v)
    val = (
        width / (math.sqrt(2.0) * math.pi * th)
        * np.exp(-3.0 * v)
        * ((e2 + s) ** th - np.maximum(e2 - s, 0.0) ** th)
    )
    return val if val.shape else float(val)


def S_plus_numeric(omega, params: ModelParams, tol: float = 1e-10) -> complex:
    """int_0^inf e^{i omega v} r_+(v) dv for Im omega > 0 (and mild decay)."""
    w = complex(omega)
    decay = (3.0 - 2.0 * params.theta) + w.imag  # e^{-(3-2theta)v} envelope
    if decay <= 0.2:
        raise ValueError("integrand decays too slowly for this omega")
    upper = 60.0 / decay

    def f(v):
        return r_plus(v, params) * cmath.exp(1j * w * v)

    kw = dict(epsabs=1e-14, epsrel=tol, limit=400, points=[0.25, 1.0])
    re, _ = integrate.quad(lambda v: f(v).real, 0.0, upper, **kw)
    im, _ = integrate.quad(lambda v: f(v).imag, 0.0, upper, **kw)
    return complex(re, im)


def inverse_ft_check(omega, params: ModelParams) -> float:
    """|S_+(omega) - R_+(omega)| at an upper-half-plane point."""
    return abs(S_plus_numeric(omega, params) - R_plus(omega, params))


def beta_identity_residual(a: complex, b: complex) -> float:
    """Residual of int_0^inf cosh(2bt)/cosh(t)^{2a} dt = 4^{a-1} B(a+b, a-b).

    Requires Re(a - |Re b|) > 0 for convergence; this covers the
    (a, b) = ((5/2 - i omega/2)/2, (theta +- 1)/2) values the half-plane
    transform verification exercises.
    """
    a = complex(a)
    b = complex(b)
    decay = 2.0 * a.real - 2.0 * abs(b.real)
    if decay <= 0.1:
        raise ValueError("integral does not converge fast enough")
    upper = 60.0 / decay

    def f(t):
        if t == 0.0:
            return 1.0 + 0j
        return cmath.cosh(2 * b * t) / cmath.cosh(t) ** (2 * a)

    kw = dict(epsabs=1e-14, epsrel=1e-11, limit=400)
    re, _ = integrate.quad(lambda t: f(t).real, 0.0, upper, **kw)
    im, _ = integrate.quad(lambda t: f(t).imag, 0.0, upper, **kw)
    lhs = complex(re, im)
    rhs = 4.0 ** (a - 1.0) * beta_fn(a + b, a - b)
    return abs(lhs - rhs) / max(abs(rhs), 1.0)


def consistency_c0_c1(params: ModelParams) -> tuple[float, float]:
    """Residuals of the two readings of the F_+ pole coefficients.

    The trig forms are c0 = (4/theta) cos(pi theta/2) sin(pi theta/2) and
    c1 = -(4/theta^2) sin^2(pi theta/2); the 1/theta^2 in c1 is forced by
    c1 = -(1/2)(gamma_+ - gamma_-)^2 with the closed-form cut width, and is
    independently confirmed by the residues of K_- S / ((w+i)(w+3i)) at
    w = -i, -3i.
    """
    th = params.theta
    gp, width = params.gamma_plus, params.cut_width
    c0_geo = 0.5 * gp * width
    c1_geo = -0.5 * width**2
    c0_trig = 4.0 / th * math.cos(math.pi * th / 2.0) * math.sin(math.pi * th / 2.0)
    c1_trig = -4.0 / th**2 * math.sin(math.pi * th / 2.0) ** 2
    return abs(c0_geo - c0_trig), abs(c1_geo - c1_trig)


def predicted_exponents(params: ModelParams) -> dict[str, float]:
    """Exponents and constants consumed by the Monte Carlo acceptance layer."""
    th = params.theta
    _, c_F = asymptotic_F(1, params)
    c_tau = c_F / 2.0  # P(tau^h = ell+1) = F_ell gamma_+^{-ell} / 2
    return {
        "cluster_tail": 3.0 - 2.0 * th,
        "loop_tail": 3.0 - 2.0 * th,
        "tau_tail": 2.0 - th,
        "F_exponent": 2.0 - th,
        "c_F": c_F,
        "c_tau": c_tau,
        "loop_constant": 2.0 ** (2.0 * th - 3.0) * c_tau**2 / (1.0 - th),
    }
