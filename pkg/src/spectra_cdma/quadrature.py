"""Gauss quadrature rules from moment sequences, and the spectral-law
functionals built on them (spectral efficiency, MMSE, closed-form references).

The rule construction uses the modified-moments technique: ordinary moments
are converted to moments against monic Legendre polynomials shifted to a
reference interval, the three-term recurrence of the target measure is
recovered with the modified Chebyshev algorithm, and nodes/weights come from
the symmetric tridiagonal (Jacobi) eigenproblem.  The recurrence recovery is
carried out in 50-digit arithmetic: the moment-to-recurrence map is badly
conditioned in binary64 well before Q = 15, while the moments themselves are
honest float64 inputs, so high-precision intermediates recover everything the
inputs determine.  Loss of positive definiteness (a spent or inconsistent
moment sequence) truncates the rule to the largest valid order.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass
from typing import Callable, Optional, Tuple

import mpmath
import numpy as np
from scipy.linalg import eigh_tridiagonal

from .aem import MomentSequence, mp_atom, mp_moments, mp_support

_DPS = 50
# spurious beta_k caused by float64 moment rounding appears around 1e-16 of
# the natural recurrence scale; anything this far below it is noise
_BREAKDOWN_REL = 1e-13


class HankelBreakdownError(ValueError):
    """Moment sequence is not positive definite at the requested order."""

    def __init__(self, order: int, message: str):
        super().__init__(message)
        self.order = order


@dataclass(frozen=True)
class QuadratureRule:
    """Nodes and positive weights; integrates polynomials of degree
    <= 2*order - 1 exactly against the source moments.  An explicit point
    mass (for laws with a known atom at zero) rides along as a leading node.
    ``support`` is the reference interval the rule was built against."""

    nodes: Tuple[float, ...]
    weights: Tuple[float, ...]
    order: int
    requested: int
    support: Tuple[float, float]
    breakdown_order: Optional[int] = None

    def expectation(self, g: Callable[[float], float]) -> float:
        vals = []
        for x, w in zip(self.nodes, self.weights):
            gx = float(g(x))
            if not math.isfinite(gx):
                raise ValueError(f"integrand not finite at node {x!r}")
            vals.append(w * gx)
        return math.fsum(vals)

    def moment(self, n: int) -> float:
        return math.fsum(w * x**n for x, w in zip(self.nodes, self.weights))


def _legendre_reference(lo, hi, count):
    """Monic three-term recurrence of Legendre polynomials on [lo, hi]."""
    mid = mpmath.mpf(lo) / 2 + mpmath.mpf(hi) / 2
    half = mpmath.mpf(hi) / 2 - mpmath.mpf(lo) / 2
    a = [mid] * count
    b = [mpmath.mpf(0)] + [
        half**2 * k**2 / mpmath.mpf(4 * k**2 - 1) for k in range(1, count)
    ]
    return a, b


def _modified_moments(raw_moments, a_ref, b_ref, count):
    """nu_l = sum_i coeff(p_l, i) * m_i for the monic reference polynomials."""
    polys = [[mpmath.mpf(1)]]
    if count > 1:
        polys.append([-a_ref[0], mpmath.mpf(1)])
    for k in range(1, count - 1):
        pk = polys[k]
        pk1 = polys[k - 1]
        new = [mpmath.mpf(0)] * (k + 2)
        for i, c in enumerate(pk):
            new[i + 1] += c
            new[i] -= a_ref[k] * c
        for i, c in enumerate(pk1):
            new[i] -= b_ref[k] * c
        polys.append(new)
    return [
        mpmath.fsum(c * raw_moments[i] for i, c in enumerate(poly))
        for poly in polys
    ]


def _chebyshev_recurrence(nu, a_ref, b_ref, q):
    """Modified Chebyshev algorithm: recurrence (alpha_k, beta_k) of the
    target measure from 2q modified moments.  Truncates at the first
    non-positive-definite order."""
    alpha = [a_ref[0] + nu[1] / nu[0]]
    beta = [nu[0]]
    if nu[0] <= 0:
        raise HankelBreakdownError(0, "total mass is not positive")
    sigma_prev = [mpmath.mpf(0)] * (2 * q)
    sigma_cur = list(nu)
    for k in range(1, q):
        sigma_new = [mpmath.mpf(0)] * (2 * q)
        for ell in range(k, 2 * q - k):
            sigma_new[ell] = (
                sigma_cur[ell + 1]
                - (alpha[k - 1] - a_ref[ell]) * sigma_cur[ell]
                - beta[k - 1] * sigma_prev[ell]
                + b_ref[ell] * sigma_cur[ell - 1]
            )
        bk = sigma_new[k] / sigma_cur[k - 1]
        scale = b_ref[k] if b_ref[k] > 0 else mpmath.mpf(1)
        if bk <= 0 or bk < _BREAKDOWN_REL * scale:
            return alpha, beta, k
        alpha.append(
            a_ref[k] + sigma_new[k + 1] / sigma_new[k] - sigma_cur[k] / sigma_cur[k - 1]
        )
        beta.append(bk)
        sigma_prev, sigma_cur = sigma_cur, sigma_new
    return alpha, beta, None


def default_support(m: MomentSequence, mass: float = 1.0) -> Tuple[float, float]:
    """Heuristic reference interval [0, m1 + 10 sd] for laws on [0, inf)
    without a known analytic support."""
    m1 = m.moment(1) / mass
    var = max(m.moment(2) / mass - m1**2, 0.0)
    return (0.0, m1 + 10.0 * math.sqrt(var) if var > 0 else m1 * 2.0 + 1e-12)


def gauss_rule(
    m: MomentSequence,
    q: int,
    support_hint: Optional[Tuple[float, float]] = None,
    atom_at_zero: Optional[float] = None,
) -> QuadratureRule:
    """Q-point Gauss rule matching the moment sequence.

    ``support_hint`` locates the reference Legendre basis (defaults to the
    [0, m1 + 10 sd] heuristic).  ``atom_at_zero`` splits a known point mass
    at zero out of the moment sequence before construction and re-attaches
    it as an explicit (node 0, weight) pair; without the split a heavy atom
    poisons the Hankel system.  On loss of positive definiteness at order
    k < Q the largest valid rule is returned with a warning.
    """
    if q < 1:
        raise ValueError("rule order must be >= 1")
    if len(m) < 2 * q:
        raise ValueError(
            f"a {q}-point rule needs moments m_1..m_{2 * q}, have {len(m)}"
        )
    w0 = 0.0
    if atom_at_zero is not None:
        if not 0.0 <= atom_at_zero < 1.0:
            raise ValueError("atom weight must be in [0, 1)")
        w0 = float(atom_at_zero)
    mass = 1.0 - w0
    if support_hint is None:
        support_hint = default_support(m, mass)
    lo, hi = float(support_hint[0]), float(support_hint[1])
    if not (math.isfinite(lo) and math.isfinite(hi)) or hi <= lo:
        raise ValueError(f"bad support interval ({lo}, {hi})")

    with mpmath.workdps(_DPS):
        raw = [mpmath.mpf(mass)] + [mpmath.mpf(m.moment(n)) for n in range(1, 2 * q)]
        a_ref, b_ref = _legendre_reference(lo, hi, 2 * q)
        nu = _modified_moments(raw, a_ref, b_ref, 2 * q)
        alpha, beta, broke = _chebyshev_recurrence(nu, a_ref, b_ref, q)
        alpha_f = [float(a) for a in alpha]
        beta_f = [float(b) for b in beta]

    # shrink until the rule is sane: positive weights, and no node escaping
    # below a non-negative reference interval (escaped nodes mean the float64
    # moments are spent at that order even if the sigma-table stayed positive)
    node_floor = -1e-8 * max(1.0, abs(lo), abs(hi)) if lo >= 0.0 else -math.inf
    order = len(alpha_f)
    while order >= 1:
        if order == 1:
            nodes = [alpha_f[0]]
            wts = [beta_f[0]]
        else:
            diag = np.array(alpha_f[:order])
            off = np.sqrt(np.array(beta_f[1:order]))
            vals, vecs = eigh_tridiagonal(diag, off)
            nodes = vals.tolist()
            wts = (beta_f[0] * vecs[0, :] ** 2).tolist()
        if all(w > 0 for w in wts) and all(x >= node_floor for x in nodes):
            break
        order -= 1
    if order < 1:
        raise HankelBreakdownError(0, "no valid quadrature rule at any order")
    if order < q:
        warnings.warn(
            f"moment sequence supports only a {order}-point rule "
            f"(requested {q}; positive definiteness lost at order "
            f"{broke if broke is not None else order + 1})",
            RuntimeWarning,
            stacklevel=2,
        )
    if w0 > 0.0:
        nodes = [0.0] + nodes
        wts = [w0] + wts
    return QuadratureRule(
        tuple(nodes), tuple(wts), order, q, (lo, hi), breakdown_order=broke
    )


def mp_rule(beta: float, q: int) -> QuadratureRule:
    """Gauss rule for the Marchenko-Pastur law with ratio index beta; the
    beta > 1 point mass at zero is handled explicitly."""
    if beta <= 0:
        raise ValueError("beta must be > 0")
    m = mp_moments(2 * q, beta)
    return gauss_rule(m, q, support_hint=mp_support(beta), atom_at_zero=mp_atom(beta))


def expectation(rule: QuadratureRule, g: Callable[[float], float]) -> float:
    return rule.expectation(g)


# --------------------------------------------------------- spectral figures


def spectral_efficiency_opt(
    rule: QuadratureRule, alpha: float, beta: float, snr: float
) -> float:
    """Optimum-receiver spectral efficiency beta/(1+alpha) E{log2(1+snr x)}."""
    if snr <= 0:
        raise ValueError("snr must be > 0")
    return beta / (1.0 + alpha) * rule.expectation(lambda x: math.log2(1.0 + snr * x))


def mmse_value(rule: QuadratureRule, snr: float) -> float:
    """Mean-square error of the linear MMSE receiver: E{1/(1+snr x)}."""
    if snr < 0:
        raise ValueError("snr must be >= 0")
    return rule.expectation(lambda x: 1.0 / (1.0 + snr * x))


def spectral_efficiency_mmse_lb(
    rule: QuadratureRule, alpha: float, beta: float, snr: float
) -> float:
    """Lower bound -beta/(1+alpha) log2 E{1/(1+snr x)} on the MMSE-receiver
    spectral efficiency; tight at alpha = 0."""
    if snr <= 0:
        raise ValueError("snr must be > 0")
    return -beta / (1.0 + alpha) * math.log2(mmse_value(rule, snr))


# ----------------------------------------------------- alpha=0 closed forms


def f_transition(x: float, z: float) -> float:
    """F(x, z) = (sqrt(x(1+sqrt z)^2 + 1) - sqrt(x(1-sqrt z)^2 + 1))^2."""
    rz = math.sqrt(z)
    return (
        math.sqrt(x * (1.0 + rz) ** 2 + 1.0) - math.sqrt(x * (1.0 - rz) ** 2 + 1.0)
    ) ** 2


def closed_form_opt(beta: float, snr: float) -> float:
    """Analytic optimum-receiver spectral efficiency for the minimum-bandwidth
    pulse (Marchenko-Pastur law)."""
    f = f_transition(snr, beta)
    return (
        beta * math.log2(1.0 + snr - f / 4.0)
        + math.log2(1.0 + snr * beta - f / 4.0)
        - math.log2(math.e) / (4.0 * snr) * f
    )


def closed_form_mmse_eff(beta: float, snr: float) -> float:
    """Analytic MMSE-receiver spectral efficiency at alpha = 0."""
    return beta * math.log2(1.0 + snr - f_transition(snr, beta) / 4.0)


def closed_form_mmse(beta: float, snr: float) -> float:
    """Analytic MMSE at alpha = 0: 1 - F(snr, beta)/(4 beta snr)."""
    return 1.0 - f_transition(snr, beta) / (4.0 * beta * snr)


# -------------------------------------------------------------- Eb/N0 links


def ebn0_of_snr(beta: float, alpha: float, snr: float, c: float) -> float:
    """Energy per bit over noise level for a system achieving efficiency c."""
    if c <= 0:
        raise ValueError("spectral efficiency must be > 0")
    return beta * snr / ((1.0 + alpha) * c)


def snr_of_ebn0(
    beta: float,
    alpha: float,
    ebn0: float,
    efficiency: Callable[[float], float],
    snr_db_range: Tuple[float, float] = (-30.0, 60.0),
    rel_tol: float = 1e-6,
) -> float:
    """Invert ebn0_of_snr for a monotone efficiency functional by bisection
    on log-snr.  Raises if no bracket exists inside snr_db_range."""

    def gap(snr_db: float) -> float:
        snr = 10.0 ** (snr_db / 10.0)
        c = efficiency(snr)
        if c <= 0:
            return -math.inf
        return ebn0_of_snr(beta, alpha, snr, c) - ebn0

    lo, hi = snr_db_range
    glo, ghi = gap(lo), gap(hi)
    if not (glo <= 0.0 <= ghi):
        raise ValueError(
            f"no snr bracket for Eb/N0 = {ebn0:g} in [{lo}, {hi}] dB "
            f"(endpoint gaps {glo:.3g}, {ghi:.3g})"
        )
    while (hi - lo) > rel_tol * 4.0:
        mid = 0.5 * (lo + hi)
        if gap(mid) <= 0.0:
            lo = mid
        else:
            hi = mid
    return 10.0 ** (0.5 * (lo + hi) / 10.0)
