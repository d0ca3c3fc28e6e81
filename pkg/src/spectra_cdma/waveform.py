"""Chip waveforms: autocorrelation, spectral energy density, and the
spectral power moments that parameterize chip-asynchronous eigenvalue moments.

All internal math is in chip units (T_c = 1 by default); the spectral moment
of order m is (1 / (2 pi T_c^{m-1})) * integral of |Psi(Omega)|^{2m}.  The
time-domain lattice sum provides an independent cross-check: summed over the
integer lattice, cyclic products of autocorrelation values reproduce the
spectral moments (exactly for minimum-bandwidth pulses, in expectation over
random fractional offsets otherwise).
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field
from typing import Callable, Optional, Sequence, Tuple

import numpy as np
from scipy import integrate


def _sinc_autocorr(x):
    return np.sinc(x)


def _srrc_autocorr(x, alpha):
    """Raised-cosine pulse: inverse transform of the SRRC energy density.

    sinc(x) cos(pi a x) / (1 - (2 a x)^2), with the removable singularity at
    |x| = 1/(2a) filled by its limit (pi/4) sinc(1/(2a)).
    """
    x = np.asarray(x, dtype=float)
    if alpha == 0.0:
        return np.sinc(x)
    den = 1.0 - (2.0 * alpha * x) ** 2
    sing = np.abs(den) < 1e-9
    safe = np.where(sing, 1.0, den)
    val = np.sinc(x) * np.cos(np.pi * alpha * x) / safe
    lim = (np.pi / 4.0) * np.sinc(1.0 / (2.0 * alpha))
    out = np.where(sing, lim, val)
    return out if out.ndim else float(out)


@dataclass(frozen=True)
class ChipWaveform:
    """Unit-energy chip pulse known through its autocorrelation and its
    spectral energy density |Psi(Omega)|^2.

    family: "sinc", "srrc" (with roll-off alpha in [0, 1]) or "custom".
    Custom waveforms supply ``density`` on [-support, support] (rad/s) and
    optionally a closed-form ``autocorr``; absent that, the autocorrelation
    falls back to numeric inversion of the density.
    """

    family: str
    alpha: float = 0.0
    chip_duration: float = 1.0
    density: Optional[Callable] = field(default=None, compare=False)
    density_support: float = 0.0
    autocorr: Optional[Callable] = field(default=None, compare=False)
    label: str = ""

    @property
    def bandwidth(self) -> float:
        """One-sided bandwidth in hertz."""
        tc = self.chip_duration
        if self.family == "sinc":
            return 1.0 / (2.0 * tc)
        if self.family == "srrc":
            return (1.0 + self.alpha) / (2.0 * tc)
        return self.density_support / (2.0 * np.pi)

    @property
    def zero_ici(self) -> bool:
        return self.family in ("sinc", "srrc")

    def name(self) -> str:
        if self.label:
            return self.label
        if self.family == "sinc":
            return "sinc"
        if self.family == "srrc":
            return f"srrc:{self.alpha:g}"
        return "custom"


def sinc_waveform(chip_duration: float = 1.0) -> ChipWaveform:
    return ChipWaveform("sinc", chip_duration=chip_duration)


def srrc_waveform(alpha: float, chip_duration: float = 1.0) -> ChipWaveform:
    if not 0.0 <= alpha <= 1.0:
        raise ValueError(f"roll-off {alpha} outside [0, 1]")
    return ChipWaveform("srrc", alpha=alpha, chip_duration=chip_duration)


def custom_waveform(
    density: Callable,
    support: float,
    chip_duration: float = 1.0,
    autocorr: Optional[Callable] = None,
    label: str = "custom",
    energy_tol: float = 1e-9,
) -> ChipWaveform:
    """Waveform from a spectral energy density on [-support, support] rad/s.

    The density must integrate to 2*pi (unit pulse energy) within energy_tol.
    """
    w = ChipWaveform(
        "custom",
        chip_duration=chip_duration,
        density=density,
        density_support=support,
        autocorr=autocorr,
        label=label,
    )
    energy, _ = integrate.quad(density, -support, support, limit=400)
    if not math.isfinite(energy):
        raise ValueError("spectral density is not integrable")
    if abs(energy / (2.0 * np.pi) - 1.0) > max(energy_tol, 1e-9):
        raise ValueError(
            f"waveform energy {energy / (2 * np.pi):.12g} != 1 (unit-energy violation)"
        )
    return w


def sampled_density_waveform(
    omegas: Sequence[float], values: Sequence[float], chip_duration: float = 1.0,
    label: str = "custom",
) -> ChipWaveform:
    """Custom waveform from sampled (Omega, |Psi|^2) pairs, linearly
    interpolated; used by the CLI to load densities from CSV."""
    om = np.asarray(omegas, dtype=float)
    vals = np.asarray(values, dtype=float)
    if om.ndim != 1 or om.size < 2 or np.any(np.diff(om) <= 0):
        raise ValueError("sample grid must be strictly increasing")
    if np.any(vals < 0):
        raise ValueError("spectral density must be non-negative")
    support = float(max(abs(om[0]), abs(om[-1])))
    # renormalize to unit energy (trapezoid is exact for the interpolant,
    # and tolerates CSV rounding)
    energy = np.trapezoid(vals, om) / (2.0 * np.pi)
    if energy <= 0:
        raise ValueError("sampled density has no energy")
    vals = vals / energy
    return ChipWaveform(
        "custom",
        chip_duration=chip_duration,
        density=lambda w: np.interp(w, om, vals, left=0.0, right=0.0),
        density_support=support,
        label=label,
    )


def spectral_density(w: ChipWaveform, omega) -> np.ndarray:
    """|Psi(Omega)|^2 at angular frequency omega (rad/s)."""
    tc = w.chip_duration
    om = np.abs(np.asarray(omega, dtype=float))
    if w.family == "sinc":
        return np.where(om <= np.pi / tc, tc, 0.0)
    if w.family == "srrc":
        a = w.alpha
        lo = np.pi * (1.0 - a) / tc
        hi = np.pi * (1.0 + a) / tc
        if a == 0.0:
            return np.where(om <= lo, tc, 0.0)
        roll = 0.5 * tc * (1.0 + np.cos((tc / (2.0 * a)) * (om - lo)))
        return np.where(om <= lo, tc, np.where(om < hi, roll, 0.0))
    return np.asarray(w.density(np.asarray(omega, dtype=float)))


def autocorrelation(w: ChipWaveform, x) -> np.ndarray:
    """R(x) = integral of psi(t) psi(t - x) dt; even, R(0) = 1.

    For sinc and SRRC families, exact zeros are returned at nonzero integer
    chip lags (the inter-chip-interference-free property holds exactly there,
    while naive evaluation of the closed form leaves ~1e-16 residue).
    """
    tc = w.chip_duration
    u = np.asarray(x, dtype=float) / tc
    if w.family == "sinc":
        out = _sinc_autocorr(u)
    elif w.family == "srrc":
        out = _srrc_autocorr(u, w.alpha)
    else:
        if w.autocorr is not None:
            return np.asarray(w.autocorr(np.asarray(x, dtype=float)))
        return _autocorr_from_density(w, np.asarray(x, dtype=float))
    if w.zero_ici:
        integral = u == np.round(u)
        out = np.where(integral & (u != 0.0), 0.0, out)
        out = np.where(u == 0.0, 1.0, out)
    return out if np.ndim(out) else float(out)


def _autocorr_from_density(w: ChipWaveform, x):
    def one(xi):
        val, _ = integrate.quad(
            lambda om: w.density(om) * np.cos(om * xi),
            0.0,
            w.density_support,
            limit=400,
        )
        return val / np.pi
    if np.ndim(x) == 0:
        return one(float(x))
    return np.array([one(float(xi)) for xi in np.ravel(x)]).reshape(np.shape(x))


def w_moment(w: ChipWaveform, m: int) -> float:
    """Spectral power moment of order m, by adaptive quadrature.

    (1 / (2 pi T_c^{m-1})) * integral |Psi(Omega)|^{2m} dOmega over the
    declared support.  Order 1 is the pulse energy (= 1); the ideal sinc
    pulse short-circuits to exactly 1 for every m.
    """
    if m < 1:
        raise ValueError("moment order must be >= 1")
    tc = w.chip_duration
    if w.family == "sinc" or (w.family == "srrc" and w.alpha == 0.0):
        return 1.0
    if w.family == "srrc":
        a = w.alpha
        lo = np.pi * (1.0 - a) / tc
        hi = np.pi * (1.0 + a) / tc
        flat = tc**m * lo  # flat segment, exact
        roll, _ = integrate.quad(
            lambda om: spectral_density(w, om) ** m, lo, hi,
            epsabs=0.0, epsrel=1e-10, limit=200,
        )
        return float((flat + roll) / (np.pi * tc ** (m - 1)))
    val, err = integrate.quad(
        lambda om: np.asarray(w.density(om), dtype=float) ** m,
        0.0,
        w.density_support,
        epsabs=0.0,
        epsrel=1e-8,
        limit=400,
    )
    if not math.isfinite(val):
        raise ValueError("spectral density power is not integrable")
    return float(val / (np.pi * tc ** (m - 1)))


def srrc_w_moment_exact(alpha: float, m: int) -> float:
    """Closed form (1-a) + 2a*C(2m,m)/4^m for the SRRC energy density;
    independent oracle for the quadrature path."""
    return (1.0 - alpha) + 2.0 * alpha * math.comb(2 * m, m) / 4.0**m


@dataclass(frozen=True)
class WMomentTable:
    """Immutable table of spectral power moments of one waveform."""

    waveform: ChipWaveform
    values: Tuple[float, ...]

    @classmethod
    def build(cls, w: ChipWaveform, n_max: int) -> "WMomentTable":
        return cls(w, tuple(w_moment(w, m) for m in range(1, n_max + 1)))

    def moment(self, m: int) -> float:
        if not 1 <= m <= len(self.values):
            raise ValueError(f"spectral moment {m} not tabulated (have {len(self.values)})")
        return self.values[m - 1]

    def __len__(self) -> int:
        return len(self.values)


def xi_lattice_sum(
    w: ChipWaveform,
    m: int,
    etas: Sequence[float],
    n0: int = 0,
    truncation: int = 30,
) -> float:
    """Truncated lattice sum of cyclic autocorrelation products.

    Sums over (n_1 .. n_{m-1}) in [-L, L]^{m-1} the product
    R((n_0-n_1)T_c + eta_0-eta_1) * ... * R((n_{m-1}-n_0)T_c + eta_{m-1}-eta_0).
    With offsets eta fixed and a minimum-bandwidth pulse this converges to the
    order-m spectral moment; with random offsets it does so in expectation.
    """
    if m < 2:
        raise ValueError("lattice sum needs m >= 2 (m = 1 is just R(0) = 1)")
    if len(etas) != m:
        raise ValueError(f"need {m} offsets, got {len(etas)}")
    if truncation < 1:
        raise ValueError("truncation must be >= 1")
    tc = w.chip_duration
    lag = np.arange(-truncation, truncation + 1)
    if m == 2:
        x = (n0 - lag) * tc + (etas[0] - etas[1])
        y = (lag - n0) * tc + (etas[1] - etas[0])
        return float(np.sum(autocorrelation(w, x) * autocorrelation(w, y)))
    if m == 3:
        n1, n2 = np.meshgrid(lag, lag, indexing="ij")
        prod = autocorrelation(w, (n0 - n1) * tc + (etas[0] - etas[1]))
        prod = prod * autocorrelation(w, (n1 - n2) * tc + (etas[1] - etas[2]))
        prod = prod * autocorrelation(w, (n2 - n0) * tc + (etas[2] - etas[0]))
        return float(np.sum(prod))
    total = 0.0
    for ns in itertools.product(lag.tolist(), repeat=m - 1):
        seq = (n0,) + ns
        prod = 1.0
        for i in range(m):
            j = (i + 1) % m
            prod *= float(
                autocorrelation(w, (seq[i] - seq[j]) * tc + (etas[i] - etas[j]))
            )
        total += prod
    return total


def xi_lattice_sum_mc(
    w: ChipWaveform,
    m: int,
    draws: int,
    truncation: int = 30,
    rng: Optional[np.random.Generator] = None,
) -> Tuple[float, float]:
    """Monte Carlo mean of the lattice sum over offsets uniform on [0, T_c).

    eta_0 is pinned to 0, eta_1..eta_{m-1} are i.i.d. uniform (which has the
    required vanishing cosine moments at every nonzero harmonic).  Returns
    (mean, standard error).
    """
    if m < 2:
        raise ValueError("lattice sum needs m >= 2")
    rng = rng or np.random.default_rng()
    tc = w.chip_duration
    lag = np.arange(-truncation, truncation + 1) * tc
    if m == 2:
        eta = rng.uniform(0.0, tc, size=draws)
        vals = autocorrelation(w, lag[None, :] + eta[:, None]) ** 2
        per_draw = vals.sum(axis=1)
    elif m == 3:
        eta1 = rng.uniform(0.0, tc, size=draws)
        eta2 = rng.uniform(0.0, tc, size=draws)
        n1 = lag[None, :, None]
        n2 = lag[None, None, :]
        a = autocorrelation(w, -n1 - eta1[:, None, None])
        b = autocorrelation(w, n1 - n2 + (eta1 - eta2)[:, None, None])
        c = autocorrelation(w, n2 + eta2[:, None, None])
        per_draw = (a * b * c).sum(axis=(1, 2))
    else:
        per_draw = np.empty(draws)
        for i in range(draws):
            etas = [0.0] + list(rng.uniform(0.0, tc, size=m - 1))
            per_draw[i] = xi_lattice_sum(w, m, etas, 0, truncation)
    mean = float(per_draw.mean())
    stderr = float(per_draw.std(ddof=1) / math.sqrt(draws)) if draws > 1 else float("inf")
    return mean, stderr


def parse_waveform(spec: str, chip_duration: float = 1.0) -> ChipWaveform:
    """Parse "sinc" or "srrc:<alpha>" as used in configs and CLI flags."""
    s = spec.strip().lower()
    if s == "sinc":
        return sinc_waveform(chip_duration)
    if s.startswith("srrc:"):
        try:
            alpha = float(s.split(":", 1)[1])
        except ValueError as exc:
            raise ValueError(f"bad roll-off in waveform spec {spec!r}") from exc
        return srrc_waveform(alpha, chip_duration)
    if s == "srrc":
        raise ValueError("srrc waveform needs a roll-off, e.g. srrc:0.5")
    raise ValueError(f"unknown waveform {spec!r} (expected sinc or srrc:<alpha>)")
