"""Closed-form asymptotic eigenvalue moments and free cumulants.

The limiting crosscorrelation spectra are described by sums over class-size
profiles of noncrossing partitions: the chip-synchronous law is
Marchenko-Pastur with ratio beta; fading multiplies in the power moments of
the squared amplitudes; chip asynchronism multiplies in the waveform's
spectral power moments over the Kreweras-complement profile.  All
combinatorial weights are exact integers, converted to floating point only
in the final multiply-accumulate.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from typing import Optional, Sequence, Tuple

from .ncpart import (
    count_by_profile,
    count_by_profile_pair,
    multiplicity_f,
    narayana,
    profiles,
)
from .waveform import WMomentTable


@dataclass(frozen=True)
class MomentSequence:
    """Moments m_1..m_nmax of a spectral law (m_0 is implicitly 1)."""

    values: Tuple[float, ...]
    label: str = ""

    def moment(self, n: int) -> float:
        if n == 0:
            return 1.0
        if not 1 <= n <= len(self.values):
            raise ValueError(f"moment {n} not available (have {len(self.values)})")
        return self.values[n - 1]

    def __len__(self) -> int:
        return len(self.values)

    def to_rows(self):
        return [(n + 1, v) for n, v in enumerate(self.values)]

    def to_json(self) -> str:
        return json.dumps({"label": self.label, "moments": list(self.values)})


@dataclass(frozen=True)
class FreeCumulantSequence:
    """Free cumulants c_1..c_nmax of a spectral law."""

    values: Tuple[float, ...]
    label: str = ""

    def cumulant(self, n: int) -> float:
        if not 1 <= n <= len(self.values):
            raise ValueError(f"cumulant {n} not available (have {len(self.values)})")
        return self.values[n - 1]

    def __len__(self) -> int:
        return len(self.values)

    def to_rows(self):
        return [(n + 1, v) for n, v in enumerate(self.values)]


@dataclass(frozen=True)
class PowerMomentSpec:
    """Moments of the squared received amplitude |A|^2.

    model "unfaded" has P^(n) = mean_power^n (constant amplitude); model
    "rayleigh" has P^(n) = n! * mean_power^n (exponential power).  Custom
    moment lists are accepted as-is.
    """

    model: str = "unfaded"
    mean_power: float = 1.0
    custom: Optional[Tuple[float, ...]] = None

    def moment(self, n: int) -> float:
        if n == 0:
            return 1.0
        if self.model == "unfaded":
            return self.mean_power**n
        if self.model == "rayleigh":
            return math.factorial(n) * self.mean_power**n
        if self.model == "custom":
            if self.custom is None or n > len(self.custom):
                raise ValueError(f"power moment {n} not available")
            return self.custom[n - 1]
        raise ValueError(f"unknown fading model {self.model!r}")

    @classmethod
    def parse(cls, spec: str) -> "PowerMomentSpec":
        s = spec.strip().lower()
        if s in ("unfaded", "none"):
            return cls("unfaded")
        if s == "rayleigh":
            return cls("rayleigh")
        raise ValueError(f"unknown fading model {spec!r}")


UNFADED = PowerMomentSpec("unfaded")
RAYLEIGH = PowerMomentSpec("rayleigh")


# ------------------------------------------------------- Marchenko-Pastur


def mp_moment(n: int, beta: float) -> float:
    """n-th moment of the Marchenko-Pastur law with ratio index beta:
    (1/n) * sum_j C(n,j) C(n,j-1) beta^(j-1).

    This is the limiting moment of the chip-synchronous crosscorrelation
    matrix for any relative delays and any zero-ICI chip waveform.
    """
    if n < 0:
        raise ValueError("moment order must be >= 0")
    if n == 0:
        return 1.0
    if beta < 0:
        raise ValueError("beta must be >= 0")
    return math.fsum(
        narayana(n, j) * beta ** (j - 1) for j in range(1, n + 1)
    )


def mp_atom(beta: float) -> float:
    """Weight of the point mass at zero: (1 - 1/beta)^+ for beta > 1."""
    return max(0.0, 1.0 - 1.0 / beta) if beta > 0 else 0.0


def mp_support(beta: float) -> Tuple[float, float]:
    a = (1.0 - math.sqrt(beta)) ** 2
    b = (1.0 + math.sqrt(beta)) ** 2
    return a, b


def mp_density(x: float, beta: float) -> float:
    """Continuous part of the Marchenko-Pastur density; the atom at zero is
    reported separately by :func:`mp_atom`."""
    if beta <= 0:
        raise ValueError("beta must be > 0")
    a, b = mp_support(beta)
    if x <= a or x >= b or x == 0.0:
        return 0.0
    return math.sqrt((x - a) * (b - x)) / (2.0 * math.pi * beta * x)


def mp_moments(n_max: int, beta: float) -> MomentSequence:
    return MomentSequence(
        tuple(mp_moment(n, beta) for n in range(1, n_max + 1)),
        label=f"mp(beta={beta:g})",
    )


# ------------------------------------------------------------ profile sums


def _profile_sum_single(n: int, beta: float, factors) -> float:
    """sum_j beta^(j-1) sum over j-part profiles of count * prod factors(size).

    ``factors(size)`` returns the per-class multiplier.  Exact integer counts;
    the float product enters once per profile.
    """
    if n == 0:
        return 1.0
    total = []
    for j in range(1, n + 1):
        sub = []
        for prof in profiles(n, j):
            prod = 1.0
            for c in prof.sizes:
                prod *= factors(c)
            sub.append(count_by_profile(prof) * prod)
        total.append(beta ** (j - 1) * math.fsum(sub))
    return math.fsum(total)


def aem_cs_faded(n: int, beta: float, P: PowerMomentSpec) -> float:
    """Limiting moment of the faded chip-synchronous matrix:
    sum_j beta^(j-1) sum over j-part profiles of count * prod P^(c_r)."""
    if n < 0:
        raise ValueError("moment order must be >= 0")
    return _profile_sum_single(n, beta, P.moment)


def aem_ca(n: int, beta: float, W: WMomentTable) -> float:
    """Limiting moment of the chip-asynchronous matrix.

    Sum over j of beta^(j-1) and over (n-j+1)-part profiles b of
    n(n-1)...(j+1)/f(b) * prod W^(b_r); with all spectral moments equal to 1
    (ideal sinc pulse) this telescopes to the Marchenko-Pastur moment.
    """
    if n < 0:
        raise ValueError("moment order must be >= 0")
    if n == 0:
        return 1.0
    if len(W) < n:
        raise ValueError(f"need spectral moments up to {n}, table has {len(W)}")
    # reindex by the profile length ell = n-j+1: coefficient is the
    # class-size-profile count and the beta power is beta^(n-ell)
    total = []
    for ell in range(1, n + 1):
        sub = [
            count_by_profile(prof)
            * math.prod(W.moment(b) for b in prof.sizes)
            for prof in profiles(n, ell)
        ]
        total.append(beta ** (n - ell) * math.fsum(sub))
    return math.fsum(total)


def _profile_pair_sum(n: int, beta: float, kc_factors, pi_factors) -> float:
    """sum_j beta^(j-1) sum over (n-j+1)-part profiles b and j-part profiles c
    of n(n-j)!(j-1)!/(f(b) f(c)) * prod kc_factors(b_t) * prod pi_factors(c_r).

    The b-sum is grouped per (j, c) so that when every kc factor is 1 the
    inner sum collapses, in exact integer arithmetic, to the single-profile
    count n(n-1)...(n-j+2)/f(c).
    """
    if n == 0:
        return 1.0
    total = []
    for j in range(1, n + 1):
        sub = []
        for cprof in profiles(n, j):
            pprod = 1.0
            for c in cprof.sizes:
                pprod *= pi_factors(c)
            inner = math.fsum(
                count_by_profile_pair(cprof, bprof)
                * math.prod(kc_factors(b) for b in bprof.sizes)
                for bprof in profiles(n, n - j + 1)
            )
            sub.append(inner * pprod)
        total.append(beta ** (j - 1) * math.fsum(sub))
    return math.fsum(total)


def aem_ca_faded(n: int, beta: float, W: WMomentTable, P: PowerMomentSpec) -> float:
    """Limiting moment of the faded chip-asynchronous matrix (double profile
    sum over a partition profile and its complement profile)."""
    if n < 0:
        raise ValueError("moment order must be >= 0")
    if n == 0:
        return 1.0
    if len(W) < n:
        raise ValueError(f"need spectral moments up to {n}, table has {len(W)}")
    return _profile_pair_sum(n, beta, W.moment, P.moment)


def quadratic_form_moments(n: int, beta: float, S: MomentSequence) -> float:
    """Limiting moment of a random quadratic form C^T S C with aspect ratio
    beta: the chip-asynchronous kernel with the waveform's spectral moments
    replaced by the moments of S."""
    if n < 0:
        raise ValueError("moment order must be >= 0")
    if n == 0:
        return 1.0
    if len(S) < n:
        raise ValueError(f"need moments of S up to {n}, have {len(S)}")
    total = []
    for ell in range(1, n + 1):
        sub = [
            count_by_profile(prof) * math.prod(S.moment(b) for b in prof.sizes)
            for prof in profiles(n, ell)
        ]
        total.append(beta ** (n - ell) * math.fsum(sub))
    return math.fsum(total)


# -------------------------------------------------- moment <-> cumulant


def s_coefficient(k: int) -> int:
    """Signed Catalan coefficient (-1)^(k-1) (1/k) C(2k-2, k-1) appearing in
    the cumulant-from-moment expansion."""
    if k < 1:
        raise ValueError("order must be >= 1")
    return (-1) ** (k - 1) * (math.comb(2 * k - 2, k - 1) // k)


def moments_from_cumulants(c: FreeCumulantSequence, n_max: int) -> MomentSequence:
    """m_n = sum over noncrossing partitions of products of class cumulants,
    evaluated as a class-size-profile sum."""
    if len(c) < n_max:
        raise ValueError(f"need cumulants up to {n_max}, have {len(c)}")
    out = []
    for n in range(1, n_max + 1):
        terms = []
        for j in range(1, n + 1):
            for prof in profiles(n, j):
                prod = 1.0
                for size in prof.sizes:
                    prod *= c.cumulant(size)
                terms.append(count_by_profile(prof) * prod)
        out.append(math.fsum(terms))
    return MomentSequence(tuple(out), label=f"moments({c.label})" if c.label else "")


def cumulants_from_moments(m: MomentSequence, n_max: int) -> FreeCumulantSequence:
    """Inverse transform: c_n as a double profile sum of moment products and
    signed Catalan coefficients over complement profiles."""
    if len(m) < n_max:
        raise ValueError(f"need moments up to {n_max}, have {len(m)}")
    out = []
    for n in range(1, n_max + 1):
        terms = []
        for j in range(1, n + 1):
            for bprof in profiles(n, j):
                mprod = 1.0
                for size in bprof.sizes:
                    mprod *= m.moment(size)
                inner = math.fsum(
                    count_by_profile_pair(bprof, sprof)
                    * math.prod(s_coefficient(s) for s in sprof.sizes)
                    for sprof in profiles(n, n - j + 1)
                )
                terms.append(inner * mprod)
        out.append(math.fsum(terms))
    return FreeCumulantSequence(
        tuple(out), label=f"cumulants({m.label})" if m.label else ""
    )


def free_add(mB: MomentSequence, mC: MomentSequence, n_max: int) -> MomentSequence:
    """Moments of the free additive convolution: cumulants add."""
    cB = cumulants_from_moments(mB, n_max)
    cC = cumulants_from_moments(mC, n_max)
    csum = FreeCumulantSequence(
        tuple(a + b for a, b in zip(cB.values, cC.values)),
        label=f"({mB.label})+({mC.label})" if mB.label or mC.label else "",
    )
    out = moments_from_cumulants(csum, n_max)
    return MomentSequence(out.values, label=csum.label)


def free_multiply(
    cB: FreeCumulantSequence, mC: MomentSequence, n_max: int
) -> MomentSequence:
    """Moments of the free multiplicative convolution: partition classes carry
    the cumulants of B, complement classes carry the moments of C."""
    if len(cB) < n_max or len(mC) < n_max:
        raise ValueError(f"need sequences up to {n_max}")
    out = []
    for n in range(1, n_max + 1):
        terms = []
        for j in range(1, n + 1):
            for bprof in profiles(n, j):
                cprod = 1.0
                for size in bprof.sizes:
                    cprod *= cB.cumulant(size)
                inner = math.fsum(
                    count_by_profile_pair(bprof, uprof)
                    * math.prod(mC.moment(u) for u in uprof.sizes)
                    for uprof in profiles(n, n - j + 1)
                )
                terms.append(inner * cprod)
        out.append(math.fsum(terms))
    return MomentSequence(
        tuple(out),
        label=f"({cB.label})*({mC.label})" if cB.label or mC.label else "",
    )


# ----------------------------------------------------------- convenience


def aem_table(
    kind: str,
    beta: float,
    n_max: int,
    W: Optional[WMomentTable] = None,
    P: Optional[PowerMomentSpec] = None,
    S: Optional[MomentSequence] = None,
) -> MomentSequence:
    """Moment table for one of the limiting laws.

    kind: "cs" | "ca" | "cs-faded" | "ca-faded" | "quadratic-form".
    """
    if beta < 0:
        raise ValueError("beta must be >= 0")
    if n_max < 1:
        raise ValueError("n_max must be >= 1")
    if kind == "cs":
        return mp_moments(n_max, beta)
    if kind == "ca":
        if W is None:
            raise ValueError("chip-asynchronous tables need a waveform moment table")
        vals = tuple(aem_ca(n, beta, W) for n in range(1, n_max + 1))
        return MomentSequence(vals, label=f"ca(beta={beta:g},{W.waveform.name()})")
    if kind == "cs-faded":
        if P is None:
            raise ValueError("faded tables need a power moment spec")
        vals = tuple(aem_cs_faded(n, beta, P) for n in range(1, n_max + 1))
        return MomentSequence(vals, label=f"cs-faded(beta={beta:g},{P.model})")
    if kind == "ca-faded":
        if W is None or P is None:
            raise ValueError("faded chip-asynchronous tables need W and P")
        vals = tuple(aem_ca_faded(n, beta, W, P) for n in range(1, n_max + 1))
        return MomentSequence(
            vals, label=f"ca-faded(beta={beta:g},{W.waveform.name()},{P.model})"
        )
    if kind == "quadratic-form":
        if S is None:
            raise ValueError("quadratic-form tables need the moments of S")
        vals = tuple(quadratic_form_moments(n, beta, S) for n in range(1, n_max + 1))
        return MomentSequence(vals, label=f"quadratic-form(beta={beta:g})")
    raise ValueError(f"unknown table kind {kind!r}")
