"""Finite-size Monte Carlo for crosscorrelation spectra.

Builds the chip-synchronous / chip-asynchronous crosscorrelation matrices of
a random-spreading system from explicit chips and delays, applies per-symbol
fading, and measures empirical spectral moments for convergence checks
against the closed-form limits.

Index layout: the matrix row of user k (0-based) at symbol block m (0-based,
spanning symbols -M..M) is m*K + k.  Chips are kept unscaled (binary +-1 or
standard normal) and every assembled matrix is divided by N once, which keeps
the binary-chip diagonal exactly 1.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field, replace
from typing import Optional, Tuple

import numpy as np

from . import _kernels
from .aem import (
    PowerMomentSpec,
    aem_ca,
    aem_ca_faded,
    aem_cs_faded,
    mp_moment,
)
from .waveform import ChipWaveform, WMomentTable, autocorrelation, sinc_waveform

CHIP_SYNC = "chip_synchronous"
CHIP_ASYNC = "chip_asynchronous"


@dataclass(frozen=True)
class SystemConfig:
    """Finite-system parameters for one Monte Carlo experiment."""

    K: int
    N: int
    M: int
    sync: str = CHIP_SYNC
    spreading: str = "long"  # long | short
    chip_law: str = "binary"  # binary | gaussian
    delay_model: str = "integer"  # zero | integer | uniform | uniform_chip
    waveform: ChipWaveform = field(default_factory=sinc_waveform)
    fading: str = "unfaded"  # unfaded | rayleigh
    seed: int = 0
    trials: int = 1
    truncation: int = 30
    freeze_delays: bool = False

    def __post_init__(self):
        if self.K < 1 or self.N < 1:
            raise ValueError("K and N must be >= 1")
        if self.M < 0:
            raise ValueError("M must be >= 0 (observation window 2M+1 symbols)")
        if self.trials < 1:
            raise ValueError("trials must be >= 1")
        if self.sync not in (CHIP_SYNC, CHIP_ASYNC):
            raise ValueError(f"unknown sync mode {self.sync!r}")
        if self.spreading not in ("long", "short"):
            raise ValueError(f"unknown spreading mode {self.spreading!r}")
        if self.chip_law not in ("binary", "gaussian"):
            raise ValueError(f"unknown chip law {self.chip_law!r}")
        if self.fading not in ("unfaded", "rayleigh"):
            raise ValueError(f"unknown fading model {self.fading!r}")
        if self.delay_model not in ("zero", "integer", "uniform", "uniform_chip"):
            raise ValueError(f"unknown delay model {self.delay_model!r}")
        if self.sync == CHIP_SYNC and self.delay_model in ("uniform", "uniform_chip"):
            raise ValueError(
                "chip-synchronous delays must be integer chip multiples "
                "(delay_model zero or integer)"
            )
        if self.truncation < 1:
            raise ValueError("truncation must be >= 1 chip")

    @property
    def beta(self) -> float:
        return self.K / self.N

    @property
    def nblocks(self) -> int:
        return 2 * self.M + 1

    @property
    def dim(self) -> int:
        return self.nblocks * self.K

    def power_moments(self) -> PowerMomentSpec:
        return PowerMomentSpec(self.fading)

    def echo(self) -> dict:
        return {
            "K": self.K,
            "N": self.N,
            "M": self.M,
            "beta": self.beta,
            "sync": self.sync,
            "spreading": self.spreading,
            "chip_law": self.chip_law,
            "delay_model": self.delay_model,
            "waveform": self.waveform.name(),
            "fading": self.fading,
            "seed": self.seed,
            "trials": self.trials,
            "truncation": self.truncation,
            "freeze_delays": self.freeze_delays,
            "dim": self.dim,
        }


def trial_rng(seed: int, trial: int) -> np.random.Generator:
    """Substream derived solely from (master seed, trial index)."""
    return np.random.default_rng(np.random.SeedSequence(seed, spawn_key=(trial,)))


def generate_spreading(config: SystemConfig, rng: np.random.Generator) -> np.ndarray:
    """Unscaled chips, shape (K, 2M+1, N): binary +-1 or standard normal.

    Short codes draw one sequence per user (the first symbol's) and repeat it
    for every symbol; long codes draw fresh chips per symbol.
    """
    k, nb, n = config.K, config.nblocks, config.N
    if config.spreading == "short":
        base = _draw_chips(config, rng, (k, 1, n))
        return np.broadcast_to(base, (k, nb, n)).copy()
    return _draw_chips(config, rng, (k, nb, n))


def _draw_chips(config, rng, shape):
    if config.chip_law == "binary":
        return rng.integers(0, 2, size=shape).astype(np.float64) * 2.0 - 1.0
    return rng.standard_normal(shape)


def draw_delays(config: SystemConfig, rng: np.random.Generator) -> np.ndarray:
    """User delays in chip units (chip-synchronous ones are exact integers).

    Chip-synchronous integer delays are sorted with the first user at zero;
    chip-asynchronous ones are i.i.d. uniform over the symbol (or over one
    chip for the quasi-synchronous variant).
    """
    k, n = config.K, config.N
    if config.delay_model == "zero":
        return np.zeros(k)
    if config.delay_model == "integer":
        g = np.sort(rng.integers(0, n, size=k)).astype(np.float64)
        g[0] = 0.0
        return g
    if config.delay_model == "uniform":
        return rng.uniform(0.0, n, size=k)
    return rng.uniform(0.0, 1.0, size=k)


def _chip_trains(chips: np.ndarray) -> np.ndarray:
    k, nb, n = chips.shape
    return np.ascontiguousarray(chips.reshape(k, nb * n))


def build_r_cs(
    config: SystemConfig,
    rng: np.random.Generator,
    chips: Optional[np.ndarray] = None,
    delays: Optional[np.ndarray] = None,
) -> np.ndarray:
    """Chip-synchronous crosscorrelation matrix (block tri-diagonal).

    Chips overlap exactly when global chip positions coincide, so each user
    pair contributes at the single lag given by its delay difference.
    """
    if config.sync != CHIP_SYNC:
        raise ValueError("build_r_cs needs a chip-synchronous config")
    if chips is None:
        chips = generate_spreading(config, rng)
    if delays is None:
        delays = draw_delays(config, rng)
    gam = np.asarray(delays, dtype=np.float64)
    if np.any(gam != np.round(gam)):
        raise ValueError("chip-synchronous delays must be integer chip multiples")
    gam = gam.astype(np.int64)
    k, nb, n = chips.shape
    trains = _chip_trains(chips)
    r = np.zeros((nb * k, nb * k))
    one = np.ones(1)
    block = np.empty((nb, nb))
    for a in range(k):
        for b in range(a, k):
            d = int(gam[b] - gam[a])
            block[:] = 0.0
            _kernels.corr_blocks(trains[a], trains[b], one, d, n, nb, block)
            _scatter(r, block, a, b, k, nb)
    r /= n
    return r


def build_r_ca(
    config: SystemConfig,
    rng: np.random.Generator,
    chips: Optional[np.ndarray] = None,
    delays: Optional[np.ndarray] = None,
) -> np.ndarray:
    """Chip-asynchronous crosscorrelation matrix.

    Each user pair sums chip products against the waveform autocorrelation
    sampled on the integer lattice shifted by the pair's delay difference;
    lags with |offset| > truncation chips are dropped.
    """
    if config.sync != CHIP_ASYNC:
        raise ValueError("build_r_ca needs a chip-asynchronous config")
    if chips is None:
        chips = generate_spreading(config, rng)
    if delays is None:
        delays = draw_delays(config, rng)
    tau = np.asarray(delays, dtype=np.float64)
    w = config.waveform
    L = config.truncation
    if w.family == "sinc" and L < 50:
        raise ValueError(
            "sinc autocorrelation decays like 1/x; truncation below 50 chips "
            "is not meaningful for chip-asynchronous builds"
        )
    k, nb, n = chips.shape
    trains = _chip_trains(chips)
    r = np.zeros((nb * k, nb * k))
    block = np.empty((nb, nb))
    tc = w.chip_duration
    for a in range(k):
        for b in range(a, k):
            x = tau[a] - tau[b]
            d_lo = math.ceil(-L - x)
            d_hi = math.floor(L - x)
            lags = np.arange(d_lo, d_hi + 1, dtype=np.float64)
            g = np.asarray(autocorrelation(w, (lags + x) * tc), dtype=np.float64)
            block[:] = 0.0
            _kernels.corr_blocks(trains[a], trains[b], g, d_lo, n, nb, block)
            _scatter(r, block, a, b, k, nb)
    r /= n
    return r


def _scatter(r, block, a, b, k, nb):
    rows = np.arange(nb) * k
    r[np.ix_(rows + a, rows + b)] += block
    if a != b:
        r[np.ix_(rows + b, rows + a)] += block.T


def build_u(
    config: SystemConfig,
    rng: np.random.Generator,
    chips: Optional[np.ndarray] = None,
    delays: Optional[np.ndarray] = None,
) -> np.ndarray:
    """Tall factor of the chip-synchronous matrix: column (m, k) carries user
    k's symbol-m chips at row offset (M+m)N + delay_k, scaled to unit norm.
    U^T U reproduces build_r_cs entry for entry."""
    if config.sync != CHIP_SYNC:
        raise ValueError("build_u needs a chip-synchronous config")
    if chips is None:
        chips = generate_spreading(config, rng)
    if delays is None:
        delays = draw_delays(config, rng)
    gam = np.asarray(delays)
    if np.any(gam != np.round(gam)):
        raise ValueError("chip-synchronous delays must be integer chip multiples")
    gam = gam.astype(np.int64)
    k, nb, n = chips.shape
    u = np.zeros(((nb + 1) * n, nb * k))
    scale = 1.0 / math.sqrt(n)
    for m in range(nb):
        for a in range(k):
            off = m * n + gam[a]
            u[off : off + n, m * k + a] = chips[a, m] * scale
    return u


def apply_fading(
    r: np.ndarray,
    config: SystemConfig,
    rng: np.random.Generator,
    amplitudes: Optional[np.ndarray] = None,
) -> np.ndarray:
    """Conjugate by the diagonal amplitude matrix: returns A^T R A with
    |A|^2 drawn per (user, symbol) (exponential for Rayleigh fading)."""
    if config.fading == "unfaded" and amplitudes is None:
        return r
    if amplitudes is None:
        amplitudes = np.sqrt(rng.exponential(1.0, size=r.shape[0]))
    a = np.asarray(amplitudes, dtype=np.float64)
    if a.shape != (r.shape[0],):
        raise ValueError("amplitude vector must match the matrix dimension")
    return r * a[:, None] * a[None, :]


def empirical_moment(r: np.ndarray, n: int) -> float:
    """Normalized trace of the n-th matrix power, by repeated multiplication
    (no eigendecomposition)."""
    if n < 1:
        raise ValueError("moment order must be >= 1")
    return empirical_moments(r, n)[-1]


def empirical_moments(r: np.ndarray, n_max: int) -> list:
    """[m_1 .. m_nmax], each tr(R^n) / dim, via incremental matrix powers."""
    if n_max < 1:
        raise ValueError("moment order must be >= 1")
    dim = r.shape[0]
    out = [float(np.trace(r)) / dim]
    cur = r
    for _ in range(2, n_max + 1):
        cur = cur @ r
        out.append(float(np.trace(cur)) / dim)
    return out


def empirical_esd(
    r: np.ndarray, bins: int = 50, lo: Optional[float] = None, hi: Optional[float] = None
) -> Tuple[np.ndarray, np.ndarray]:
    """Eigenvalue histogram (bin_edges, mass); mass sums to 1."""
    if not np.allclose(r, r.T, atol=1e-10):
        raise ValueError("empirical spectrum needs a symmetric matrix")
    ev = np.linalg.eigvalsh(r)
    lo = float(ev.min()) if lo is None else lo
    hi = float(ev.max()) if hi is None else hi
    mass, edges = np.histogram(ev, bins=bins, range=(lo, hi))
    return edges, mass / ev.size


def build_matrix(
    config: SystemConfig,
    rng: np.random.Generator,
    chips: Optional[np.ndarray] = None,
    delays: Optional[np.ndarray] = None,
) -> np.ndarray:
    builder = build_r_cs if config.sync == CHIP_SYNC else build_r_ca
    r = builder(config, rng, chips=chips, delays=delays)
    if config.fading != "unfaded":
        r = apply_fading(r, config, rng)
    return r


@dataclass(frozen=True)
class MomentStat:
    n: int
    mean: float
    stderr: float
    target: float

    @property
    def rel_dev(self) -> float:
        return self.mean / self.target - 1.0 if self.target != 0 else math.inf

    @property
    def z(self) -> float:
        if self.stderr == 0.0:
            return 0.0 if self.mean == self.target else math.inf
        return (self.mean - self.target) / self.stderr


@dataclass(frozen=True)
class TrialReport:
    config: dict
    n_max: int
    stats: Tuple[MomentStat, ...]
    per_trial: Tuple[Tuple[float, ...], ...]

    def to_json(self) -> str:
        return json.dumps(
            {
                "config": self.config,
                "moments": [
                    {
                        "n": s.n,
                        "mean": s.mean,
                        "stderr": s.stderr,
                        "target": s.target,
                        "rel_dev": s.rel_dev,
                        "z": s.z,
                    }
                    for s in self.stats
                ],
            },
            indent=2,
            sort_keys=True,
        )

    def max_abs_z(self) -> float:
        return max(abs(s.z) for s in self.stats)


def aem_targets(config: SystemConfig, n_max: int) -> list:
    """Closed-form limits matching the configured system."""
    beta = config.beta
    if config.sync == CHIP_SYNC:
        if config.fading == "unfaded":
            return [mp_moment(n, beta) for n in range(1, n_max + 1)]
        return [
            aem_cs_faded(n, beta, config.power_moments()) for n in range(1, n_max + 1)
        ]
    wtab = WMomentTable.build(config.waveform, n_max)
    if config.fading == "unfaded":
        return [aem_ca(n, beta, wtab) for n in range(1, n_max + 1)]
    p = config.power_moments()
    return [aem_ca_faded(n, beta, wtab, p) for n in range(1, n_max + 1)]


def run_trials(config: SystemConfig, n_max: int = 4) -> TrialReport:
    """Monte Carlo moment statistics vs their closed-form targets.

    Per-trial randomness comes from a substream of (seed, trial index) only,
    and trials are reduced in index order, so reports are reproducible
    regardless of execution interleaving.
    """
    frozen_delays = None
    if config.freeze_delays:
        # delay stream outside the trial index range
        frozen_delays = draw_delays(config, trial_rng(config.seed, 1 << 32))
    rows = []
    for t in range(config.trials):
        rng = trial_rng(config.seed, t)
        r = build_matrix(config, rng, delays=frozen_delays)
        rows.append(tuple(empirical_moments(r, n_max)))
    arr = np.array(rows)
    means = arr.mean(axis=0)
    if config.trials > 1:
        stderr = arr.std(axis=0, ddof=1) / math.sqrt(config.trials)
    else:
        stderr = np.zeros(n_max)
    targets = aem_targets(config, n_max)
    stats = tuple(
        MomentStat(n + 1, float(means[n]), float(stderr[n]), targets[n])
        for n in range(n_max)
    )
    return TrialReport(config.echo(), n_max, stats, tuple(rows))
