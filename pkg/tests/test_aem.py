"""Closed-form moment formulas against brute-force partition enumeration."""

import math

import numpy as np
import pytest
from scipy import integrate

from spectra_cdma.aem import (
    RAYLEIGH,
    UNFADED,
    FreeCumulantSequence,
    MomentSequence,
    PowerMomentSpec,
    aem_ca,
    aem_ca_faded,
    aem_cs_faded,
    aem_table,
    cumulants_from_moments,
    free_add,
    free_multiply,
    moments_from_cumulants,
    mp_atom,
    mp_density,
    mp_moment,
    mp_moments,
    mp_support,
    quadratic_form_moments,
    s_coefficient,
)
from spectra_cdma.ncpart import enumerate_nc, kreweras
from spectra_cdma.waveform import WMomentTable, sinc_waveform, srrc_waveform

SINC_W = WMomentTable.build(sinc_waveform(), 12)
SRRC05_W = WMomentTable.build(srrc_waveform(0.5), 12)
SRRC1_W = WMomentTable.build(srrc_waveform(1.0), 12)


# ---------------------------------------------------------------- oracles


def brute_moment_from_cumulants(cvals, n):
    """sum over pi in NC(n) of prod over classes of c_{|V|}."""
    total = 0.0
    for p in enumerate_nc(n):
        prod = 1.0
        for cls in p.classes:
            prod *= cvals[len(cls) - 1]
        total += prod
    return total


def brute_free_product(cvals, mvals, n):
    """sum over pi in NC(n) of prod c_{|V|}(B) * prod over KC(pi) of m_{|U|}(C)."""
    total = 0.0
    for p in enumerate_nc(n):
        prod = 1.0
        for cls in p.classes:
            prod *= cvals[len(cls) - 1]
        for cls in kreweras(p).classes:
            prod *= mvals[len(cls) - 1]
        total += prod
    return total


# ----------------------------------------------------------- MP moments


def test_mp_moment_examples():
    assert mp_moment(1, 0.7) == 1.0
    assert mp_moment(2, 0.5) == pytest.approx(1.5)
    assert mp_moment(3, 1.0) == pytest.approx(5.0)  # Catalan C_3
    assert mp_moment(0, 2.0) == 1.0


@pytest.mark.parametrize("beta", [0.25, 0.5, 1.0, 2.0])
@pytest.mark.parametrize("n", range(1, 9))
def test_mp_moment_matches_nc_enumeration(n, beta):
    brute = sum(beta ** (p.num_classes() - 1) for p in enumerate_nc(n))
    assert mp_moment(n, beta) == pytest.approx(brute, rel=1e-13)


def test_mp_moment_beta_zero_single_user():
    for n in range(1, 8):
        assert mp_moment(n, 0.0) == 1.0


def test_mp_density_values():
    assert mp_density(4.0, 1.0) == 0.0
    # sqrt((x-a)(b-x)) / (2 pi beta x) at beta=1, x=2: sqrt(4)/(4 pi)
    assert mp_density(2.0, 1.0) == pytest.approx(1 / (2 * np.pi))
    assert mp_atom(0.25) == 0.0
    assert mp_atom(2.0) == pytest.approx(0.5)


@pytest.mark.parametrize("beta", [0.25, 0.5, 1.0, 2.0])
def test_mp_density_mass_and_moments(beta):
    a, b = mp_support(beta)
    mass, _ = integrate.quad(lambda x: mp_density(x, beta), a, b, limit=300)
    assert mass == pytest.approx(min(1.0, 1.0 / beta), abs=1e-6)
    m2, _ = integrate.quad(lambda x: x**2 * mp_density(x, beta), a, b, limit=300)
    assert m2 == pytest.approx(mp_moment(2, beta), abs=1e-6)


# ------------------------------------------------------------- faded cs


def test_aem_cs_faded_reduces_to_mp_when_unfaded():
    for beta in (0.25, 1.0, 2.0):
        for n in range(1, 9):
            assert aem_cs_faded(n, beta, UNFADED) == mp_moment(n, beta)


def test_aem_cs_faded_examples():
    assert aem_cs_faded(2, 1.0, RAYLEIGH) == pytest.approx(3.0)
    assert aem_cs_faded(1, 0.7, RAYLEIGH) == pytest.approx(1.0)
    custom = PowerMomentSpec("custom", custom=(2.0, 8.0))
    assert aem_cs_faded(1, 0.5, custom) == pytest.approx(2.0)


@pytest.mark.parametrize("beta", [0.5, 1.0, 2.0])
@pytest.mark.parametrize("n", range(1, 9))
def test_aem_cs_faded_matches_nc_enumeration(n, beta):
    brute = 0.0
    for p in enumerate_nc(n):
        prod = beta ** (p.num_classes() - 1)
        for cls in p.classes:
            prod *= RAYLEIGH.moment(len(cls))
        brute += prod
    assert aem_cs_faded(n, beta, RAYLEIGH) == pytest.approx(brute, rel=1e-12)


def test_aem_cs_faded_insufficient_moments():
    short = PowerMomentSpec("custom", custom=(1.0,))
    with pytest.raises(ValueError):
        aem_cs_faded(2, 1.0, short)


# -------------------------------------------------------------------- ca


def test_aem_ca_sinc_equals_mp_exactly():
    for beta in (0.0, 0.25, 0.5, 1.0, 2.0):
        for n in range(1, 9):
            assert aem_ca(n, beta, SINC_W) == mp_moment(n, beta)


def test_aem_ca_examples():
    w2 = SRRC05_W.moment(2)
    assert aem_ca(2, 0.5, SRRC05_W) == pytest.approx(1 + 0.5 * w2)
    assert aem_ca(2, 0.5, SRRC05_W) == pytest.approx(1.4375, abs=1e-9)
    assert aem_ca(1, 2.0, SRRC1_W) == pytest.approx(1.0)


@pytest.mark.parametrize("beta", [0.5, 1.0, 2.0])
@pytest.mark.parametrize("n", range(1, 9))
def test_aem_ca_matches_nc_enumeration(n, beta):
    # free-cumulant interpretation: classes carry W^{(size)} beta^{size-1}
    cvals = [SRRC1_W.moment(k) * beta ** (k - 1) for k in range(1, n + 1)]
    brute = brute_moment_from_cumulants(cvals, n)
    assert aem_ca(n, beta, SRRC1_W) == pytest.approx(brute, rel=1e-12)


def test_aem_ca_insufficient_table():
    short = WMomentTable.build(srrc_waveform(0.5), 2)
    with pytest.raises(ValueError):
        aem_ca(3, 1.0, short)


def test_aem_ca_growth_bound():
    # moment growth bound: mu_n <= (2 BW Tc)^(n-1) W^(n) (1 + beta/(2 BW Tc))^(2n)
    for table, alpha in ((SRRC05_W, 0.5), (SRRC1_W, 1.0)):
        cap = 1 + alpha
        for beta in (0.5, 1.0, 2.0):
            for n in range(1, 9):
                bound = cap ** (n - 1) * table.moment(n) * (1 + beta / cap) ** (2 * n)
                assert aem_ca(n, beta, table) <= bound + 1e-9


# -------------------------------------------------------------- faded ca


def test_aem_ca_faded_collapses():
    for beta in (0.25, 1.0, 2.0):
        for n in range(1, 8):
            assert aem_ca_faded(n, beta, SINC_W, RAYLEIGH) == pytest.approx(
                aem_cs_faded(n, beta, RAYLEIGH), rel=1e-14, abs=1e-14
            )
            assert aem_ca_faded(n, beta, SRRC1_W, UNFADED) == pytest.approx(
                aem_ca(n, beta, SRRC1_W), rel=1e-14, abs=1e-14
            )


def test_aem_ca_faded_example():
    assert aem_ca_faded(2, 1.0, SRRC1_W, RAYLEIGH) == pytest.approx(2.75, abs=1e-9)


@pytest.mark.parametrize("beta", [0.5, 1.0])
@pytest.mark.parametrize("n", range(1, 8))
def test_aem_ca_faded_matches_nc_enumeration(n, beta):
    cvals = [SRRC1_W.moment(k) * beta ** (k - 1) for k in range(1, n + 1)]
    mvals = [RAYLEIGH.moment(k) for k in range(1, n + 1)]
    brute = brute_free_product(cvals, mvals, n)
    assert aem_ca_faded(n, beta, SRRC1_W, RAYLEIGH) == pytest.approx(brute, rel=1e-12)


# -------------------------------------------------------- quadratic forms


def test_quadratic_form_moments_identities():
    point_mass_one = MomentSequence(tuple(1.0 for _ in range(8)))
    for beta in (0.5, 1.0, 2.0):
        for n in range(1, 9):
            assert quadratic_form_moments(n, beta, point_mass_one) == pytest.approx(
                mp_moment(n, beta), rel=1e-14
            )
    w_as_moments = MomentSequence(SRRC05_W.values[:8])
    for n in range(1, 9):
        assert quadratic_form_moments(n, 0.5, w_as_moments) == pytest.approx(
            aem_ca(n, 0.5, SRRC05_W), rel=1e-14
        )
    s = MomentSequence((1.0, 2.0))
    assert quadratic_form_moments(2, 1.0, s) == pytest.approx(3.0)


# --------------------------------------------------------- s coefficients


def test_s_coefficient_values():
    assert [s_coefficient(k) for k in range(1, 7)] == [1, -1, 2, -5, 14, -42]
    with pytest.raises(ValueError):
        s_coefficient(0)


# ------------------------------------------------------------- transforms


def test_moments_from_cumulants_point_mass():
    c = FreeCumulantSequence((1.0,) + (0.0,) * 9)
    m = moments_from_cumulants(c, 10)
    assert all(v == pytest.approx(1.0) for v in m.values)


@pytest.mark.parametrize("beta", [0.25, 1.0, 2.0])
def test_mp_cumulants_are_beta_powers(beta):
    m = mp_moments(10, beta)
    c = cumulants_from_moments(m, 10)
    for k in range(1, 11):
        assert c.cumulant(k) == pytest.approx(beta ** (k - 1), abs=1e-9)
    back = moments_from_cumulants(c, 10)
    for n in range(1, 11):
        assert back.moment(n) == pytest.approx(m.moment(n), rel=1e-9)


def test_ca_cumulants_are_weighted_beta_powers():
    beta = 0.5
    m = aem_table("ca", beta, 10, W=SRRC1_W)
    c = cumulants_from_moments(m, 10)
    for k in range(1, 11):
        assert c.cumulant(k) == pytest.approx(
            SRRC1_W.moment(k) * beta ** (k - 1), abs=1e-8
        )


def test_flat_moments_give_delta_cumulants():
    m = MomentSequence((1.0,) * 10)
    c = cumulants_from_moments(m, 10)
    assert c.cumulant(1) == pytest.approx(1.0)
    for k in range(2, 11):
        assert c.cumulant(k) == pytest.approx(0.0, abs=1e-10)


@pytest.mark.parametrize("n", range(1, 9))
def test_moments_from_cumulants_matches_enumeration(n):
    rng = np.random.default_rng(n)
    cvals = tuple(rng.uniform(-1, 1, size=n))
    c = FreeCumulantSequence(cvals)
    m = moments_from_cumulants(c, n)
    assert m.moment(n) == pytest.approx(brute_moment_from_cumulants(cvals, n), rel=1e-11, abs=1e-11)


def test_transform_round_trip_random_sequences():
    rng = np.random.default_rng(2024)
    for _ in range(100):
        cvals = tuple(rng.uniform(-0.9, 0.9, size=12))
        c = FreeCumulantSequence(cvals)
        m = moments_from_cumulants(c, 12)
        back = cumulants_from_moments(m, 12)
        assert np.max(np.abs(np.array(back.values) - np.array(cvals))) < 1e-9


def test_u_shape_scaling_cumulants():
    # the n-th free cumulant of a beta-scaled quadratic-form law U D U^T is
    # mu(D^n) * beta; checked at beta = 1 with unfaded D via the transforms
    beta = 1.0
    m = aem_table("cs-faded", beta, 8, P=UNFADED)
    c = cumulants_from_moments(m, 8)
    for n in range(1, 9):
        assert c.cumulant(n) == pytest.approx(beta ** (n - 1), abs=1e-9)


# ----------------------------------------------------------- convolutions


def test_free_add_zero_is_identity():
    x = mp_moments(8, 0.5)
    zero = MomentSequence((0.0,) * 8)
    out = free_add(x, zero, 8)
    for n in range(1, 9):
        assert out.moment(n) == pytest.approx(x.moment(n), rel=1e-10, abs=1e-12)


def test_free_add_mp_plus_mp():
    b1, b2 = 0.5, 0.25
    out = free_add(mp_moments(8, b1), mp_moments(8, b2), 8)
    csum = cumulants_from_moments(out, 8)
    for k in range(1, 9):
        assert csum.cumulant(k) == pytest.approx(
            b1 ** (k - 1) + b2 ** (k - 1), abs=1e-8
        )
    # mu((B+C)^2) = mu(B^2) + 2 mu(B) mu(C) + mu(C^2) = (1+b1) + 2 + (1+b2)
    assert out.moment(2) == pytest.approx(4 + b1 + b2, rel=1e-10)


def test_free_add_semicircles():
    sigma2 = 0.7
    semi = moments_from_cumulants(
        FreeCumulantSequence((0.0, sigma2, 0.0, 0.0)), 4
    )
    out = free_add(semi, semi, 4)
    assert out.moment(2) == pytest.approx(2 * sigma2, rel=1e-10)
    assert out.moment(4) == pytest.approx(2 * (2 * sigma2) ** 2, rel=1e-9)


def test_free_multiply_identity():
    c = cumulants_from_moments(mp_moments(8, 0.5), 8)
    ident = MomentSequence((1.0,) * 8)
    out = free_multiply(c, ident, 8)
    for n in range(1, 9):
        assert out.moment(n) == pytest.approx(mp_moment(n, 0.5), rel=1e-9)


@pytest.mark.parametrize("beta", [0.25, 0.5, 1.0, 2.0])
def test_free_multiply_reproduces_faded_cs(beta):
    cB = FreeCumulantSequence(tuple(beta ** (k - 1) for k in range(1, 9)))
    mC = MomentSequence(tuple(RAYLEIGH.moment(k) for k in range(1, 9)))
    out = free_multiply(cB, mC, 8)
    for n in range(1, 9):
        assert out.moment(n) == pytest.approx(
            aem_cs_faded(n, beta, RAYLEIGH), rel=1e-9
        )


def test_free_multiply_ca_example():
    cB = FreeCumulantSequence(
        tuple(SRRC1_W.moment(k) * 1.0 ** (k - 1) for k in range(1, 3))
    )
    out = free_multiply(cB, MomentSequence((1.0, 1.0)), 2)
    assert out.moment(2) == pytest.approx(1.75)


def test_simpler_printed_form_of_cs_product():
    # the W == 1 specialization: sum_j beta^(n-j) over (n-j+1)-part profiles
    # of count * prod mu(D^{c_r}) equals the free product with MP cumulants
    from spectra_cdma.ncpart import count_by_profile, profiles

    beta = 0.5
    mD = tuple(RAYLEIGH.moment(k) for k in range(1, 7))
    for n in range(1, 7):
        # an ell-part complement profile pairs with an (n-ell+1)-class
        # partition, so the load exponent is n - j = ell - 1
        direct = math.fsum(
            beta ** (ell - 1)
            * math.fsum(
                count_by_profile(pr) * math.prod(mD[c - 1] for c in pr.sizes)
                for pr in profiles(n, ell)
            )
            for ell in range(1, n + 1)
        )
        cB = FreeCumulantSequence(tuple(beta ** (k - 1) for k in range(1, n + 1)))
        via_product = free_multiply(cB, MomentSequence(mD[:n]), n)
        assert via_product.moment(n) == pytest.approx(direct, rel=1e-11)


# ------------------------------------------------------------- aem_table


def test_aem_table_dispatch_and_labels():
    t = aem_table("cs", 1.0, 5)
    assert t.values == pytest.approx((1.0, 2.0, 5.0, 14.0, 42.0))
    ca = aem_table("ca", 0.5, 2, W=SRRC05_W)
    assert ca.moment(2) == pytest.approx(1.4375)
    with pytest.raises(ValueError):
        aem_table("ca", 0.5, 2)
    with pytest.raises(ValueError):
        aem_table("nope", 0.5, 2)
    with pytest.raises(ValueError):
        aem_table("cs", -1.0, 2)


def test_moment_sequence_accessors():
    m = MomentSequence((1.0, 2.0), label="x")
    assert m.moment(0) == 1.0
    with pytest.raises(ValueError):
        m.moment(3)
    assert m.to_rows() == [(1, 1.0), (2, 2.0)]
    assert "x" in m.to_json()
