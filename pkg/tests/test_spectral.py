import cmath
import math

import numpy as np
import pytest

from qidlaw import (BasisCollision, GridTooCoarse, NotQID, SearchBudget, bernoulli,
                    bohr_coefficient, decompose, detect_generating_basis, detect_lattice, dirac,
                    eval_cf, eval_from_spectrum, geometric, make_law, poisson, spectrum_lattice,
                    spectrum_torus, uniform)

SQRT2 = math.sqrt(2.0)


def mercator(r, n):
    return (-1) ** (n + 1) * r ** n / n


@pytest.mark.parametrize("p", [0.1, 0.25, 0.4])
def test_bernoulli_below_half(p):
    spec = spectrum_lattice(bernoulli(p))
    r = p / (1 - p)
    assert spec.gamma0 == 0.0
    assert spec.winding == (0,)
    for n in range(1, 21):
        assert spec.at_index(n) == pytest.approx(mercator(r, n), abs=1e-12)
    assert spec.at_index(-1) == 0.0
    # log f(0) = 0 forces sum lam = -log q
    assert math.fsum(spec.lam) == pytest.approx(-math.log(1 - p), abs=1e-12)


def test_bernoulli_above_half_winds_once():
    spec = spectrum_lattice(bernoulli(0.75))
    assert spec.gamma0 == pytest.approx(1.0, abs=1e-15)
    assert spec.winding == (1,)
    for n in range(1, 21):
        assert spec.at_index(-n) == pytest.approx(mercator(1 / 3, n), abs=1e-12)
        assert spec.at_index(n) == 0.0


def test_poisson_single_coefficient():
    spec = spectrum_lattice(poisson(2.0))
    assert spec.at_index(1) == pytest.approx(2.0, abs=1e-10)
    others = np.delete(spec.lam, np.nonzero(spec.index[:, 0] == 1)[0])
    assert np.all(np.abs(others) < 1e-10)


def test_geometric_is_infinitely_divisible():
    spec = spectrum_lattice(geometric(0.5))
    for n in range(1, 30):
        assert spec.at_index(n) == pytest.approx(0.5 ** n / n, abs=1e-12)
    assert np.all(spec.lam >= 0.0)


def test_dirac_has_empty_spectrum():
    spec = spectrum_lattice(dirac(3.0))
    assert spec.gamma0 == 3.0
    assert spec.u.size == 0 and spec.l1_norm == 0.0


def test_shifted_lattice_drift():
    law = bernoulli(0.25, low=2.0, high=2.5)
    spec = spectrum_lattice(law)
    assert spec.gamma0 == pytest.approx(2.0)
    assert spec.coefficient(0.5) == pytest.approx(1 / 3, abs=1e-12)
    t = np.linspace(-30, 30, 2001)
    assert np.max(np.abs(eval_from_spectrum(spec, t) - eval_cf(law, t))) < 1e-12


def test_frequencies_lie_on_the_lattice(qid_lattice_law):
    spec = spectrum_lattice(qid_lattice_law)
    lat = detect_lattice(qid_lattice_law)
    assert np.allclose(spec.u, spec.index[:, 0] * lat.span, rtol=0, atol=1e-12)
    assert 0 not in spec.index[:, 0].tolist()
    assert spec.l1_norm == pytest.approx(np.abs(spec.lam).sum())
    assert spec.truncation_bound < 1e-8


def test_round_trip_on_period_grid(qid_lattice_law):
    spec = spectrum_lattice(qid_lattice_law)
    h = detect_lattice(qid_lattice_law).span
    t = np.linspace(0, 2 * math.pi / h, 4096)
    assert np.max(np.abs(eval_from_spectrum(spec, t) - eval_cf(qid_lattice_law, t))) < 1e-8


def test_explicit_fft_length_is_respected_or_doubled():
    spec = spectrum_lattice(bernoulli(0.25), n_fft=256)
    assert spec.n_grid >= 256
    assert spec.at_index(5) == pytest.approx(mercator(1 / 3, 5), abs=1e-12)


def test_fft_cap_too_small_raises():
    law = bernoulli(0.49)
    with pytest.raises(GridTooCoarse):
        spectrum_lattice(law, n_fft=8, max_n_fft=16)


def test_non_qid_law_refused():
    with pytest.raises(NotQID):
        spectrum_lattice(bernoulli(0.5))
    with pytest.raises(NotQID):
        decompose(uniform([0, 1, 2]))


def test_bohr_matches_fft():
    for law in (poisson(2.0), bernoulli(0.25)):
        spec = spectrum_lattice(law)
        for n in range(1, 6):
            b = bohr_coefficient(law, float(n), math.pi, 4097)
            assert b.real == pytest.approx(spec.at_index(n), abs=1e-9)
            assert abs(b.imag) < 1e-9


@pytest.mark.parametrize("k", [1, 4])
def test_bohr_drift_term_has_no_mean(k):
    # the windowed mean of i t gamma0 exp(-iut) is -gamma0 cos(uT)/u for every T
    T, u = k * math.pi, -1.0
    law = bernoulli(0.75)
    b = bohr_coefficient(law, u, T, 4096 * k + 1)
    assert b.real == pytest.approx(1 / 3 - math.cos(u * T) / u, abs=1e-6)
    b = bohr_coefficient(law, u, T, 4096 * k + 1, drift=1.0)
    assert b.real == pytest.approx(1 / 3, abs=1e-9)


def test_torus_bivariate_series():
    law = make_law([(0.0, 0.8), (1.0, 0.1), (SQRT2, 0.1)])
    basis = detect_generating_basis(law)
    spec = spectrum_torus(law, basis, n_grid=256)
    assert spec.coefficient(1.0) == pytest.approx(0.125, abs=1e-8)
    assert spec.coefficient(SQRT2) == pytest.approx(0.125, abs=1e-8)
    assert spec.coefficient(1.0 + SQRT2) == pytest.approx(-0.015625, abs=1e-8)
    assert spec.coefficient(2.0) == pytest.approx(-1 / 128, abs=1e-8)
    assert spec.gamma0 == 0.0
    t = np.linspace(-50, 50, 5001)
    assert np.max(np.abs(eval_from_spectrum(spec, t) - eval_cf(law, t))) < 1e-6


def test_one_generator_torus_equals_lattice():
    law = bernoulli(0.25)
    basis = detect_generating_basis(law)
    a = spectrum_torus(law, basis)
    b = spectrum_lattice(law)
    for n in range(1, 15):
        assert a.coefficient(float(n)) == pytest.approx(b.at_index(n), abs=1e-13)


def test_decompose_dispatch():
    _, spec = decompose(poisson(2.0))
    assert spec.structure.span == pytest.approx(1.0)
    v, spec = decompose(make_law([(0.0, 0.8), (1.0, 0.1), (SQRT2, 0.1)]), SearchBudget())
    assert spec.structure.dim == 2 and v.mu == pytest.approx(0.6, abs=1e-6)


def test_eval_from_spectrum_closed_form():
    spec = spectrum_lattice(bernoulli(0.25))
    t = 0.7
    assert eval_from_spectrum(spec, t) == pytest.approx(0.75 + 0.25 * cmath.exp(1j * t), abs=1e-14)


def test_bohr_off_module_frequency_decays():
    law = poisson(2.0)
    u = 1e6 * math.sqrt(17.0)
    small = abs(bohr_coefficient(law, u, 10 * math.pi, 2 ** 22 + 1))
    assert small < 1e-3


def test_bohr_point_mass_boundary_term():
    # log f = i a t has windowed mean a sin(uT)/(T u^2) - a cos(uT)/u: bounded, not decaying
    a, u = 3.0, 1.5
    for T in (8 * math.pi, 8 * math.pi + 1.0):
        exact = a * math.sin(u * T) / (T * u * u) - a * math.cos(u * T) / u
        b = bohr_coefficient(dirac(a), u, T, 2 ** 18 + 1)
        assert b.real == pytest.approx(exact, abs=1e-7)
        assert abs(bohr_coefficient(dirac(a), u, T, 2 ** 10 + 1, drift=a)) < 1e-12


def test_eval_from_spectrum_examples():
    assert eval_from_spectrum(spectrum_lattice(poisson(2.0)), math.pi) == pytest.approx(math.exp(-4), abs=1e-14)
    spec = spectrum_lattice(dirac(2.5))
    assert eval_from_spectrum(spec, 1.3) == pytest.approx(cmath.exp(2.5j * 1.3), abs=1e-15)
    spec = spectrum_lattice(bernoulli(0.25))
    assert eval_from_spectrum(spec, 1.0) == pytest.approx(eval_cf(bernoulli(0.25), 1.0), abs=1e-10)


def test_spectrum_invariants(qid_lattice_law):
    spec = spectrum_lattice(qid_lattice_law)
    assert np.all(np.abs(spec.lam) >= 1e-14)
    assert spec.imag_max <= 1e-9
    assert abs(spec.l1_norm - np.abs(spec.lam).sum()) <= 1e-12
    assert np.all(np.diff(spec.u) > 0)


def test_coefficient_decay_is_geometric():
    spec = spectrum_lattice(bernoulli(0.4))
    n = spec.index[:, 0]
    # |lam_n| = r^n / n: remove the harmonic factor, then the fit is a line
    slope, _ = np.polyfit(n, np.log(np.abs(spec.lam) * n), 1)
    assert math.exp(slope) == pytest.approx(2 / 3, rel=1e-6)
    assert spec.truncation_bound >= 0.0


def test_bohr_long_window_poisson():
    b = bohr_coefficient(poisson(2.0), 1.0, 100 * math.pi, 2 ** 20)
    assert b.real == pytest.approx(2.0, abs=1e-9)
