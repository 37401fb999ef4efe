import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from qidlaw import (DuplicateAtom, EmptySupport, LawError, MassNotNormalized, bernoulli,
                    detect_generating_basis, detect_lattice, dirac, geometric, make_law, poisson,
                    uniform)

SQRT2 = math.sqrt(2.0)


def test_make_law_sorts_and_drops_zero_mass():
    law = make_law([(2.0, 0.5), (0.0, 0.0), (1.0, 0.5)])
    assert law.x.tolist() == [1.0, 2.0]
    assert law.p.tolist() == [0.5, 0.5]


def test_arrays_are_read_only():
    law = bernoulli(0.3)
    with pytest.raises(ValueError):
        law.p[0] = 1.0


@pytest.mark.parametrize("pairs, err", [
    ([(0.0, 0.5), (0.0, 0.5)], DuplicateAtom),
    ([(0.0, 0.5), (1.0, 0.4)], MassNotNormalized),
    ([(0.0, 1.5), (1.0, -0.5)], LawError),
    ([(0.0, float("nan"))], LawError),
    ([(float("inf"), 1.0)], LawError),
    ([], EmptySupport),
])
def test_make_law_rejects(pairs, err):
    with pytest.raises(err):
        make_law(pairs)


def test_tail_mass_counts_towards_total():
    law = make_law([(0.0, 0.5), (1.0, 0.4)], tail_mass=0.1)
    assert law.tail_mass == pytest.approx(0.1)


def test_constructors():
    assert dirac(3.0).atoms == [(3.0, 1.0)]
    assert uniform([0, 1, 2]).p.tolist() == pytest.approx([1 / 3] * 3)
    law = poisson(2.0)
    assert law.p[1] == pytest.approx(2 * math.exp(-2.0), rel=1e-14)
    assert math.fsum(law.p) + law.tail_mass == pytest.approx(1.0, abs=1e-14)
    g = geometric(0.5)
    assert g.p[:3].tolist() == pytest.approx([0.5, 0.25, 0.125])


finite = st.floats(-1e3, 1e3, allow_nan=False)


@settings(max_examples=60, deadline=None)
@given(st.lists(st.tuples(finite, st.floats(1e-3, 1.0)), min_size=1, max_size=8,
                unique_by=lambda a: a[0]))
def test_make_law_idempotent(raw):
    total = math.fsum(p for _, p in raw)
    law = make_law([(x, p / total) for x, p in raw])
    again = make_law(law.atoms, law.tail_mass)
    assert again == law


def test_lattice_integer_support():
    lat = detect_lattice(make_law([(0, .25), (1, .25), (2, .25), (5, .25)]))
    assert lat.offset == 0.0 and lat.span == pytest.approx(1.0)
    assert lat.indices == (0, 1, 2, 5)


def test_lattice_shifted_rational():
    lat = detect_lattice(uniform([0.5, 2.0, 3.5]))
    assert lat.offset == 0.5
    assert lat.span == pytest.approx(1.5, abs=1e-15)
    assert lat.indices == (0, 1, 2)
    assert np.allclose(lat.positions(), [0.5, 2.0, 3.5])


def test_lattice_single_atom_has_unit_span():
    lat = detect_lattice(dirac(3.0))
    assert lat.span == 1.0 and lat.indices == (0,)


def test_irrational_support_is_not_lattice():
    assert detect_lattice(uniform([0.0, 1.0, SQRT2])) is None


def test_generating_basis_sqrt2():
    basis = detect_generating_basis(uniform([0.0, 1.0, SQRT2, 1.0 + SQRT2]))
    assert basis.dim == 2
    assert np.allclose(sorted(basis.generators), [1.0, SQRT2])
    assert np.allclose(basis.reconstruct(), [0.0, 1.0, SQRT2, 1.0 + SQRT2], atol=1e-12)


def test_generating_basis_rejects_too_many_generators():
    assert detect_generating_basis(uniform([0.0, 1.0, math.pi, math.e]), d_max=2) is None


def test_generating_basis_for_lattice_law_is_one_dimensional():
    basis = detect_generating_basis(poisson(2.0))
    assert basis.dim == 1
    assert np.allclose(basis.reconstruct(), poisson(2.0).x)


def test_truncated_poisson_by_hand():
    pairs = [(k, math.exp(-2.0) * 2.0 ** k / math.factorial(k)) for k in range(41)]
    tail = 1.0 - math.fsum(p for _, p in pairs)
    law = make_law(pairs, tail)
    assert law.size == 41 and law.tail_mass < 1e-12


@pytest.mark.parametrize("law", [poisson(2.0), uniform([0.5, 2.0, 3.5]), uniform([-0.3, 0.1, 0.9]),
                                 uniform([SQRT2, 1 + SQRT2, 3 + SQRT2])])
def test_lattice_residual_and_basis(law):
    lat = detect_lattice(law)
    idx = np.asarray(lat.indices)
    assert math.gcd(*idx.tolist()) == 1 or len(idx) == 1
    assert np.all(np.abs((law.x - lat.offset) / lat.span - idx) <= 1e-9)
    basis = detect_generating_basis(law)
    assert basis.dim in (1, 2)
    assert np.all(np.abs(basis.reconstruct() - law.x) <= 1e-9 * np.maximum(1, np.abs(law.x)))


def test_irrational_offset_needs_two_generators():
    basis = detect_generating_basis(uniform([SQRT2, 1 + SQRT2, 3 + SQRT2]))
    assert basis.dim == 2
