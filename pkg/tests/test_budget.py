import itertools
import math

import numpy as np
import pytest
import sympy
from hypothesis import given, settings
from hypothesis import strategies as st

from ldp_slicing.budget import (
    BudgetAllocation,
    WeightTable,
    allocate,
    solve_numeric,
    uniform_allocation,
)
from ldp_slicing.errors import InvalidInputError, NumericFailure

weight = st.floats(0.01, 100.0)
tables = st.builds(
    lambda cw, bw: WeightTable(tuple(f"c{i}" for i in range(len(cw))), tuple(cw), tuple(bw)),
    st.lists(weight, min_size=1, max_size=4),
    st.lists(weight, min_size=1, max_size=8),
)


def test_default_weights():
    w = WeightTable()
    assert w.channels == ("Y", "Cb", "Cr")
    assert w.channel_weights == (4.0, 1.0, 1.0)
    assert w.bit_weights == tuple(2.0 ** (b - 1) for b in range(1, 9))
    assert w.matrix[0, 7] == 512.0 and w.matrix[2, 0] == 1.0


def test_invalid_weights():
    with pytest.raises(InvalidInputError):
        WeightTable(("Y",), (0.0,))
    with pytest.raises(InvalidInputError):
        WeightTable(("Y", "Cb"), (1.0,))


def test_zero_budget():
    a = allocate(0.0)
    assert not a.epsilons.any()


def test_negative_budget_rejected():
    with pytest.raises(InvalidInputError):
        allocate(-1.0)
    with pytest.raises(InvalidInputError):
        solve_numeric(0.0)


def test_uniform_bit_weights_split_evenly():
    w = WeightTable(("GRAY",), (1.0,), (1.0,) * 8)
    assert np.allclose(allocate(12.0, w).epsilons, 1.5, rtol=0, atol=1e-15)


def test_default_color_allocation_exact():
    # Exact symbolic evaluation of the closed form for the Y MSB at eps_total = 20.
    roots = [sympy.sqrt(c * 2**k) for c in (4, 1, 1) for k in range(8)]
    denom = sympy.nsimplify(sum(roots))
    y8 = 20 * sympy.sqrt(4 * 128) / denom
    assert float(denom) == pytest.approx(144.85281374238570, abs=1e-12)
    assert float(y8) == pytest.approx(3.1241943340101600, abs=1e-12)
    a = allocate(20.0)
    assert a.get("Y", 8) == pytest.approx(float(y8), abs=1e-12)
    assert solve_numeric(20.0).get("Y", 8) == pytest.approx(float(y8), abs=1e-9)


def test_sum_constraint_and_positivity():
    a = allocate(20.0)
    assert abs(a.epsilons.sum() - 20.0) <= 1e-9
    assert (a.epsilons > 0).all()
    assert a.composed_epsilon == math.fsum(a.epsilons.ravel())


def test_monotone_in_weights():
    a = allocate(20.0)
    W = a.weights.matrix.ravel()
    e = a.epsilons.ravel()
    for i, j in itertools.permutations(range(W.size), 2):
        if W[i] > W[j]:
            assert e[i] > e[j]


def test_perturbation_increases_objective():
    a = allocate(20.0)
    base = a.objective()
    flat = a.epsilons.ravel()
    for i, j in itertools.permutations(range(flat.size), 2):
        moved = flat.copy()
        moved[i] += 0.01
        moved[j] -= 0.01
        perturbed = BudgetAllocation(20.0, moved.reshape(a.epsilons.shape), a.weights)
        assert perturbed.objective() > base


def test_single_plane_gets_everything():
    w = WeightTable(("GRAY",), (3.0,), (5.0,))
    assert solve_numeric(7.5, w).epsilons.tolist() == [[7.5]]
    assert allocate(7.5, w).epsilons.tolist() == [[7.5]]


def test_numeric_failure_on_exhausted_iterations():
    with pytest.raises(NumericFailure):
        solve_numeric(20.0, max_iter=2)


@settings(max_examples=100, deadline=None)
@given(tables, st.floats(1e-3, 1e3))
def test_closed_form_matches_numeric_oracle(w, eps):
    closed = allocate(eps, w)
    numeric = solve_numeric(eps, w)
    assert np.max(np.abs(closed.epsilons - numeric.epsilons)) <= 1e-6
    assert numeric.objective() == pytest.approx(closed.objective(), rel=1e-8)
    assert abs(closed.epsilons.sum() - eps) <= 1e-9


@settings(max_examples=100, deadline=None)
@given(tables, st.floats(1e-3, 1e3))
def test_kkt_stationarity(w, eps):
    a = allocate(eps, w)
    lam = w.matrix / a.epsilons**2
    assert np.ptp(lam) <= 1e-6 * lam.mean()


@settings(max_examples=50, deadline=None)
@given(tables, st.floats(0.0, 1e3), st.integers(-10, 10))
def test_homogeneous_in_budget(w, eps, k):
    scale = 2.0**k
    assert np.array_equal(allocate(scale * eps, w).epsilons, scale * allocate(eps, w).epsilons)


@settings(max_examples=50, deadline=None)
@given(tables, st.floats(0.1, 100.0), st.floats(1e-3, 1e3))
def test_scale_invariant_in_weights(w, eps, c):
    scaled = WeightTable(w.channels, tuple(c * x for x in w.channel_weights), w.bit_weights)
    assert np.allclose(allocate(eps, scaled).epsilons, allocate(eps, w).epsilons, rtol=1e-13, atol=0)


def test_alternate_channel_ratios():
    for ratio in ((2, 1, 1), (1, 1, 1)):
        a = allocate(20.0, WeightTable.color(ratio))
        assert a.weights.channel_weights == tuple(float(r) for r in ratio)
        assert abs(a.epsilons.sum() - 20.0) <= 1e-9
    flat = allocate(20.0, WeightTable.color((1, 1, 1)))
    assert np.allclose(flat.epsilons[0], flat.epsilons[1])


def test_optimised_beats_uniform():
    assert allocate(20.0).objective() < uniform_allocation(20.0).objective()


def test_gray_table():
    a = allocate(8.0, WeightTable.gray())
    assert a.channels == ("GRAY",) and a.epsilons.shape == (1, 8)
