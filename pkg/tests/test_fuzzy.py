import itertools

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from frri.fuzzy import (ContractError, DegenerateSystemError, Implicator, RelationKind, TNorm,
                        attribute_relation, b_indiscernibility, dominance, gamma, implicator_apply,
                        indiscernibility, lower_approximation, positive_region, tnorm_apply,
                        upper_approximation)

from conftest import make_ds, random_ds

unit = st.floats(0.0, 1.0, allow_nan=False)


# ---- hand-checked values -------------------------------------------------

def test_tnorm_examples():
    assert tnorm_apply("minimum", 0.3, 0.7) == 0.3
    for t in TNorm:
        assert tnorm_apply(t, 1.0, 0.42) == pytest.approx(0.42, abs=1e-15)
    assert tnorm_apply(TNorm.LUKASIEWICZ, 0.6, 0.7) == pytest.approx(0.3, abs=1e-12)
    assert tnorm_apply(TNorm.PRODUCT, 0.5, 0.4) == pytest.approx(0.2)


def test_implicator_examples():
    for i in Implicator:
        assert implicator_apply(i, 1.0, 0.0) == 0.0
        assert implicator_apply(i, 0.0, 0.0) == 1.0
        assert implicator_apply(i, 0.0, 1.0) == 1.0
        assert implicator_apply(i, 1.0, 1.0) == 1.0
    assert implicator_apply("lukasiewicz", 0.6, 0.2) == pytest.approx(0.6)
    assert implicator_apply("kleene-dienes", 0.6, 0.2) == pytest.approx(0.4)
    assert implicator_apply("godel", 0.6, 0.2) == 0.2
    assert implicator_apply("godel", 0.2, 0.6) == 1.0


@pytest.mark.parametrize("bad", [(-0.1, 0.5), (0.5, 1.01), (float("nan"), 0.2)])
def test_connectives_reject_out_of_range(bad):
    with pytest.raises(ContractError):
        tnorm_apply("minimum", *bad)
    with pytest.raises(ContractError):
        implicator_apply("lukasiewicz", *bad)


def test_relation_examples():
    assert indiscernibility(0.2, 0.5) == pytest.approx(0.7)
    assert indiscernibility(0.0, 1.0) == 0.0
    assert indiscernibility(0.37, 0.37) == 1.0
    assert dominance(0.5, 0.2) == 1.0
    assert dominance(0.2, 0.5) == pytest.approx(0.7)
    assert dominance(0.81, 0.81) == 1.0
    # scaled relations
    assert indiscernibility(0.2, 0.5, scale=0.5) == pytest.approx(0.4)
    assert indiscernibility(0.2, 0.9, scale=0.5) == 0.0
    assert dominance(0.2, 0.5, scale=0.5) == pytest.approx(0.4)
    with pytest.raises(ContractError):
        indiscernibility(0.2, 1.5)
    with pytest.raises(ContractError):
        dominance(0.2, 0.5, scale=0.0)


def test_b_indiscernibility_two_attribute_example():
    ds = make_ds([[0.0, 0.0], [0.3, 0.5]], ["a", "b"])
    R = b_indiscernibility(ds, [0, 1])
    assert R[0, 1] == pytest.approx(0.5)
    assert R[1, 0] == pytest.approx(0.5)
    np.testing.assert_array_equal(np.diag(R), 1.0)
    np.testing.assert_array_equal(b_indiscernibility(ds, [1]), attribute_relation(ds.values[:, 1]))
    with pytest.raises(ContractError):
        b_indiscernibility(ds, [])


def test_approximation_examples():
    R = np.array([[1.0, 0.6], [0.6, 1.0]])
    assert lower_approximation([1.0, 0.2], R, "lukasiewicz")[0] == pytest.approx(0.6)
    assert upper_approximation([0.0, 1.0], R, "minimum")[0] == pytest.approx(0.6)
    np.testing.assert_array_equal(lower_approximation(np.ones(2), R), 1.0)
    np.testing.assert_array_equal(upper_approximation(np.zeros(2), R), 0.0)
    A = np.array([0.3, 0.9, 0.1])
    eye = np.eye(3)
    for i in Implicator:
        np.testing.assert_allclose(lower_approximation(A, eye, i), A)
    for t in TNorm:
        np.testing.assert_allclose(upper_approximation(A, eye, t), A)
    with pytest.raises(ContractError):
        lower_approximation(np.ones(3), R)


def test_positive_region_examples():
    # one attribute with R(u, v) = 0.6 between objects of different classes
    ds = make_ds([[0.0], [0.4]], ["a", "b"])
    pos = positive_region(ds, [0], "minimum", "lukasiewicz")
    np.testing.assert_allclose(pos, [0.4, 0.4])
    assert gamma(ds, [0]) == pytest.approx(1.0)
    same = make_ds([[0.0], [0.4], [0.9]], ["a", "a", "a"])
    np.testing.assert_array_equal(positive_region(same, [0]), 1.0)
    crisp = make_ds([[0.0], [1.0]], ["a", "b"])
    np.testing.assert_array_equal(positive_region(crisp, [0]), 1.0)


def test_gamma_two_attribute_sigma_count():
    # attribute 1 separates the classes crisply, so POS_A = (1, 1)
    ds = make_ds([[0.0, 0.0], [0.4, 1.0]], ["a", "b"])
    assert gamma(ds, [0, 1]) == 1.0
    # B = {a1}: POS_B = (0.4, 0.4), so gamma = (0.4 + 0.4) / 2
    assert gamma(ds, [0]) == pytest.approx(0.4)


def test_gamma_degenerate():
    ds = make_ds([[0.5], [0.5]], ["a", "b"])
    with pytest.raises(DegenerateSystemError):
        gamma(ds, [0])


# ---- connective laws -----------------------------------------------------

@given(unit, unit, unit)
def test_tnorm_laws(a, b, c):
    for t in TNorm:
        assert tnorm_apply(t, 1.0, a) == pytest.approx(a, abs=1e-15)
        assert tnorm_apply(t, a, b) == tnorm_apply(t, b, a)
        left = tnorm_apply(t, tnorm_apply(t, a, b), c)
        right = tnorm_apply(t, a, tnorm_apply(t, b, c))
        assert left == pytest.approx(right, abs=1e-12)
        lo, hi = min(b, c), max(b, c)
        assert tnorm_apply(t, a, lo) <= tnorm_apply(t, a, hi) + 1e-15


@given(unit, unit, unit)
def test_implicator_laws(a, b, c):
    lo, hi = min(b, c), max(b, c)
    for i in Implicator:
        assert implicator_apply(i, 1.0, a) == pytest.approx(a, abs=1e-15)
        # decreasing in the first argument, increasing in the second
        assert implicator_apply(i, hi, a) <= implicator_apply(i, lo, a) + 1e-15
        assert implicator_apply(i, a, lo) <= implicator_apply(i, a, hi) + 1e-15
        assert 0.0 <= implicator_apply(i, a, b) <= 1.0


@settings(max_examples=50)
@given(st.lists(unit, min_size=1, max_size=8))
def test_relation_matrix_shape_properties(col):
    col = np.array(col)
    R = attribute_relation(col)
    np.testing.assert_array_equal(np.diag(R), 1.0)
    np.testing.assert_array_equal(R, R.T)
    assert R.min() >= 0.0 and R.max() <= 1.0
    D = attribute_relation(col, RelationKind.DOMINANCE)
    np.testing.assert_array_equal(np.diag(D), 1.0)
    assert D.min() >= 0.0 and D.max() <= 1.0


# ---- direct-enumeration oracle -------------------------------------------

def _oracle(values, labels, B, t, i, scale=1.0):
    """Triple loops over objects using scalar connectives only."""
    n = len(labels)

    def rel(u, v, attrs):
        out = 1.0
        for a in attrs:
            out = tnorm_apply(t, out, indiscernibility(values[u][a], values[v][a], scale))
        return out

    def pos(attrs):
        return [min(implicator_apply(i, rel(u, v, attrs), 1.0 if labels[v] == labels[u] else 0.0)
                    for v in range(n)) for u in range(n)]

    full = sum(pos(range(len(values[0]))))
    return pos(B), (sum(pos(B)) / full if full > 0 else None)


def test_brute_force_equivalence(rng):
    for case in range(200):
        n_obj, n_att = rng.integers(2, 7), rng.integers(1, 5)
        ds = random_ds(rng, n_obj, n_att, n_cls=rng.integers(1, 4))
        t, i = list(TNorm)[case % 3], list(Implicator)[(case // 3) % 3]
        B = sorted(rng.choice(n_att, rng.integers(1, n_att + 1), replace=False).tolist())
        R = b_indiscernibility(ds, B, t=t)
        A = rng.random(n_obj)
        low = lower_approximation(A, R, i)
        up = upper_approximation(A, R, t)
        for u in range(n_obj):
            assert abs(low[u] - min(implicator_apply(i, R[u, v], A[v]) for v in range(n_obj))) <= 1e-12
            assert abs(up[u] - max(tnorm_apply(t, R[u, v], A[v]) for v in range(n_obj))) <= 1e-12
        pos_ref, gamma_ref = _oracle(ds.values.tolist(), list(ds.labels), B, t, i)
        assert np.max(np.abs(positive_region(ds, B, t, i) - pos_ref)) <= 1e-12
        if gamma_ref is None:
            with pytest.raises(DegenerateSystemError):
                gamma(ds, B, t, i)
        else:
            assert abs(gamma(ds, B, t, i) - gamma_ref) <= 1e-12


def test_sandwich_and_monotone_in_A(rng):
    for _ in range(200):
        n = rng.integers(1, 8)
        R = rng.random((n, n))
        np.fill_diagonal(R, 1.0)
        A = rng.random(n)
        A2 = np.minimum(1.0, A + rng.random(n) * 0.3)
        for i, t in itertools.product(Implicator, TNorm):
            assert np.all(lower_approximation(A, R, i) <= A + 1e-12)
            assert np.all(A <= upper_approximation(A, R, t) + 1e-12)
            assert np.all(lower_approximation(A, R, i) <= lower_approximation(A2, R, i) + 1e-12)
            assert np.all(upper_approximation(A, R, t) <= upper_approximation(A2, R, t) + 1e-12)


def test_gamma_monotone_along_chains(rng):
    for _ in range(100):
        ds = random_ds(rng, rng.integers(3, 10), 5, n_cls=3)
        perm = rng.permutation(5).tolist()
        try:
            values = [gamma(ds, perm[:k]) for k in range(1, 6)]
        except DegenerateSystemError:
            continue
        assert all(a <= b + 1e-12 for a, b in zip(values, values[1:]))
        assert values[-1] == pytest.approx(1.0, abs=1e-12)
