"""Polynomial systems: evaluation, differentiation, substitution, squaring,
generators, and the text format.

Derivative checks use an independent central finite-difference oracle;
expand_substitution is checked against composed evaluation.
"""

import numpy as np
import pytest

from witness_sampler import polysys
from witness_sampler.errors import (DimensionError, OrthonormalityError,
                                    ParseError)

RNG = np.random.default_rng(20260814)


def random_point(n, rng=RNG):
    return rng.standard_normal(n) + 1j * rng.standard_normal(n)


def fd_jacobian(f, x, h=1e-6):
    """Central-difference Jacobian; valid for polynomials because they are
    holomorphic, so the real-step difference approximates the complex
    derivative."""
    out = np.zeros((f.m, f.n), np.complex128)
    for j in range(f.n):
        e = np.zeros(f.n, np.complex128)
        e[j] = h
        out[:, j] = (polysys.evaluate(f, x + e)
                     - polysys.evaluate(f, x - e)) / (2.0 * h)
    return out


# ---------------------------------------------------------------------------
# evaluate
# ---------------------------------------------------------------------------

def test_evaluate_minors3_common_zero():
    f = polysys.adjacent_minors(3)
    vals = polysys.evaluate(f, np.ones(6, np.complex128))
    assert np.allclose(vals, 0.0, atol=1e-15)


def test_evaluate_minors3_hand_values():
    f = polysys.adjacent_minors(3)
    x = np.array([1, 2, 3, 4, 5, 6], np.complex128)
    vals = polysys.evaluate(f, x)
    assert np.allclose(vals, [-3.0, -3.0], atol=1e-14)


def test_evaluate_empty_system():
    f = polysys.PolySystem([], 3)
    vals = polysys.evaluate(f, np.zeros(3, np.complex128))
    assert vals.shape == (0,)


def test_evaluate_dimension_mismatch():
    f = polysys.adjacent_minors(3)
    with pytest.raises(DimensionError):
        polysys.evaluate(f, np.zeros(5, np.complex128))


# ---------------------------------------------------------------------------
# jacobian
# ---------------------------------------------------------------------------

def test_jacobian_product_rule():
    f = polysys.PolySystem([[(1.0, (1, 1))]], 2)
    jac = polysys.jacobian(f, np.array([2.0, 3.0], np.complex128))
    assert np.allclose(jac, [[3.0, 2.0]], atol=1e-15)


def test_jacobian_minors3_hand_row():
    f = polysys.adjacent_minors(3)
    x = np.array([1, 2, 3, 4, 5, 6], np.complex128)
    jac = polysys.jacobian(f, x)
    assert np.allclose(jac[0], [5, -4, 0, -2, 1, 0], atol=1e-14)


@pytest.mark.parametrize("make", [
    lambda: polysys.adjacent_minors(3),
    lambda: polysys.adjacent_minors(5),
    lambda: polysys.cyclic_roots(4),
    lambda: polysys.cyclic_roots(8),
    lambda: polysys.random_sparse_hypersurface(6, 5, 4, seed=7),
])
def test_jacobian_matches_finite_differences(make):
    f = make()
    for _ in range(20):
        x = random_point(f.n)
        jac = polysys.jacobian(f, x)
        ref = fd_jacobian(f, x)
        scale = max(np.abs(ref).max(), 1.0)
        assert np.abs(jac - ref).max() <= 1e-6 * scale


# ---------------------------------------------------------------------------
# restrict
# ---------------------------------------------------------------------------

def test_restrict_coordinate_plane():
    f = polysys.adjacent_minors(2)
    basis = np.zeros((4, 2), np.complex128)
    basis[0, 0] = 1.0
    basis[1, 1] = 1.0
    g = polysys.restrict(f, np.zeros(4, np.complex128), basis)
    xi = np.array([2.0, 5.0], np.complex128)
    padded = np.array([2.0, 5.0, 0.0, 0.0], np.complex128)
    assert np.allclose(g.evaluate(xi), polysys.evaluate(f, padded))


def test_restrict_eval_at_zero_is_offset_value():
    f = polysys.cyclic_roots(4)
    offset = random_point(4)
    basis = np.linalg.qr(random_point(4).reshape(4, 1))[0]
    g = polysys.restrict(f, offset, basis)
    assert np.allclose(g.evaluate(np.zeros(1, np.complex128)),
                       polysys.evaluate(f, offset))


def test_restrict_jacobian_matches_finite_differences():
    f = polysys.adjacent_minors(3)
    offset = random_point(6)
    basis = np.linalg.qr(
        RNG.standard_normal((6, 2)) + 1j * RNG.standard_normal((6, 2)))[0]
    g = polysys.restrict(f, offset, basis)
    for _ in range(5):
        xi = random_point(2)
        jac = g.jacobian(xi)
        ref = np.zeros((2, 2), np.complex128)
        h = 1e-6
        for j in range(2):
            e = np.zeros(2, np.complex128)
            e[j] = h
            ref[:, j] = (g.evaluate(xi + e) - g.evaluate(xi - e)) / (2 * h)
        scale = max(np.abs(ref).max(), 1.0)
        assert np.abs(jac - ref).max() <= 1e-6 * scale


def test_restrict_rejects_non_orthonormal_basis():
    f = polysys.adjacent_minors(2)
    basis = np.full((4, 2), 0.5, np.complex128)
    with pytest.raises(OrthonormalityError):
        polysys.restrict(f, np.zeros(4, np.complex128), basis)


# ---------------------------------------------------------------------------
# expand_substitution
# ---------------------------------------------------------------------------

def test_expand_linear_case():
    b1, v1 = 2.0 + 1.0j, 0.5 - 0.25j
    f = polysys.PolySystem([[(1.0, (1,))]], 1)
    g = polysys.expand_substitution(
        f, np.array([b1], np.complex128),
        np.array([[v1]], np.complex128))
    assert g.n == 1 and g.m == 1
    coeffs = {mono.exponents: mono.coefficient for mono in g.equations[0]}
    assert coeffs[(0,)] == pytest.approx(b1)
    assert coeffs[(1,)] == pytest.approx(v1)


def test_expand_binomial_square():
    f = polysys.PolySystem([[(1.0, (2,))]], 1)
    g = polysys.expand_substitution(
        f, np.ones(1, np.complex128), np.ones((1, 1), np.complex128))
    coeffs = {mono.exponents: mono.coefficient for mono in g.equations[0]}
    assert coeffs[(0,)] == pytest.approx(1.0)
    assert coeffs[(1,)] == pytest.approx(2.0)
    assert coeffs[(2,)] == pytest.approx(1.0)


def _random_system(n, m, degree, rng):
    eqs = []
    for _ in range(m):
        terms = []
        for _ in range(6):
            budget = int(rng.integers(0, degree + 1))
            e = [0] * n
            for _ in range(budget):
                e[int(rng.integers(0, n))] += 1
            c = complex(rng.standard_normal() + 1j * rng.standard_normal())
            terms.append((c, tuple(e)))
        eqs.append(terms)
    return polysys.PolySystem(eqs, n)


def test_expand_agrees_with_composed_evaluation():
    rng = np.random.default_rng(5)
    f = _random_system(3, 2, 3, rng)
    b = rng.standard_normal(3) + 1j * rng.standard_normal(3)
    V = rng.standard_normal((3, 2)) + 1j * rng.standard_normal((3, 2))
    g = polysys.expand_substitution(f, b, V)
    assert g.n == 2
    for _ in range(20):
        xi = rng.standard_normal(2) + 1j * rng.standard_normal(2)
        direct = polysys.evaluate(f, b + V @ xi)
        expanded = polysys.evaluate(g, xi)
        scale = max(np.abs(direct).max(), 1.0)
        assert np.abs(expanded - direct).max() <= 1e-10 * scale


# ---------------------------------------------------------------------------
# square_system
# ---------------------------------------------------------------------------

def test_square_system_already_square():
    f = polysys.adjacent_minors(3)
    assert polysys.square_system(f, 2, seed=0) is f


def test_square_system_preserves_zeros():
    f = polysys.adjacent_minors(4)
    squared = polysys.square_system(f, 2, seed=3)
    assert squared.m == 2
    z = np.ones(8, np.complex128)
    assert np.linalg.norm(polysys.evaluate(f, z)) < 1e-12
    assert np.linalg.norm(polysys.evaluate(squared, z)) < 1e-10


def test_square_system_degree_graded_cyclic8():
    f = polysys.cyclic_roots(8)
    squared = polysys.square_system(f, 7, seed=0)
    assert squared.m == 7
    assert squared.degrees() == [8, 7, 6, 5, 4, 3, 2]
    # the top row may combine every input, so it carries the full product
    # term, the linear terms, and the constant
    degs = {mono.total_degree for mono in squared.equations[0]}
    assert {1, 8} <= degs
    product = 1
    for d in squared.degrees():
        product *= d
    assert product == 40320


def test_square_system_rejects_growth():
    f = polysys.adjacent_minors(3)
    with pytest.raises(DimensionError):
        polysys.square_system(f, 5, seed=0)


# ---------------------------------------------------------------------------
# generators
# ---------------------------------------------------------------------------

def test_adjacent_minors_shapes():
    f = polysys.adjacent_minors(3)
    assert f.n == 6 and f.m == 2
    f11 = polysys.adjacent_minors(11)
    assert f11.n == 22 and f11.m == 10
    assert f11.n - f11.m == 12


def test_adjacent_minors_two_columns():
    f = polysys.adjacent_minors(2)
    assert f.n == 4 and f.m == 1
    val = polysys.evaluate(f, np.array([1, 2, 3, 4], np.complex128))
    assert val[0] == pytest.approx(1 * 4 - 3 * 2)


def test_adjacent_minors_sparsity():
    for cols in (2, 3, 7):
        f = polysys.adjacent_minors(cols)
        assert f.m == cols - 1
        assert all(len(eq) == 2 for eq in f.equations)


def test_adjacent_minors_rejects_single_column():
    with pytest.raises(DimensionError):
        polysys.adjacent_minors(1)


def test_cyclic_roots_structure():
    f = polysys.cyclic_roots(8)
    assert f.m == 8
    assert f.degrees() == list(range(1, 9))
    vals = polysys.evaluate(f, np.ones(8, np.complex128))
    assert np.allclose(vals[:7], 8.0)
    assert vals[7] == pytest.approx(0.0)


def test_cyclic_roots_last_equation():
    f = polysys.cyclic_roots(4)
    coeffs = {mono.exponents: mono.coefficient for mono in f.equations[3]}
    assert coeffs == {(1, 1, 1, 1): 1.0, (0, 0, 0, 0): -1.0}


def test_cyclic_roots_rejects_tiny():
    with pytest.raises(DimensionError):
        polysys.cyclic_roots(1)


def test_hypersurface_structure():
    n, d, t = 5, 6, 4
    f = polysys.random_sparse_hypersurface(n, d, t, seed=2)
    assert f.m == 1
    terms = {mono.exponents: mono.coefficient for mono in f.equations[0]}
    lead = tuple([d] + [0] * (n - 1))
    assert terms[lead] == 1.0
    for i in range(n):
        e = [0] * n
        e[i] = 1
        assert tuple(e) in terms
    assert len(terms) <= 1 + t + n
    for exps, coeff in terms.items():
        if exps != lead and sum(exps) > 1:
            assert abs(abs(coeff) - 1.0) < 1e-15


def test_hypersurface_deterministic():
    a = polysys.random_sparse_hypersurface(6, 8, 5, seed=11)
    b = polysys.random_sparse_hypersurface(6, 8, 5, seed=11)
    assert a == b
    c = polysys.random_sparse_hypersurface(6, 8, 5, seed=12)
    assert a != c


def test_hypersurface_rejects_bad_sizes():
    with pytest.raises(DimensionError):
        polysys.random_sparse_hypersurface(0, 4, 2, seed=0)
    with pytest.raises(DimensionError):
        polysys.random_sparse_hypersurface(3, 1, 2, seed=0)


# ---------------------------------------------------------------------------
# text format
# ---------------------------------------------------------------------------

@pytest.mark.parametrize("make", [
    lambda: polysys.adjacent_minors(4),
    lambda: polysys.cyclic_roots(5),
    lambda: polysys.random_sparse_hypersurface(4, 5, 3, seed=9),
])
def test_format_parse_round_trip(make):
    f = make()
    assert polysys.parse_system(polysys.format_system(f)) == f


def test_parse_accepts_whitespace_and_comments():
    text = ("# provenance header\n"
            "  POLYSYS n=2   m=1 \n"
            "\n"
            "# equations follow\n"
            " (1,0)*x1*x2 + (-1,-2) \n")
    f = polysys.parse_system(text)
    assert f.n == 2 and f.m == 1
    val = polysys.evaluate(f, np.array([2.0, 3.0], np.complex128))
    assert val[0] == pytest.approx(6.0 - (1.0 + 2.0j))


def test_parse_reports_line_numbers():
    with pytest.raises(ParseError, match="line 1"):
        polysys.parse_system("garbage")
    with pytest.raises(ParseError, match="line 2"):
        polysys.parse_system("POLYSYS n=2 m=1\n(1,0)*x5\n")


def test_parse_missing_equations():
    with pytest.raises(ParseError):
        polysys.parse_system("POLYSYS n=2 m=3\n(1,0)*x1\n")
