"""Sparse multivariate polynomial systems over the complex numbers.

A system is a list of equations, each a list of monomials (coefficient plus
exponent row). Equations are normalized on construction: duplicate exponent
rows merge by coefficient addition, exact-zero coefficients drop out, and
monomials are kept in graded-lex order (total degree descending, then
exponents lexicographically descending). Evaluation and Jacobian kernels run
on a packed array form shared with the numba/numpy backends.

Text format (one system per chunk):

    POLYSYS n=<n> m=<m>
    (re,im)*x<j>^<e>*... + (re,im)*... one equation per line

``^1`` is omitted, a bare ``(re,im)`` is a constant term, whitespace between
tokens is arbitrary, and a zero polynomial is written ``(0,0)``.
"""

import re
from dataclasses import dataclass

import numpy as np

from . import _kernels
from .errors import DimensionError, ParseError

__all__ = [
    "Monomial",
    "PolySystem",
    "RestrictedSystem",
    "evaluate",
    "jacobian",
    "restrict",
    "expand_substitution",
    "square_system",
    "adjacent_minors",
    "cyclic_roots",
    "random_sparse_hypersurface",
    "format_system",
    "parse_system",
]

ORTHONORMALITY_TOL = 1e-10


@dataclass(frozen=True)
class Monomial:
    """One term: coefficient times a product of variable powers."""

    coefficient: complex
    exponents: tuple

    @property
    def total_degree(self):
        return sum(self.exponents)


def _as_monomial(term, n):
    if isinstance(term, Monomial):
        coeff, exps = term.coefficient, term.exponents
    else:
        coeff, exps = term
    exps = tuple(int(e) for e in exps)
    if len(exps) != n:
        raise DimensionError("monomial has %d exponents, expected %d"
                             % (len(exps), n))
    if any(e < 0 for e in exps):
        raise ValueError("negative exponent in monomial")
    coeff = complex(coeff)
    if not (np.isfinite(coeff.real) and np.isfinite(coeff.imag)):
        raise ValueError("non-finite monomial coefficient")
    return coeff, exps


def _graded_lex_key(exps):
    return (-sum(exps), tuple(-e for e in exps))


class PolySystem:
    """Immutable system of m polynomial equations in n complex variables."""

    def __init__(self, equations, n):
        n = int(n)
        if n < 0:
            raise DimensionError("variable count must be nonnegative")
        self.n = n
        eqs = []
        for eq in equations:
            merged = {}
            for term in eq:
                coeff, exps = _as_monomial(term, n)
                merged[exps] = merged.get(exps, 0j) + coeff
            kept = [(e, c) for e, c in merged.items() if c != 0]
            kept.sort(key=lambda item: _graded_lex_key(item[0]))
            eqs.append(tuple(Monomial(c, e) for e, c in kept))
        self.equations = tuple(eqs)
        self.m = len(self.equations)
        self._packed = None

    def degrees(self):
        """Max total degree per equation (0 for a zero polynomial)."""
        return [max((mono.total_degree for mono in eq), default=0)
                for eq in self.equations]

    def packed(self):
        """(coeffs, exps, eq_ptr, maxexp) arrays for the kernels."""
        if self._packed is None:
            nterms = sum(len(eq) for eq in self.equations)
            coeffs = np.empty(nterms, np.complex128)
            exps = np.zeros((nterms, self.n), np.int64)
            eq_ptr = np.zeros(self.m + 1, np.int64)
            t = 0
            for i, eq in enumerate(self.equations):
                for mono in eq:
                    coeffs[t] = mono.coefficient
                    exps[t, :] = mono.exponents
                    t += 1
                eq_ptr[i + 1] = t
            maxexp = exps.max(axis=0) if nterms else np.zeros(self.n, np.int64)
            self._packed = (coeffs, exps, eq_ptr, maxexp.astype(np.int64))
        return self._packed

    def evaluate(self, x):
        return evaluate(self, x)

    def jacobian(self, x):
        return jacobian(self, x)

    def __eq__(self, other):
        return (isinstance(other, PolySystem) and self.n == other.n
                and self.equations == other.equations)

    def __repr__(self):
        return "PolySystem(n=%d, m=%d)" % (self.n, self.m)


def _check_point(f, x):
    x = np.asarray(x, np.complex128)
    if x.shape != (f.n,):
        raise DimensionError("point has shape %s, expected (%d,)"
                             % (x.shape, f.n))
    return x


def evaluate(f, x):
    """Evaluate all equations of f at the point x.

    Args:
        f: PolySystem.
        x: complex vector of length f.n.

    Returns:
        complex vector of length f.m.
    """
    x = _check_point(f, x)
    coeffs, exps, eq_ptr, maxexp = f.packed()
    return _kernels.eval_packed(coeffs, exps, eq_ptr, maxexp, x)


def jacobian(f, x):
    """Jacobian matrix of f at x, entry (i, j) = d f_i / d x_j.

    Returns:
        complex matrix of shape (f.m, f.n).
    """
    x = _check_point(f, x)
    coeffs, exps, eq_ptr, maxexp = f.packed()
    return _kernels.jac_packed(coeffs, exps, eq_ptr, maxexp, x)


class RestrictedSystem:
    """View of f on the affine plane x = offset + basis @ xi.

    Evaluation composes numerically (no symbolic expansion); the Jacobian is
    the chain rule f'(offset + basis @ xi) @ basis, shape (m, k).
    """

    def __init__(self, system, offset, basis):
        self.system = system
        self.offset = offset
        self.basis = basis
        self.k = basis.shape[1]

    def ambient(self, xi):
        """Map intrinsic coordinates to the ambient space."""
        return self.offset + self.basis @ xi

    def evaluate(self, xi):
        return evaluate(self.system, self.ambient(xi))

    def jacobian(self, xi):
        return jacobian(self.system, self.ambient(xi)) @ self.basis

    def evaluate_and_jacobian(self, xi):
        x = self.ambient(xi)
        coeffs, exps, eq_ptr, maxexp = self.system.packed()
        vals, jac = _kernels.eval_jac_packed(coeffs, exps, eq_ptr, maxexp, x)
        return vals, jac @ self.basis


def restrict(f, offset, basis):
    """Restrict f to the affine plane offset + span(basis).

    Args:
        f: PolySystem in n variables.
        offset: complex vector of length n.
        basis: complex (n, k) matrix with orthonormal columns (checked
            to 1e-10).

    Returns:
        RestrictedSystem with k intrinsic variables.
    """
    offset = np.asarray(offset, np.complex128)
    basis = np.asarray(basis, np.complex128)
    if offset.shape != (f.n,):
        raise DimensionError("offset has shape %s, expected (%d,)"
                             % (offset.shape, f.n))
    if basis.ndim != 2 or basis.shape[0] != f.n:
        raise DimensionError("basis has shape %s, expected (%d, k)"
                             % (basis.shape, f.n))
    gram = basis.conj().T @ basis
    err = np.abs(gram - np.eye(basis.shape[1])).max()
    if err > ORTHONORMALITY_TOL:
        from .errors import OrthonormalityError

        raise OrthonormalityError(
            "basis columns not orthonormal (max deviation %.3e)" % err)
    return RestrictedSystem(f, offset, basis)


def _dict_mul(p, q, k):
    out = {}
    for e1, c1 in p.items():
        for e2, c2 in q.items():
            e = tuple(a + b for a, b in zip(e1, e2))
            out[e] = out.get(e, 0j) + c1 * c2
    return out


def expand_substitution(f, offset, basis):
    """Symbolically expand g(xi) = f(offset + basis @ xi).

    Unlike restrict(), the result is an honest PolySystem in k variables and
    the basis need not be orthonormal.

    Returns:
        PolySystem with k variables and the same number of equations.
    """
    offset = np.asarray(offset, np.complex128)
    basis = np.asarray(basis, np.complex128)
    if offset.shape != (f.n,):
        raise DimensionError("offset has shape %s, expected (%d,)"
                             % (offset.shape, f.n))
    if basis.ndim != 2 or basis.shape[0] != f.n:
        raise DimensionError("basis has shape %s, expected (%d, k)"
                             % (basis.shape, f.n))
    k = basis.shape[1]
    zero = (0,) * k
    lin = []
    for j in range(f.n):
        form = {}
        if offset[j] != 0:
            form[zero] = complex(offset[j])
        for i in range(k):
            if basis[j, i] != 0:
                e = tuple(1 if l == i else 0 for l in range(k))
                form[e] = form.get(e, 0j) + complex(basis[j, i])
        lin.append(form)
    pow_cache = [{0: {zero: 1 + 0j}} for _ in range(f.n)]

    def lin_power(j, e):
        cache = pow_cache[j]
        top = max(cache)
        while top < e:
            cache[top + 1] = _dict_mul(cache[top], lin[j], k)
            top += 1
        return cache[e]

    new_eqs = []
    for eq in f.equations:
        acc = {}
        for mono in eq:
            term = {zero: mono.coefficient}
            for j, e in enumerate(mono.exponents):
                if e:
                    term = _dict_mul(term, lin_power(j, e), k)
            for exps, c in term.items():
                acc[exps] = acc.get(exps, 0j) + c
        new_eqs.append([(c, exps) for exps, c in acc.items()])
    return PolySystem(new_eqs, k)


def _unit_circle(rng, size=None):
    return np.exp(2j * np.pi * rng.random(size))


def square_system(f, k, seed):
    """Replace f by k random complex combinations of its equations.

    Combinations are degree graded: equations are sorted by total degree
    (descending) and combination i mixes only equations of degree at most
    deg(i), with unit-circle coefficients. The i-th output keeps the i-th
    largest input degree, so the Bezout count of the squared system is the
    product of the k largest input degrees instead of max(degree)^k. Any
    zero of f remains a zero of the output. When f already has exactly k
    equations it is returned unchanged.

    Args:
        f: PolySystem with m >= k equations.
        k: target equation count.
        seed: integer seed for the combination coefficients.
    """
    k = int(k)
    if not 1 <= k <= f.m:
        raise DimensionError("cannot square %d equations down to %d"
                             % (f.m, k))
    if f.m == k:
        return f
    rng = np.random.default_rng(seed)
    degs = f.degrees()
    order = sorted(range(f.m), key=lambda i: -degs[i])
    new_eqs = []
    for l in range(k):
        weights = _unit_circle(rng, f.m - l)
        acc = {}
        for w, i in zip(weights, order[l:]):
            for mono in f.equations[i]:
                acc[mono.exponents] = (acc.get(mono.exponents, 0j)
                                       + w * mono.coefficient)
        new_eqs.append([(c, e) for e, c in acc.items()])
    return PolySystem(new_eqs, f.n)


def adjacent_minors(cols):
    """All adjacent 2x2 minors of a 2 x cols matrix of variables.

    Variables are ordered x11..x1c, x21..x2c; equation j is
    x1j * x2(j+1) - x2j * x1(j+1) for j = 1..cols-1. The solution set has
    codimension cols - 1 and witness degree 2**(cols - 1).
    """
    cols = int(cols)
    if cols < 2:
        raise DimensionError("need at least 2 columns")
    n = 2 * cols
    eqs = []
    for j in range(cols - 1):
        a = [0] * n
        a[j] = 1
        a[cols + j + 1] = 1
        b = [0] * n
        b[cols + j] = 1
        b[j + 1] = 1
        eqs.append([(1.0, tuple(a)), (-1.0, tuple(b))])
    return PolySystem(eqs, n)


def cyclic_roots(n):
    """The cyclic n-roots system.

    Equation i (1 <= i < n) sums the n cyclically consecutive products of i
    variables; equation n is x1*...*xn - 1.
    """
    n = int(n)
    if n < 2:
        raise DimensionError("need at least 2 variables")
    eqs = []
    for i in range(1, n):
        terms = []
        for j in range(n):
            e = [0] * n
            for l in range(i):
                e[(j + l) % n] += 1
            terms.append((1.0, tuple(e)))
        eqs.append(terms)
    eqs.append([(1.0, (1,) * n), (-1.0, (0,) * n)])
    return PolySystem(eqs, n)


def random_sparse_hypersurface(n, d, t, seed):
    """One random sparse equation: x1^d + t random lower-order terms plus
    all n linear terms.

    The random terms draw a total degree uniformly from 1..d-1 and distribute
    it over the variables by repeated uniform picks; their coefficients and
    the n linear coefficients lie on the complex unit circle. Duplicate
    exponent rows merge, so the term count is at most 1 + t + n.

    Args:
        n: number of variables (>= 1).
        d: leading degree (>= 2).
        t: number of random interior terms (>= 0).
        seed: integer seed.
    """
    n, d, t = int(n), int(d), int(t)
    if n < 1:
        raise DimensionError("need at least 1 variable")
    if d < 2:
        raise DimensionError("leading degree must be >= 2")
    if t < 0:
        raise ValueError("term count must be >= 0")
    rng = np.random.default_rng(seed)
    lead = [0] * n
    lead[0] = d
    terms = [(1.0, tuple(lead))]
    for _ in range(t):
        g = int(rng.integers(1, d))
        e = [0] * n
        for _ in range(g):
            e[int(rng.integers(0, n))] += 1
        terms.append((complex(_unit_circle(rng)), tuple(e)))
    for i in range(n):
        e = [0] * n
        e[i] = 1
        terms.append((complex(_unit_circle(rng)), tuple(e)))
    return PolySystem([terms], n)


# ---------------------------------------------------------------------------
# text format
# ---------------------------------------------------------------------------

def _fmt_float(v):
    return "%.17g" % v


def _fmt_monomial(mono):
    s = "(%s,%s)" % (_fmt_float(mono.coefficient.real),
                     _fmt_float(mono.coefficient.imag))
    for j, e in enumerate(mono.exponents):
        if e == 1:
            s += "*x%d" % (j + 1)
        elif e > 1:
            s += "*x%d^%d" % (j + 1, e)
    return s


def format_system(f):
    """Serialize a PolySystem to its text format."""
    lines = ["POLYSYS n=%d m=%d" % (f.n, f.m)]
    for eq in f.equations:
        if not eq:
            lines.append("(0,0)")
        else:
            lines.append(" + ".join(_fmt_monomial(mono) for mono in eq))
    return "\n".join(lines) + "\n"


_HEADER_RE = re.compile(r"^\s*POLYSYS\s+n\s*=\s*(\d+)\s+m\s*=\s*(\d+)\s*$")
_TERM_RE = re.compile(
    r"^\(\s*([^\s,()]+)\s*,\s*([^\s,()]+)\s*\)\s*(.*)$")
_FACTOR_RE = re.compile(r"\*\s*x(\d+)\s*(?:\^\s*(\d+))?\s*")


def _split_terms(line):
    parts = []
    depth = 0
    cur = []
    for ch in line:
        if ch == "(":
            depth += 1
        elif ch == ")":
            depth -= 1
        if ch == "+" and depth == 0:
            parts.append("".join(cur))
            cur = []
        else:
            cur.append(ch)
    parts.append("".join(cur))
    return parts


def _parse_equation(line, n, lineno):
    terms = []
    for chunk in _split_terms(line):
        chunk = chunk.strip()
        if not chunk:
            raise ParseError("empty term", lineno)
        match = _TERM_RE.match(chunk)
        if not match:
            raise ParseError("malformed term %r" % chunk, lineno)
        try:
            coeff = complex(float(match.group(1)), float(match.group(2)))
        except ValueError:
            raise ParseError("bad coefficient in %r" % chunk, lineno)
        exps = [0] * n
        rest = match.group(3).strip()
        pos = 0
        while pos < len(rest):
            fm = _FACTOR_RE.match(rest, pos)
            if not fm:
                raise ParseError("malformed factors %r" % rest[pos:], lineno)
            j = int(fm.group(1))
            if not 1 <= j <= n:
                raise ParseError("variable x%d out of range 1..%d" % (j, n),
                                 lineno)
            exps[j - 1] += int(fm.group(2)) if fm.group(2) else 1
            pos = fm.end()
        terms.append((coeff, tuple(exps)))
    return terms


def parse_system(text, first_line=1):
    """Parse a PolySystem from its text format.

    Blank lines and # comment lines are skipped, so files may carry
    provenance headers.

    Args:
        text: string or sequence of lines.
        first_line: 1-based number of the first line, for error reporting
            when the chunk is embedded in a larger file.

    Raises:
        ParseError: malformed header or term, with the offending line number.
    """
    if isinstance(text, str):
        lines = text.splitlines()
    else:
        lines = list(text)
    idx = 0
    while idx < len(lines):
        stripped = lines[idx].strip()
        if stripped and not stripped.startswith("#"):
            break
        idx += 1
    if idx == len(lines):
        raise ParseError("missing POLYSYS header", first_line)
    match = _HEADER_RE.match(lines[idx])
    if not match:
        raise ParseError("malformed POLYSYS header %r" % lines[idx].strip(),
                         first_line + idx)
    n, m = int(match.group(1)), int(match.group(2))
    eqs = []
    while len(eqs) < m:
        idx += 1
        if idx >= len(lines):
            raise ParseError("expected %d equations, found %d"
                             % (m, len(eqs)), first_line + idx)
        stripped = lines[idx].strip()
        if not stripped or stripped.startswith("#"):
            continue
        eqs.append(_parse_equation(stripped, n, first_line + idx))
    return PolySystem(eqs, n)
