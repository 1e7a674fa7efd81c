"""Witness sets and slicing planes.

A witness set couples a square polynomial system with a generic affine
plane of complementary dimension and the finitely many intersection points
of the plane with the solution set. Planes exist in two equivalent
representations: intrinsic (orthonormal basis plus offset, n x k) and
extrinsic (n - k linear equations). Conversions go both ways and witness
sets serialize to a line-oriented text format with 17 significant digits.
"""

from dataclasses import dataclass

import numpy as np

from . import polysys
from .errors import DimensionError, OrthonormalityError, ParseError, \
    ValidationError
from .linalg import lu_solve, nullspace_basis, orthonormalize, \
    project_perpendicular

__all__ = [
    "AffinePlane",
    "ExtrinsicPlane",
    "WitnessSet",
    "random_plane",
    "extrinsic_to_intrinsic",
    "intrinsic_to_extrinsic",
    "plane_distance",
    "rebase",
    "format_witness",
    "parse_witness",
    "save_witness",
    "load_witness",
]

RESIDUAL_TOL = 1e-8
MEMBERSHIP_TOL = 1e-8
DISTINCT_TOL = 1e-6


@dataclass(frozen=True)
class AffinePlane:
    """Affine k-plane {offset + basis @ xi} with orthonormal basis columns."""

    offset: np.ndarray
    basis: np.ndarray

    def __post_init__(self):
        offset = np.asarray(self.offset, np.complex128)
        basis = np.asarray(self.basis, np.complex128)
        object.__setattr__(self, "offset", offset)
        object.__setattr__(self, "basis", basis)
        if offset.ndim != 1 or basis.ndim != 2 \
                or basis.shape[0] != offset.shape[0]:
            raise DimensionError("offset %s and basis %s do not match"
                                 % (offset.shape, basis.shape))
        if not 1 <= self.k <= self.n:
            raise DimensionError("plane dimension %d out of range 1..%d"
                                 % (self.k, self.n))
        if not (np.isfinite(offset).all() and np.isfinite(basis).all()):
            raise ValidationError("plane entries must be finite")
        gram = basis.conj().T @ basis
        err = np.abs(gram - np.eye(self.k)).max()
        if err > polysys.ORTHONORMALITY_TOL:
            raise OrthonormalityError(
                "plane basis not orthonormal (max deviation %.3e)" % err)

    @property
    def n(self):
        return self.offset.shape[0]

    @property
    def k(self):
        return self.basis.shape[1]

    def point(self, xi):
        """Ambient point of the intrinsic coordinates xi."""
        return self.offset + self.basis @ np.asarray(xi, np.complex128)

    def coordinates(self, z):
        """Intrinsic coordinates of (the projection of) an ambient point."""
        z = np.asarray(z, np.complex128)
        return self.basis.conj().T @ (z - self.offset)


@dataclass(frozen=True)
class ExtrinsicPlane:
    """The same plane as n - k linear equations coefficients @ x + constants."""

    coefficients: np.ndarray
    constants: np.ndarray

    def __post_init__(self):
        coeffs = np.asarray(self.coefficients, np.complex128)
        consts = np.asarray(self.constants, np.complex128)
        object.__setattr__(self, "coefficients", coeffs)
        object.__setattr__(self, "constants", consts)
        if coeffs.ndim != 2 or consts.shape != (coeffs.shape[0],):
            raise DimensionError("coefficients %s and constants %s do not "
                                 "match" % (coeffs.shape, consts.shape))
        if not (np.isfinite(coeffs).all() and np.isfinite(consts).all()):
            raise ValidationError("plane entries must be finite")
        orthonormalize(coeffs.conj().T)  # raises on dependent rows

    @property
    def n(self):
        return self.coefficients.shape[1]

    @property
    def k(self):
        return self.n - self.coefficients.shape[0]

    def residual(self, z):
        """Vector of linear-equation values at z."""
        return self.coefficients @ np.asarray(z, np.complex128) \
            + self.constants


def plane_distance(plane, z):
    """Norm of the component of z - offset perpendicular to the plane."""
    r = project_perpendicular(np.asarray(z, np.complex128) - plane.offset,
                              plane.basis)
    return float(np.linalg.norm(r))


class WitnessSet:
    """Square system + generic plane + the plane's intersection points.

    Points are stored in extrinsic (ambient) coordinates. Construction
    validates the three witness invariants unless validate=False.
    """

    def __init__(self, system, plane, points, validate=True):
        self.system = system
        self.plane = plane
        self.points = tuple(np.asarray(p, np.complex128) for p in points)
        if system.n != plane.n:
            raise DimensionError("system in %d variables, plane in %d"
                                 % (system.n, plane.n))
        # Restricting m equations to a k-plane gives an m x k system; the
        # witness construction needs that restriction square.
        if system.m != plane.k:
            raise DimensionError(
                "system must restrict square: %d equations on a %d-plane"
                % (system.m, plane.k))
        for p in self.points:
            if p.shape != (plane.n,):
                raise DimensionError("witness point has shape %s" % (p.shape,))
        if validate:
            self.validate()

    @property
    def degree(self):
        return len(self.points)

    def validate(self, residual_tol=RESIDUAL_TOL,
                 membership_tol=MEMBERSHIP_TOL, distinct_tol=DISTINCT_TOL):
        """Check the witness invariants; raises ValidationError naming the
        first violated one."""
        for i, z in enumerate(self.points):
            res = float(np.linalg.norm(polysys.evaluate(self.system, z)))
            if not res <= residual_tol:
                raise ValidationError(
                    "residual: point %d has ||f(z)|| = %.3e > %.1e"
                    % (i, res, residual_tol))
        for i, z in enumerate(self.points):
            dist = plane_distance(self.plane, z)
            if not dist <= membership_tol:
                raise ValidationError(
                    "membership: point %d lies %.3e off the plane > %.1e"
                    % (i, dist, membership_tol))
        for i in range(len(self.points)):
            for j in range(i + 1, len(self.points)):
                sep = float(np.linalg.norm(self.points[i] - self.points[j]))
                if not sep > distinct_tol:
                    raise ValidationError(
                        "distinctness: points %d and %d are %.3e apart <= %.1e"
                        % (i, j, sep, distinct_tol))

    def intrinsic_points(self):
        """Points in the plane's intrinsic coordinates."""
        return [self.plane.coordinates(z) for z in self.points]


def random_plane(n, k, seed):
    """Random affine k-plane in C^n with unit-circle offset entries and an
    orthonormalized unit-circle basis.

    Retries with a perturbed seed up to 3 times if the random basis loses
    rank (essentially impossible, kept as a guard).
    """
    n, k = int(n), int(k)
    if not 1 <= k <= n:
        raise DimensionError("plane dimension %d out of range 1..%d" % (k, n))
    last = None
    for attempt in range(4):
        rng = np.random.default_rng(seed + attempt)
        offset = np.exp(2j * np.pi * rng.random(n))
        raw = np.exp(2j * np.pi * rng.random((n, k)))
        try:
            basis = orthonormalize(raw)
        except Exception as exc:  # rank deficiency
            last = exc
            continue
        return AffinePlane(offset, basis)
    raise last


def extrinsic_to_intrinsic(ext):
    """Convert linear equations to offset + orthonormal basis.

    The offset is the minimal-norm solution of coefficients @ x = -constants;
    the basis spans the null space of the coefficient rows.
    """
    A = ext.coefficients
    gram = A @ A.conj().T
    y = lu_solve(gram, -ext.constants)
    offset = A.conj().T @ y
    basis = nullspace_basis(A)
    return AffinePlane(offset, basis)


def intrinsic_to_extrinsic(plane):
    """Convert offset + basis to n - k vanishing linear equations."""
    Y = nullspace_basis(plane.basis.T)
    coeffs = Y.T
    consts = -(coeffs @ plane.offset)
    return ExtrinsicPlane(coeffs, consts)


def rebase(wset, index):
    """Move the plane's offset to witness point index (0-based), keeping the
    basis and the points."""
    if not 0 <= index < wset.degree:
        raise IndexError("witness point index %d out of range 0..%d"
                         % (index, wset.degree - 1))
    plane = AffinePlane(wset.points[index], wset.plane.basis)
    return WitnessSet(wset.system, plane, wset.points)


# ---------------------------------------------------------------------------
# text format
# ---------------------------------------------------------------------------

def _fmt_complex_line(v):
    return "%.17g %.17g" % (v.real, v.imag)


def format_witness(wset):
    """Serialize a witness set to its text format."""
    n, k = wset.plane.n, wset.plane.k
    lines = ["WITNESS v1", "n %d k %d d %d" % (n, k, wset.degree), "SYSTEM"]
    lines.extend(polysys.format_system(wset.system).rstrip("\n").split("\n"))
    lines.append("PLANE OFFSET")
    lines.extend(_fmt_complex_line(v) for v in wset.plane.offset)
    lines.append("PLANE BASIS")
    for col in range(k):
        lines.extend(_fmt_complex_line(v) for v in wset.plane.basis[:, col])
    lines.append("POINTS")
    for z in wset.points:
        lines.extend(_fmt_complex_line(v) for v in z)
    lines.append("END")
    return "\n".join(lines) + "\n"


class _LineReader:
    """Sequential reader that skips blanks and # comments, tracking 1-based
    line numbers for error messages."""

    def __init__(self, text):
        self.lines = text.splitlines()
        self.pos = 0

    def next(self, what):
        while self.pos < len(self.lines):
            line = self.lines[self.pos]
            self.pos += 1
            stripped = line.strip()
            if stripped and not stripped.startswith("#"):
                return stripped, self.pos
        raise ParseError("unexpected end of file, expected %s" % what,
                         len(self.lines))


def _read_complex_block(reader, count, what):
    out = np.empty(count, np.complex128)
    for i in range(count):
        line, lineno = reader.next(what)
        parts = line.split()
        if len(parts) != 2:
            raise ParseError("expected 're im' pair for %s, got %r"
                             % (what, line), lineno)
        try:
            out[i] = complex(float(parts[0]), float(parts[1]))
        except ValueError:
            raise ParseError("bad number in %s: %r" % (what, line), lineno)
    return out


def parse_witness(text):
    """Parse and validate a witness set from its text format.

    Raises:
        ParseError: structural problems, with the offending line number.
        ValidationError: the parsed data violates a witness invariant.
    """
    reader = _LineReader(text)
    line, lineno = reader.next("WITNESS header")
    if line != "WITNESS v1":
        raise ParseError("expected 'WITNESS v1', got %r" % line, lineno)
    line, lineno = reader.next("dimension line")
    parts = line.split()
    if len(parts) != 6 or parts[0] != "n" or parts[2] != "k" \
            or parts[4] != "d":
        raise ParseError("expected 'n <n> k <k> d <d>', got %r" % line,
                         lineno)
    try:
        n, k, d = int(parts[1]), int(parts[3]), int(parts[5])
    except ValueError:
        raise ParseError("bad integer in dimension line %r" % line, lineno)
    line, lineno = reader.next("SYSTEM section")
    if line != "SYSTEM":
        raise ParseError("expected 'SYSTEM', got %r" % line, lineno)
    header, header_no = reader.next("POLYSYS header")
    eq_lines = [header]
    for _ in range(k):
        eq, _ = reader.next("equation line")
        eq_lines.append(eq)
    system = polysys.parse_system(eq_lines, first_line=header_no)
    if system.n != n or system.m != k:
        raise ParseError("system is %d equations in %d variables, expected "
                         "%d in %d" % (system.m, system.n, k, n),
                         header_no)
    line, lineno = reader.next("PLANE OFFSET section")
    if line != "PLANE OFFSET":
        raise ParseError("expected 'PLANE OFFSET', got %r" % line, lineno)
    offset = _read_complex_block(reader, n, "plane offset")
    line, lineno = reader.next("PLANE BASIS section")
    if line != "PLANE BASIS":
        raise ParseError("expected 'PLANE BASIS', got %r" % line, lineno)
    basis = np.empty((n, k), np.complex128)
    for col in range(k):
        basis[:, col] = _read_complex_block(reader, n,
                                            "basis column %d" % col)
    line, lineno = reader.next("POINTS section")
    if line != "POINTS":
        raise ParseError("expected 'POINTS', got %r" % line, lineno)
    points = [_read_complex_block(reader, n, "point %d" % i)
              for i in range(d)]
    line, lineno = reader.next("END marker")
    if line != "END":
        raise ParseError("expected 'END', got %r" % line, lineno)
    plane = AffinePlane(offset, basis)
    return WitnessSet(system, plane, points)


def save_witness(wset, path):
    """Write a witness set to path in the text format."""
    with open(path, "w") as fh:
        fh.write(format_witness(wset))


def load_witness(path):
    """Read and validate a witness set from path."""
    with open(path) as fh:
        return parse_witness(fh.read())
