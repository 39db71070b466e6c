"""Tor and Ext dimensions of one-dimensional modules, by exact rational rank computations."""
from __future__ import annotations

import logging
import random
from dataclasses import dataclass
from fractions import Fraction
from itertools import combinations
from typing import Iterable, Sequence

from sympy import QQ
from sympy.polys.matrices import DomainMatrix
from sympy.polys.matrices.exceptions import DMNonInvertibleMatrixError

import config
from core import NcrwError
from tokens import parse_rational

logger = logging.getLogger(__name__)


class NotOrthogonal(NcrwError):
    pass


class SizeMismatch(NcrwError):
    pass


class UnsupportedSpectrum(NcrwError):
    pass


class PreconditionViolated(NcrwError):
    pass


class RankMismatch(NcrwError):
    pass


class Phi3Sign:
    MINUS = "minus"
    PLUS = "plus"


PYTHAGOREAN_TRIPLES = ((3, 4, 5), (5, 12, 13), (8, 15, 17), (7, 24, 25))


# ---------------------------------------------------------------------------
# Matrices
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class RationalMatrix:
    rows: int
    cols: int
    entries: tuple[tuple[Fraction, ...], ...]

    @classmethod
    def from_rows(cls, rows: Iterable[Iterable[Fraction | int | str]]) -> RationalMatrix:
        grid = tuple(tuple(parse_rational(x) for x in row) for row in rows)
        widths = {len(row) for row in grid}
        if len(widths) > 1:
            raise SizeMismatch(f"rows of different lengths {sorted(widths)}")
        return cls(len(grid), widths.pop() if widths else 0, grid)

    @classmethod
    def zeros(cls, rows: int, cols: int) -> RationalMatrix:
        return cls(rows, cols, tuple(tuple(Fraction(0) for _ in range(cols)) for _ in range(rows)))

    @classmethod
    def identity(cls, n: int) -> RationalMatrix:
        return cls.diagonal([1] * n)

    @classmethod
    def diagonal(cls, values: Sequence[Fraction | int]) -> RationalMatrix:
        n = len(values)
        return cls.from_rows([[values[i] if i == j else 0 for j in range(n)] for i in range(n)])

    @classmethod
    def block_diagonal(cls, blocks: Sequence[RationalMatrix]) -> RationalMatrix:
        size = sum(b.rows for b in blocks)
        grid = [[Fraction(0)] * size for _ in range(size)]
        offset = 0
        for block in blocks:
            if not block.is_square():
                raise SizeMismatch("diagonal blocks must be square")
            for i in range(block.rows):
                for j in range(block.cols):
                    grid[offset + i][offset + j] = block[i, j]
            offset += block.rows
        return cls.from_rows(grid)

    @classmethod
    def rotation(cls, c: Fraction | int, s: Fraction | int) -> RationalMatrix:
        return cls.from_rows([[c, -Fraction(s)], [s, c]])

    @classmethod
    def reflection(cls, c: Fraction | int, s: Fraction | int) -> RationalMatrix:
        return cls.from_rows([[c, s], [s, -Fraction(c)]])

    def __getitem__(self, index: tuple[int, int]) -> Fraction:
        i, j = index
        return self.entries[i][j]

    def is_square(self) -> bool:
        return self.rows == self.cols

    def is_zero(self) -> bool:
        return all(x == 0 for row in self.entries for x in row)

    def transpose(self) -> RationalMatrix:
        return RationalMatrix(self.cols, self.rows, tuple(
            tuple(self.entries[i][j] for i in range(self.rows)) for j in range(self.cols)
        ))

    def _same_shape(self, other: RationalMatrix) -> None:
        if (self.rows, self.cols) != (other.rows, other.cols):
            raise SizeMismatch(f"{self.rows}x{self.cols} against {other.rows}x{other.cols}")

    def __add__(self, other: RationalMatrix) -> RationalMatrix:
        self._same_shape(other)
        return RationalMatrix(self.rows, self.cols, tuple(
            tuple(a + b for a, b in zip(r1, r2)) for r1, r2 in zip(self.entries, other.entries)
        ))

    def __neg__(self) -> RationalMatrix:
        return self.scale(-1)

    def __sub__(self, other: RationalMatrix) -> RationalMatrix:
        return self + (-other)

    def scale(self, value: Fraction | int) -> RationalMatrix:
        return RationalMatrix(self.rows, self.cols, tuple(tuple(x * value for x in row) for row in self.entries))

    def __matmul__(self, other: RationalMatrix) -> RationalMatrix:
        if self.cols != other.rows:
            raise SizeMismatch(f"cannot multiply {self.rows}x{self.cols} by {other.rows}x{other.cols}")
        columns = other.transpose().entries
        return RationalMatrix(self.rows, other.cols, tuple(
            tuple(sum((a * b for a, b in zip(row, col) if a and b), Fraction(0)) for col in columns)
            for row in self.entries
        ))

    def to_domain(self) -> DomainMatrix:
        grid = [[QQ(x.numerator, x.denominator) for x in row] for row in self.entries]
        return DomainMatrix(grid, (self.rows, self.cols), QQ)

    @classmethod
    def from_domain(cls, dm: DomainMatrix) -> RationalMatrix:
        rows, cols = dm.shape
        grid = dm.to_list() if rows else []
        return cls(rows, cols, tuple(
            tuple(Fraction(int(x.numerator), int(x.denominator)) for x in row) for row in grid
        ))

    def inverse(self) -> RationalMatrix:
        if not self.is_square():
            raise SizeMismatch("only square matrices have inverses")
        if self.rows == 0:
            return self
        try:
            return RationalMatrix.from_domain(self.to_domain().inv())
        except DMNonInvertibleMatrixError as exc:
            raise PreconditionViolated("matrix is singular") from exc

    def render(self) -> list[list[str]]:
        return [[str(x) for x in row] for row in self.entries]


def kron(a: RationalMatrix, b: RationalMatrix) -> RationalMatrix:
    """Row (p, q) and column (i, j) hold a[p,i] * b[q,j]."""
    return RationalMatrix.from_rows(
        [a[p, i] * b[q, j] for i in range(a.cols) for j in range(b.cols)]
        for p in range(a.rows) for q in range(b.rows)
    )


def exterior_square(m: RationalMatrix) -> RationalMatrix:
    """Induced map on the wedge basis e_i ^ e_j, i < j, in lexicographic order."""
    if not m.is_square():
        raise SizeMismatch("exterior square needs a square matrix")
    pairs = list(combinations(range(m.rows), 2))
    return RationalMatrix.from_rows(
        [m[i, k] * m[j, l] - m[i, l] * m[j, k] for k, l in pairs]
        for i, j in pairs
    )


def rank(m: RationalMatrix) -> int:
    if m.rows == 0 or m.cols == 0:
        return 0
    return m.to_domain().rank()


def charpoly(m: RationalMatrix) -> list[Fraction]:
    """Coefficients of det(x*id - m), highest degree first."""
    if not m.is_square():
        raise SizeMismatch("characteristic polynomial needs a square matrix")
    if m.rows == 0:
        return [Fraction(1)]
    return [Fraction(int(c.numerator), int(c.denominator)) for c in m.to_domain().charpoly()]


def is_orthogonal(m: RationalMatrix) -> bool:
    if not m.is_square():
        raise SizeMismatch(f"{m.rows}x{m.cols} matrix is not square")
    ident = RationalMatrix.identity(m.rows)
    return m @ m.transpose() == ident and m.transpose() @ m == ident


def _poly_mul(a: Sequence[Fraction], b: Sequence[Fraction]) -> list[Fraction]:
    out = [Fraction(0)] * (len(a) + len(b) - 1)
    for i, x in enumerate(a):
        for j, y in enumerate(b):
            out[i + j] += x * y
    return out


def _in_square(coeffs: Sequence[Fraction]) -> list[Fraction]:
    """p(y) -> p(x^2) on highest-first coefficient lists."""
    out: list[Fraction] = []
    for c in coeffs:
        out += [c, Fraction(0)]
    return out[:-1]


# ---------------------------------------------------------------------------
# L and D
# ---------------------------------------------------------------------------

def _pair_index(n: int):
    return [(p, q) for p in range(n) for q in range(n)]


def build_l(psi: RationalMatrix) -> RationalMatrix:
    """Block diagonal with n copies of psi: L[(p,q),(p,j)] = psi[q,j]."""
    if not psi.is_square():
        raise SizeMismatch("L needs a square matrix")
    idx = _pair_index(psi.rows)
    return RationalMatrix.from_rows(
        [psi[q, j] if p == i else 0 for i, j in idx] for p, q in idx
    )


def build_d(psi: RationalMatrix) -> RationalMatrix:
    """Row (p, q) carries row p of psi in column block q: D[(p,q),(q,j)] = psi[p,j]."""
    if not psi.is_square():
        raise SizeMismatch("D needs a square matrix")
    idx = _pair_index(psi.rows)
    return RationalMatrix.from_rows(
        [psi[p, j] if q == i else 0 for i, j in idx] for p, q in idx
    )


def id_plus_d_rank(psi: RationalMatrix) -> int:
    n = psi.rows
    return rank(RationalMatrix.identity(n * n) + build_d(psi))


# ---------------------------------------------------------------------------
# Tor
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class PhiStars:
    # m1: 1 x n^2 coefficients of e[p,q]; m2: rows f[p,q], columns e[x,y]; m3: n^2 x 1 coefficients of f[p,q]
    m1: RationalMatrix
    m2: RationalMatrix
    m3: RationalMatrix

    def ranks(self) -> tuple[int, int, int]:
        return rank(self.m1), rank(self.m2), rank(self.m3)


@dataclass(frozen=True)
class HomologyDims:
    hh: tuple[int, int, int, int]
    ranks: tuple[int, int, int]

    @property
    def euler(self) -> int:
        return self.hh[0] - self.hh[1] + self.hh[2] - self.hh[3]

    def to_dict(self) -> dict:
        return {"hh": list(self.hh), "ranks": list(self.ranks)}


def _check_pair(lam: RationalMatrix, omega: RationalMatrix) -> int:
    if not lam.is_square() or not omega.is_square() or lam.rows != omega.rows:
        raise SizeMismatch(f"Lambda is {lam.rows}x{lam.cols}, Omega is {omega.rows}x{omega.cols}")
    for name, m in (("Lambda", lam), ("Omega", omega)):
        if not is_orthogonal(m):
            raise NotOrthogonal(f"{name} is not orthogonal")
    return lam.rows


def _phi3_coefficient(lam: RationalMatrix, omega: RationalMatrix, p: int, q: int, sign: str) -> Fraction:
    mixed = sum((lam[q, i] * omega[p, i] for i in range(lam.rows)), Fraction(0))
    diag = Fraction(1 if p == q else 0)
    return diag - mixed if sign == Phi3Sign.MINUS else diag + mixed


def _resolve_sign(sign: str | None) -> str:
    sign = sign or config.PHI3_SIGN
    if sign not in (Phi3Sign.MINUS, Phi3Sign.PLUS):
        raise ValueError(f"unknown sign convention {sign!r}")
    return sign


def build_phi_stars(lam: RationalMatrix, omega: RationalMatrix, phi3_sign: str | None = None) -> PhiStars:
    n = _check_pair(lam, omega)
    sign = _resolve_sign(phi3_sign)
    idx = _pair_index(n)
    m1 = RationalMatrix.from_rows([[omega[p, q] - lam[p, q] for p, q in idx]])
    m2 = build_l(lam) + build_d(omega)
    m3 = RationalMatrix.from_rows([[_phi3_coefficient(lam, omega, p, q, sign)] for p, q in idx])
    return PhiStars(m1, m2, m3)


def _dims(n: int, ranks: tuple[int, int, int]) -> HomologyDims:
    r1, r2, r3 = ranks
    size = n * n
    return HomologyDims((1 - r1, size - r1 - r2, size - r2 - r3, 1 - r3), ranks)


def hh_dims(lam: RationalMatrix, omega: RationalMatrix, phi3_sign: str | None = None) -> HomologyDims:
    stars = build_phi_stars(lam, omega, phi3_sign)
    dims = _dims(lam.rows, stars.ranks())
    logger.debug("Tor ranks %s, dims %s", dims.ranks, dims.hh)
    return dims


# ---------------------------------------------------------------------------
# Ext
# ---------------------------------------------------------------------------

def build_ext_maps(lam: RationalMatrix, omega: RationalMatrix, phi3_sign: str | None = None) -> PhiStars:
    """Cochain maps evaluated generator by generator; rows are the source dual basis."""
    n = _check_pair(lam, omega)
    sign = _resolve_sign(phi3_sign)
    idx = _pair_index(n)
    m1 = RationalMatrix.from_rows([[omega[p, q] - lam[p, q] for p, q in idx]])
    m2 = RationalMatrix.from_rows(
        [
            (omega[x, q] if p == y else 0) + (lam[y, q] if p == x else 0)
            for x, y in idx
        ]
        for p, q in idx
    )
    m3 = RationalMatrix.from_rows([[_phi3_coefficient(lam, omega, p, q, sign)] for p, q in idx])
    return PhiStars(m1, m2, m3)


def ext_dims(lam: RationalMatrix, omega: RationalMatrix, phi3_sign: str | None = None) -> HomologyDims:
    tor = build_phi_stars(lam, omega, phi3_sign).ranks()
    ext = build_ext_maps(lam, omega, phi3_sign).ranks()
    if ext != tor:
        raise RankMismatch(f"Ext ranks {ext} differ from Tor ranks {tor}")
    return _dims(lam.rows, ext)


# ---------------------------------------------------------------------------
# Spectra
# ---------------------------------------------------------------------------

# exact eigenvalues as (real, imaginary) pairs
Eigen = tuple[Fraction, Fraction]


def _block_eigenvalues(block: RationalMatrix) -> list[Eigen]:
    zero = Fraction(0)
    if block.rows == 1:
        value = block[0, 0]
        if value not in (1, -1):
            raise UnsupportedSpectrum(f"1x1 block {value} is not +-1")
        return [(value, zero)]
    c, s = block[0, 0], block[1, 0]
    if c * c + s * s != 1:
        raise UnsupportedSpectrum("2x2 block is not orthogonal")
    if block == RationalMatrix.rotation(c, s):
        return [(c, s), (c, -s)]
    if block == RationalMatrix.reflection(c, s):
        return [(Fraction(1), zero), (Fraction(-1), zero)]
    raise UnsupportedSpectrum("2x2 block is neither a rotation nor a reflection")


def block_eigenvalues(psi: RationalMatrix, blocks: Sequence[int]) -> list[Eigen]:
    if not psi.is_square():
        raise SizeMismatch("spectrum needs a square matrix")
    if any(b not in (1, 2) for b in blocks) or sum(blocks) != psi.rows:
        raise UnsupportedSpectrum(f"block sizes {list(blocks)} do not tile a {psi.rows}x{psi.rows} matrix")
    owner = [k for k, size in enumerate(blocks) for _ in range(size)]
    for i in range(psi.rows):
        for j in range(psi.cols):
            if owner[i] != owner[j] and psi[i, j] != 0:
                raise UnsupportedSpectrum(f"entry ({i + 1},{j + 1}) lies outside the declared blocks")
    eigenvalues: list[Eigen] = []
    offset = 0
    for size in blocks:
        block = RationalMatrix.from_rows(
            [psi[offset + i, offset + j] for j in range(size)] for i in range(size)
        )
        eigenvalues += _block_eigenvalues(block)
        offset += size
    return eigenvalues


def k_values(psi: RationalMatrix, blocks: Sequence[int] | None) -> tuple[int, int]:
    """(k_-1, k_Lambda): multiplicity of -1 and the number of index pairs whose eigenvalues multiply to 1."""
    if blocks is None:
        raise UnsupportedSpectrum("k-values need a declared block structure")
    eigenvalues = block_eigenvalues(psi, blocks)
    one, zero = Fraction(1), Fraction(0)
    k_minus = sum(1 for ev in eigenvalues if ev == (-one, zero))
    k_lambda = 0
    for (a, b), (c, d) in combinations(eigenvalues, 2):
        if (a * c - b * d, a * d + b * c) == (one, zero):
            k_lambda += 1
    return k_minus, k_lambda


def charpoly_identity_check(j: RationalMatrix) -> bool:
    """chi of D_J equals chi_J(x) * chi of the exterior square evaluated at x^2."""
    if not j.is_square():
        raise SizeMismatch("charpoly identity needs a square matrix")
    lhs = charpoly(build_d(j))
    rhs = _poly_mul(charpoly(j), _in_square(charpoly(exterior_square(j))))
    return lhs == rhs


def intertwine_check(m: RationalMatrix, n: RationalMatrix, x: RationalMatrix) -> bool:
    """D_M (X (x) X) == (X (x) X) D_N, given MX = XN."""
    if m @ x != x @ n:
        raise PreconditionViolated("MX != XN")
    xx = kron(x, x)
    return build_d(m) @ xx == xx @ build_d(n)


# ---------------------------------------------------------------------------
# Random instances
# ---------------------------------------------------------------------------

def _random_block(rng: random.Random) -> RationalMatrix:
    a, b, c = rng.choice(PYTHAGOREAN_TRIPLES)
    if rng.random() < 0.5:
        a, b = b, a
    cos, sin = Fraction(a, c) * rng.choice((1, -1)), Fraction(b, c) * rng.choice((1, -1))
    return RationalMatrix.rotation(cos, sin) if rng.random() < 0.7 else RationalMatrix.reflection(cos, sin)


def random_block_orthogonal(n: int, rng: random.Random) -> tuple[RationalMatrix, list[int]]:
    """Block diagonal orthogonal matrix of +-1 entries and Pythagorean 2x2 blocks, with its block sizes."""
    blocks: list[RationalMatrix] = []
    sizes: list[int] = []
    remaining = n
    while remaining:
        if remaining >= 2 and rng.random() < 0.6:
            blocks.append(_random_block(rng))
            sizes.append(2)
            remaining -= 2
        else:
            blocks.append(RationalMatrix.from_rows([[rng.choice((1, -1))]]))
            sizes.append(1)
            remaining -= 1
    return RationalMatrix.block_diagonal(blocks), sizes


def signed_permutation(n: int, rng: random.Random) -> RationalMatrix:
    order = list(range(n))
    rng.shuffle(order)
    return RationalMatrix.from_rows(
        [rng.choice((1, -1)) if j == order[i] else 0 for j in range(n)] for i in range(n)
    )


def random_orthogonal(n: int, rng: random.Random) -> RationalMatrix:
    block, _ = random_block_orthogonal(n, rng)
    perm = signed_permutation(n, rng)
    return perm @ block @ perm.transpose()


def random_jordan(size: int, rng: random.Random) -> RationalMatrix:
    """Upper bidiagonal: random rational diagonal, 0 or 1 above it."""
    diag = [Fraction(rng.randint(-4, 4), rng.randint(1, 3)) for _ in range(size)]
    return RationalMatrix.from_rows(
        [diag[i] if i == j else (rng.randint(0, 1) if j == i + 1 else 0) for j in range(size)]
        for i in range(size)
    )


def random_matrix(n: int, rng: random.Random, bound: int = 3) -> RationalMatrix:
    return RationalMatrix.from_rows([[rng.randint(-bound, bound) for _ in range(n)] for _ in range(n)])


def random_invertible(n: int, rng: random.Random) -> RationalMatrix:
    while True:
        candidate = random_matrix(n, rng)
        if rank(candidate) == n:
            return candidate
