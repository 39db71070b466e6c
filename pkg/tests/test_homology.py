import random
from fractions import Fraction

import pytest

from homology import (
    NotOrthogonal,
    Phi3Sign,
    PreconditionViolated,
    RationalMatrix,
    SizeMismatch,
    UnsupportedSpectrum,
    block_eigenvalues,
    build_d,
    build_l,
    build_phi_stars,
    charpoly,
    charpoly_identity_check,
    exterior_square,
    ext_dims,
    hh_dims,
    id_plus_d_rank,
    intertwine_check,
    is_orthogonal,
    k_values,
    kron,
    random_block_orthogonal,
    random_invertible,
    random_jordan,
    random_matrix,
    random_orthogonal,
    rank,
)

ROTATION = RationalMatrix.rotation(Fraction(3, 5), Fraction(4, 5))
ID3 = RationalMatrix.identity(3)


def with_last(value):
    return RationalMatrix.block_diagonal([ROTATION, RationalMatrix.diagonal([value])])


# ---------------------------------------------------------------------------
# Matrices
# ---------------------------------------------------------------------------

class TestRationalMatrix:
    def test_from_rows_parses_rationals(self):
        m = RationalMatrix.from_rows([["1", "3/5"], [0, Fraction(-1, 2)]])
        assert m[0, 1] == Fraction(3, 5)
        assert m[1, 1] == Fraction(-1, 2)

    def test_ragged_rows(self):
        with pytest.raises(SizeMismatch):
            RationalMatrix.from_rows([[1, 2], [3]])

    def test_product_and_transpose(self):
        a = RationalMatrix.from_rows([[1, 2], [3, 4]])
        assert (a @ RationalMatrix.identity(2)) == a
        assert a.transpose() == RationalMatrix.from_rows([[1, 3], [2, 4]])
        assert (a - a).is_zero()
        with pytest.raises(SizeMismatch):
            a @ RationalMatrix.identity(3)

    def test_empty_transpose(self):
        empty = RationalMatrix.zeros(0, 3)
        assert empty.transpose().rows == 3
        assert rank(empty) == 0

    def test_inverse(self):
        a = RationalMatrix.from_rows([[2, 1], [1, 1]])
        assert a.inverse() == RationalMatrix.from_rows([[1, -1], [-1, 2]])
        with pytest.raises(PreconditionViolated):
            RationalMatrix.from_rows([[1, 2], [2, 4]]).inverse()

    def test_rank_and_charpoly(self):
        assert rank(RationalMatrix.from_rows([[1, 2], [2, 4]])) == 1
        assert charpoly(RationalMatrix.identity(2)) == [1, -2, 1]
        assert charpoly(RationalMatrix.zeros(0, 0)) == [1]

    def test_orthogonality(self):
        assert is_orthogonal(ROTATION)
        assert is_orthogonal(with_last(-1))
        assert not is_orthogonal(RationalMatrix.diagonal([2, 1]))
        with pytest.raises(SizeMismatch):
            is_orthogonal(RationalMatrix.zeros(2, 3))

    def test_kron_and_exterior_square(self):
        assert kron(RationalMatrix.identity(2), RationalMatrix.identity(2)) == RationalMatrix.identity(4)
        assert exterior_square(ID3) == ID3
        assert exterior_square(RationalMatrix.diagonal([2, 3, 5])) == RationalMatrix.diagonal([6, 10, 15])


# ---------------------------------------------------------------------------
# L, D and the 2x2 ranks
# ---------------------------------------------------------------------------

class TestLAndD:
    def test_l_of_identity_is_identity(self):
        assert build_l(ID3) == RationalMatrix.identity(9)

    def test_d_squares_to_kronecker(self):
        rng = random.Random(3)
        for _ in range(5):
            psi = random_matrix(3, rng)
            assert build_d(psi) @ build_d(psi) == kron(psi, psi)

    def test_two_by_two_ranks(self):
        assert id_plus_d_rank(ROTATION) == 3
        assert id_plus_d_rank(RationalMatrix.rotation(-1, 0)) == 1
        assert id_plus_d_rank(RationalMatrix.reflection(-1, 0)) == 3

    def test_charpoly_identity(self):
        rng = random.Random(11)
        for _ in range(5):
            assert charpoly_identity_check(random_jordan(rng.randint(2, 4), rng))

    def test_intertwining(self):
        rng = random.Random(5)
        x = random_invertible(3, rng)
        m = random_matrix(3, rng)
        assert intertwine_check(m, x.inverse() @ m @ x, x)

    def test_intertwining_precondition(self):
        m = RationalMatrix.diagonal([1, 2])
        x = RationalMatrix.from_rows([[1, 1], [0, 1]])
        with pytest.raises(PreconditionViolated):
            intertwine_check(m, m, x)


# ---------------------------------------------------------------------------
# Tor and Ext
# ---------------------------------------------------------------------------

class TestDimensions:
    @pytest.mark.parametrize(
        "omega, hh, ranks",
        [
            (ID3, (1, 3, 3, 1), (0, 6, 0)),
            (-ID3, (0, 5, 5, 0), (1, 3, 1)),
            (with_last(-1), (0, 1, 1, 0), (1, 7, 1)),
            (with_last(1), (0, 0, 0, 0), (1, 8, 1)),
        ],
    )
    def test_table_for_n_three(self, omega, hh, ranks):
        dims = hh_dims(ID3, omega)
        assert dims.hh == hh
        assert dims.ranks == ranks
        assert dims.to_dict() == {"hh": list(hh), "ranks": list(ranks)}

    @pytest.mark.parametrize("n", [4, 5])
    def test_identity_pairs(self, n):
        ident = RationalMatrix.identity(n)
        half = (n * n - n) // 2
        assert hh_dims(ident, ident).hh == (1, half, half, 1)
        other = (n * n + n - 2) // 2
        assert hh_dims(ident, -ident).hh == (0, other, other, 0)

    def test_maps_compose_to_zero(self):
        rng = random.Random(2)
        for _ in range(5):
            lam, omega = random_orthogonal(3, rng), random_orthogonal(3, rng)
            stars = build_phi_stars(lam, omega)
            assert (stars.m2 @ stars.m1.transpose()).is_zero()
            assert (stars.m3.transpose() @ stars.m2).is_zero()

    def test_euler_characteristic_vanishes(self):
        rng = random.Random(4)
        for _ in range(5):
            dims = hh_dims(random_orthogonal(3, rng), random_orthogonal(3, rng))
            assert dims.euler == 0

    def test_ext_equals_tor(self):
        rng = random.Random(9)
        for _ in range(5):
            n = rng.randint(3, 4)
            lam, omega = random_orthogonal(n, rng), random_orthogonal(n, rng)
            assert ext_dims(lam, omega) == hh_dims(lam, omega)

    def test_plus_sign_changes_top_degree(self):
        assert hh_dims(ID3, ID3, Phi3Sign.PLUS).hh == (1, 3, 2, 0)
        with pytest.raises(ValueError):
            hh_dims(ID3, ID3, "sideways")

    def test_rejects_bad_input(self):
        with pytest.raises(NotOrthogonal):
            hh_dims(ID3, RationalMatrix.diagonal([2, 1, 1]))
        with pytest.raises(SizeMismatch):
            hh_dims(ID3, RationalMatrix.identity(2))


# ---------------------------------------------------------------------------
# Spectra
# ---------------------------------------------------------------------------

class TestSpectrum:
    def test_k_values(self):
        assert k_values(with_last(-1), [2, 1]) == (1, 1)
        assert k_values(-ID3, [1, 1, 1]) == (3, 3)
        assert k_values(ID3, [1, 1, 1]) == (0, 3)

    def test_reflection_block_has_real_eigenvalues(self):
        reflection = RationalMatrix.reflection(Fraction(3, 5), Fraction(4, 5))
        assert sorted(block_eigenvalues(reflection, [2])) == [(-1, 0), (1, 0)]

    def test_unsupported_spectra(self):
        with pytest.raises(UnsupportedSpectrum):
            k_values(ID3, None)
        with pytest.raises(UnsupportedSpectrum):
            k_values(RationalMatrix.diagonal([2]), [1])
        with pytest.raises(UnsupportedSpectrum):
            k_values(ID3, [2, 2])
        with pytest.raises(UnsupportedSpectrum):
            k_values(ROTATION, [1, 1])

    def test_random_block_orthogonal_declares_its_blocks(self):
        rng = random.Random(8)
        for _ in range(10):
            psi, sizes = random_block_orthogonal(4, rng)
            assert is_orthogonal(psi)
            assert sum(sizes) == 4
            block_eigenvalues(psi, sizes)
