"""Fixed-size dense algebra on 3x3 matrices and 3x3x3 arrays.

Pure Python on purpose: every object here is tiny, and keeping the
arithmetic explicit makes the determinant/inverse formulas auditable.
Indices are 0-based everywhere except :func:`epsilon_pair`, which takes
the 1-based frame labels used in the physics.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

from .errors import IndexOutOfRange, SingularMatrix

SINGULAR_RTOL = 1e-12

Tensor3x3x3 = tuple  # nested tuple T[c][a][b]


@dataclass(frozen=True)
class Sym3:
    """Symmetric 3x3 matrix stored as its six independent entries."""

    m11: float
    m12: float
    m13: float
    m22: float
    m23: float
    m33: float

    @classmethod
    def identity(cls) -> Sym3:
        return cls(1.0, 0.0, 0.0, 1.0, 0.0, 1.0)

    @classmethod
    def diag(cls, a: float, b: float, c: float) -> Sym3:
        return cls(a, 0.0, 0.0, b, 0.0, c)

    @classmethod
    def from_rows(cls, rows: Sequence[Sequence[float]]) -> Sym3:
        """Build from a full matrix, reading the upper triangle only."""
        return cls(rows[0][0], rows[0][1], rows[0][2], rows[1][1], rows[1][2], rows[2][2])

    def __getitem__(self, ij: tuple[int, int]) -> float:
        i, j = ij
        if i > j:
            i, j = j, i
        return _SYM_GET[(i, j)](self)

    def rows(self) -> tuple[tuple[float, float, float], ...]:
        return (
            (self.m11, self.m12, self.m13),
            (self.m12, self.m22, self.m23),
            (self.m13, self.m23, self.m33),
        )

    def max_abs(self) -> float:
        return max(abs(self.m11), abs(self.m12), abs(self.m13),
                   abs(self.m22), abs(self.m23), abs(self.m33))

    def matvec(self, v: Sequence[float]) -> tuple[float, float, float]:
        r = self.rows()
        return tuple(r[i][0] * v[0] + r[i][1] * v[1] + r[i][2] * v[2] for i in range(3))


_SYM_GET = {
    (0, 0): lambda s: s.m11, (0, 1): lambda s: s.m12, (0, 2): lambda s: s.m13,
    (1, 1): lambda s: s.m22, (1, 2): lambda s: s.m23, (2, 2): lambda s: s.m33,
}


@dataclass(frozen=True)
class Mat3:
    """General 3x3 matrix, ``m[row][col]``."""

    rows: tuple[tuple[float, float, float], ...]

    def __post_init__(self):
        if len(self.rows) != 3 or any(len(r) != 3 for r in self.rows):
            raise ValueError("Mat3 needs exactly 3 rows of 3 entries")
        object.__setattr__(self, "rows", tuple(tuple(float(x) for x in r) for r in self.rows))

    @classmethod
    def identity(cls) -> Mat3:
        return cls(((1.0, 0.0, 0.0), (0.0, 1.0, 0.0), (0.0, 0.0, 1.0)))

    def __getitem__(self, i: int) -> tuple[float, float, float]:
        return self.rows[i]

    def transpose(self) -> Mat3:
        r = self.rows
        return Mat3(tuple(tuple(r[j][i] for j in range(3)) for i in range(3)))

    def max_abs(self) -> float:
        return max(abs(x) for row in self.rows for x in row)


def sym3_det(m: Sym3) -> float:
    return (m.m11 * (m.m22 * m.m33 - m.m23 * m.m23)
            - m.m12 * (m.m12 * m.m33 - m.m23 * m.m13)
            + m.m13 * (m.m12 * m.m23 - m.m22 * m.m13))


def _check_singular(det: float, scale: float) -> None:
    if abs(det) <= SINGULAR_RTOL * scale ** 3:
        raise SingularMatrix(f"determinant {det:.3e} below threshold for entry scale {scale:.3e}")


def sym3_inverse(m: Sym3) -> Sym3:
    """Inverse via the adjugate.

    Raises:
        SingularMatrix: if ``|det| <= 1e-12 * max|m_ij|**3``.
    """
    det = sym3_det(m)
    _check_singular(det, m.max_abs())
    c11 = m.m22 * m.m33 - m.m23 * m.m23
    c12 = m.m13 * m.m23 - m.m12 * m.m33
    c13 = m.m12 * m.m23 - m.m13 * m.m22
    c22 = m.m11 * m.m33 - m.m13 * m.m13
    c23 = m.m12 * m.m13 - m.m11 * m.m23
    c33 = m.m11 * m.m22 - m.m12 * m.m12
    return Sym3(c11 / det, c12 / det, c13 / det, c22 / det, c23 / det, c33 / det)


def mat3_det(m: Mat3) -> float:
    r = m.rows
    return (r[0][0] * (r[1][1] * r[2][2] - r[1][2] * r[2][1])
            - r[0][1] * (r[1][0] * r[2][2] - r[1][2] * r[2][0])
            + r[0][2] * (r[1][0] * r[2][1] - r[1][1] * r[2][0]))


def mat3_inverse(m: Mat3) -> Mat3:
    det = mat3_det(m)
    _check_singular(det, m.max_abs())
    r = m.rows
    cof = [[0.0] * 3 for _ in range(3)]
    for i in range(3):
        for j in range(3):
            i1, i2 = [k for k in range(3) if k != i]
            j1, j2 = [k for k in range(3) if k != j]
            minor = r[i1][j1] * r[i2][j2] - r[i1][j2] * r[i2][j1]
            cof[i][j] = (-1) ** (i + j) * minor
    # inverse = adj / det, adj = cof^T
    return Mat3(tuple(tuple(cof[j][i] / det for j in range(3)) for i in range(3)))


def mat3_mul(a: Mat3, b: Mat3) -> Mat3:
    return Mat3(tuple(
        tuple(sum(a.rows[i][k] * b.rows[k][j] for k in range(3)) for j in range(3))
        for i in range(3)
    ))


def epsilon_pair(A: int, B: int) -> tuple[tuple[int, ...], ...]:
    """Antisymmetric pair symbol eps^{AB}_{ab} = d^A_a d^B_b - d^A_b d^B_a.

    ``A`` and ``B`` are 1-based frame labels; the returned array is 0-based,
    so ``epsilon_pair(1, 3)[0][2] == 1``.
    """
    for idx in (A, B):
        if idx not in (1, 2, 3):
            raise IndexOutOfRange(f"frame index {idx!r} outside 1..3")
    return tuple(
        tuple(int(a == A - 1 and b == B - 1) - int(a == B - 1 and b == A - 1) for b in range(3))
        for a in range(3)
    )


def zero_tensor3() -> list:
    return [[[0.0] * 3 for _ in range(3)] for _ in range(3)]


def freeze_tensor3(t) -> Tensor3x3x3:
    return tuple(tuple(tuple(float(x) for x in row) for row in plane) for plane in t)


def _contract_pair(A: int, B: int, inv: Sym3) -> list[list[float]]:
    """eps^{AB}_{cd} m^{ac} m^{bd} for a symmetric ``inv``."""
    eps = epsilon_pair(A, B)
    return [[sum(eps[c][d] * inv[a, c] * inv[b, d] for c in range(3) for d in range(3)) for b in range(3)]
            for a in range(3)]


# (A, B) -> the three (coefficient entry, pair) terms of the expansion
_EXPANSIONS = {
    (1, 2): (((2, 2), (1, 2)), ((1, 2), (3, 1)), ((0, 2), (2, 3))),
    (3, 1): (((1, 1), (3, 1)), ((1, 2), (1, 2)), ((0, 1), (2, 3))),
    (2, 3): (((0, 2), (1, 2)), ((0, 1), (3, 1)), ((0, 0), (2, 3))),
}


def epsilon_identity_residuals(m: Sym3) -> dict[str, float]:
    """Relative residuals of the pair-contraction identities for an SPD ``m``.

    ``"general"`` checks eps^{AB}_{cd} m^{ac} m^{bd} = m^{aA} m^{bB} - m^{aB} m^{bA}
    over all (A, B).  The keys ``"12"``, ``"31"``, ``"23"`` check the expanded
    forms det(m) eps^{AB}_{cd} m^{ac} m^{bd} = sum of m_xy eps^{ab}_{..}.
    """
    inv = sym3_inverse(m)
    det = sym3_det(m)
    out = {}
    worst = 0.0
    for A in (1, 2, 3):
        for B in (1, 2, 3):
            lhs = _contract_pair(A, B, inv)
            for a in range(3):
                for b in range(3):
                    rhs = inv[a, A - 1] * inv[b, B - 1] - inv[a, B - 1] * inv[b, A - 1]
                    worst = max(worst, abs(lhs[a][b] - rhs) / max(inv.max_abs() ** 2, 1e-300))
    out["general"] = worst
    for (A, B), terms in _EXPANSIONS.items():
        lhs = _contract_pair(A, B, inv)
        worst = 0.0
        for a in range(3):
            for b in range(3):
                rhs = sum(m[ij] * epsilon_pair(*pair)[a][b] for ij, pair in terms)
                worst = max(worst, abs(det * lhs[a][b] - rhs) / m.max_abs())
        out[f"{A}{B}"] = worst
    return out
