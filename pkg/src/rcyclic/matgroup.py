"""Cyclic-group matrix calculus in floating point.

``S`` shifts the standard basis backwards (ones on the superdiagonal and in
the bottom-left corner) and ``Dw = diag(1, w, ..., w^(d-1))`` with
``w = exp(2 pi i / d)``. Indices are 0-based and taken mod ``d``.

Matrices may carry block metadata ``(d1, m)``: the matrix is then a
``d1 x d1`` array of ``m x m`` blocks, and every outer-index operation acts on
whole blocks.
"""

from __future__ import annotations

import io
from dataclasses import dataclass

import numpy as np

COMMUTATION_TOL = 1e-12
FORMULA_TOL = 1e-10


@dataclass(frozen=True)
class ComplexMatrix:
    data: np.ndarray
    d1: int | None = None
    m: int | None = None

    def __post_init__(self):
        arr = np.asarray(self.data, dtype=complex)
        if arr.ndim != 2:
            raise ValueError("matrix must be two-dimensional")
        object.__setattr__(self, "data", arr)
        if (self.d1 is None) != (self.m is None):
            raise ValueError("block metadata needs both d1 and m")
        if self.d1 is not None:
            if self.d1 < 1 or self.m < 1 or arr.shape != (self.d1 * self.m, self.d1 * self.m):
                raise ValueError(f"shape {arr.shape} does not split into {self.d1}x{self.d1} blocks of size {self.m}")

    @property
    def shape(self):
        return self.data.shape

    @property
    def outer(self) -> int:
        """Outer dimension: number of block rows (or rows when unblocked)."""
        return self.d1 if self.d1 is not None else self.data.shape[0]

    @property
    def inner(self) -> int:
        return self.m if self.m is not None else 1

    def with_data(self, data) -> "ComplexMatrix":
        return ComplexMatrix(data, self.d1, self.m)

    def block(self, i: int, j: int) -> np.ndarray:
        m = self.inner
        return self.data[i * m:(i + 1) * m, j * m:(j + 1) * m]


def as_matrix(x, d1: int | None = None) -> ComplexMatrix:
    if isinstance(x, ComplexMatrix):
        return x
    arr = np.asarray(x, dtype=complex)
    if d1 is None:
        return ComplexMatrix(arr)
    if arr.shape[0] % d1:
        raise ValueError(f"{arr.shape[0]} rows do not split into {d1} blocks")
    return ComplexMatrix(arr, d1, arr.shape[0] // d1)


def _square(x: ComplexMatrix):
    r, c = x.shape
    if r != c:
        raise ValueError(f"expected a square matrix, got {r}x{c}")


@dataclass(frozen=True)
class CyclicPair:
    d: int
    S: np.ndarray
    Dw: np.ndarray

    @property
    def omega(self) -> complex:
        return np.exp(2j * np.pi / self.d)


def make_cyclic_pair(d: int) -> CyclicPair:
    if d < 1:
        raise ValueError("d must be at least 1")
    S = np.zeros((d, d), dtype=complex)
    for i in range(d):
        S[i, (i + 1) % d] = 1
    Dw = np.diag(np.exp(2j * np.pi * np.arange(d) / d))
    return CyclicPair(d, S, Dw)


def _lift(a: np.ndarray, m: int) -> np.ndarray:
    """Act blockwise: a (x) 1_m."""
    return a if m == 1 else np.kron(a, np.eye(m))


def diag_part(x, k: int) -> ComplexMatrix:
    """Keep the (block) entries at j = i + k (mod d), zero elsewhere."""
    x = as_matrix(x)
    _square(x)
    d, m = x.outer, x.inner
    k %= d
    mask = np.zeros((d, d))
    for i in range(d):
        mask[i, (i + k) % d] = 1
    return x.with_data(x.data * np.kron(mask, np.ones((m, m))))


def transpose(x) -> ComplexMatrix:
    """Full transpose (no conjugation)."""
    x = as_matrix(x)
    return x.with_data(x.data.T)


def cond_exp_blocks(x, d1: int | None = None) -> ComplexMatrix:
    """E: zero every off-diagonal outer block."""
    x = _blocked(x, d1)
    return diag_part(x, 0)


def phi_tilde_numeric(x, d1: int | None = None) -> np.ndarray:
    """Normalized traces of the diagonal blocks (tau = trace / m)."""
    x = _blocked(x, d1)
    return np.array([np.trace(x.block(i, i)) / x.inner for i in range(x.outer)])


def _blocked(x, d1):
    if isinstance(x, ComplexMatrix):
        if d1 is not None and x.d1 is not None and x.d1 != d1:
            raise ValueError(f"matrix has d1={x.d1}, asked for {d1}")
        if x.d1 is None and d1 is not None:
            return as_matrix(x.data, d1)
        return x
    if d1 is None:
        raise ValueError("block metadata missing: pass d1")
    return as_matrix(x, d1)


def averaging_expectation(x) -> ComplexMatrix:
    """(1/d) sum_i Dw^i X Dw^-i, with Dw acting blockwise."""
    x = as_matrix(x)
    d, m = x.outer, x.inner
    Dw = _lift(make_cyclic_pair(d).Dw, m)
    Dinv = Dw.conj()
    acc = np.zeros_like(x.data)
    P, Q = np.eye(d * m), np.eye(d * m)
    for _ in range(d):
        acc += P @ x.data @ Q
        P, Q = Dw @ P, Q @ Dinv
    return x.with_data(acc / d)


def xk_via_expectation(x, k: int) -> ComplexMatrix:
    """E(X S^-k) S^k."""
    x = as_matrix(x)
    _square(x)
    d, m = x.outer, x.inner
    Sk = _lift(np.linalg.matrix_power(make_cyclic_pair(d).S, k % d), m)
    e = cond_exp_blocks(x.with_data(x.data @ Sk.conj().T)).data
    return x.with_data(e @ Sk)


def _fourier_sum(x: ComplexMatrix, k: int) -> np.ndarray:
    """(1/d) sum_{i=1..d} w^(ik) Dw^i X Dw^-i."""
    d, m = x.outer, x.inner
    cp = make_cyclic_pair(d)
    acc = np.zeros_like(x.data)
    for i in range(1, d + 1):
        Di = _lift(np.linalg.matrix_power(cp.Dw, i % d), m)
        acc += cp.omega ** (i * k) * (Di @ x.data @ Di.conj())
    return acc / d


def xk_via_fourier(x, k: int) -> ComplexMatrix:
    x = as_matrix(x)
    _square(x)
    return x.with_data(_fourier_sum(x, k))


def yk_via_fourier(x, k: int) -> ComplexMatrix:
    """S^k [(1/d) sum_i w^(-ik) Dw^i X Dw^-i] S^k: the k-th diagonal part of X^t."""
    x = as_matrix(x)
    _square(x)
    d, m = x.outer, x.inner
    Sk = _lift(np.linalg.matrix_power(make_cyclic_pair(d).S, k % d), m)
    return x.with_data(Sk @ _fourier_sum(x, -k) @ Sk)


def check_commutation(d: int) -> float:
    """Max deviation of S^k D^l = w^(kl) D^l S^k and D^l S^k = w^(-kl) S^k D^l."""
    cp = make_cyclic_pair(d)
    worst = 0.0
    for k in range(d):
        Sk = np.linalg.matrix_power(cp.S, k)
        for l in range(d):
            Dl = np.linalg.matrix_power(cp.Dw, l)
            w = cp.omega ** (k * l)
            worst = max(worst, np.abs(Sk @ Dl - w * Dl @ Sk).max(), np.abs(Dl @ Sk - Sk @ Dl / w).max())
    return float(worst)


def shift_lemma_deviation(x) -> float:
    """Largest deviation over the four entry shifts and E(X S^k) = E(S^-k X^t)."""
    x = as_matrix(x).data
    _square(as_matrix(x))
    d = x.shape[0]
    S = make_cyclic_pair(d).S
    Sinv = S.conj().T
    idx = np.arange(d)
    worst = max(
        np.abs(x @ S - x[:, (idx - 1) % d]).max(),
        np.abs(S @ x - x[(idx + 1) % d, :]).max(),
        np.abs(x @ Sinv - x[:, (idx + 1) % d]).max(),
        np.abs(Sinv @ x - x[(idx - 1) % d, :]).max(),
    )
    for k in range(d):
        Sk = np.linalg.matrix_power(S, k)
        lhs = np.diag(np.diag(x @ Sk))
        rhs = np.diag(np.diag(np.linalg.matrix_power(Sinv, k) @ x.T))
        worst = max(worst, np.abs(lhs - rhs).max())
    return float(worst)


def check_shift_lemma(x, tol: float = COMMUTATION_TOL) -> bool:
    return shift_lemma_deviation(x) <= tol


def partial_transpose(x) -> ComplexMatrix:
    """Swap outer blocks (i, j) <-> (j, i); inner blocks are left as they are."""
    if not isinstance(x, ComplexMatrix) or x.d1 is None:
        raise ValueError("partial transpose needs block metadata (d1, m)")
    d1, m = x.d1, x.m
    t = x.data.reshape(d1, m, d1, m).transpose(2, 1, 0, 3).reshape(d1 * m, d1 * m)
    return x.with_data(t)


# -- CSV fixtures ----------------------------------------------------------


def _cell(z: complex) -> str:
    sign = "-" if np.signbit(z.imag) else "+"
    return f"{z.real!r}{sign}{abs(z.imag)!r}i"


def write_matrix_csv(x, fh=None) -> str:
    """Row-major CSV, one ``re+imi`` cell per entry (``1.5-0.25i``)."""
    data = as_matrix(x).data
    text = "\n".join(",".join(_cell(complex(z)) for z in row) for row in data) + "\n"
    if fh is not None:
        fh.write(text)
    return text


def read_matrix_csv(source, d1: int | None = None) -> ComplexMatrix:
    if isinstance(source, str):
        source = io.StringIO(source)
    rows = []
    for line in source:
        line = line.strip()
        if line:
            rows.append([complex(cell.strip().replace("i", "j")) for cell in line.split(",")])
    return as_matrix(np.array(rows, dtype=complex), d1)
