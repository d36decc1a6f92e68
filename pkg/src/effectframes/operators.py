"""Dense Hermitian operator spaces.

The d x d complex Hermitian matrices form a real vector space of dimension
d**2 carrying the trace inner product ``<A, B> = Tr(AB)``.  This module
provides the immutable operator value type, a cyclic Jacobi eigensolver for
small dense Hermitian matrices, operator bases of the full space together
with coordinate expansion and change-of-basis maps, and the JSON wire format
for operators.

Conventions: eigenvalues are always returned in descending order, operator
norms are Hilbert-Schmidt (Frobenius) norms, and every public value is
immutable after construction.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import cached_property
from typing import Iterable, NamedTuple

import numpy as np

__all__ = [
    "DEFAULT_TOL",
    "HERMITICITY_ATOL",
    "ChangeOfBasis",
    "CoefficientVector",
    "DimensionMismatchError",
    "EigensolverError",
    "HermitianOperator",
    "NonHermitianError",
    "OperatorBasis",
    "SingularBasisError",
    "ToleranceConfig",
    "change_of_basis",
    "eig_hermitian",
    "expand",
    "hs_distance",
    "hs_inner",
    "identity",
    "operator_from_jsonable",
    "operator_to_jsonable",
    "orthonormal_operator_basis",
    "rank_one",
    "real_coordinates",
    "zero",
]

# Maximum relative asymmetry tolerated when reading an operator from the
# wire format or from a raw matrix.
HERMITICITY_ATOL = 1e-12


class DimensionMismatchError(ValueError):
    """Operands live on Hilbert spaces of different dimension."""


class NonHermitianError(ValueError):
    """Input matrix is not Hermitian within the admissible asymmetry."""


class EigensolverError(RuntimeError):
    """Jacobi sweeps exhausted before the off-diagonal norm converged."""


class SingularBasisError(ValueError):
    """Operator set is numerically rank deficient for the requested solve."""


@dataclass(frozen=True)
class ToleranceConfig:
    """Numerical tolerances used throughout the package.

    Attributes
    ----------
    eig_offdiag : float
        Eigensolver convergence: sweep until the off-diagonal Frobenius
        norm falls below this value (scaled by max(1, ||A||_F)).
    psd_slack : float
        Magnitude of negative eigenvalues tolerated in positivity checks.
    residual : float
        Acceptable decomposition / reconstruction residual.
    rank_cutoff : float
        Singular values below ``rank_cutoff * sigma_max`` count as zero.
    """

    eig_offdiag: float = 1e-13
    psd_slack: float = 1e-9
    residual: float = 1e-8
    rank_cutoff: float = 1e-8

    def __post_init__(self) -> None:
        for name in ("eig_offdiag", "psd_slack", "residual", "rank_cutoff"):
            value = getattr(self, name)
            if not (isinstance(value, (int, float)) and value > 0):
                raise ValueError(f"tolerance {name!r} must be strictly positive, got {value!r}")
        if self.psd_slack > self.residual:
            raise ValueError(
                f"psd_slack ({self.psd_slack}) must not exceed residual ({self.residual})"
            )


DEFAULT_TOL = ToleranceConfig()


class HermitianOperator:
    """Immutable Hermitian operator on C^d.

    The stored matrix satisfies ``mat[j, k] == conj(mat[k, j])`` exactly:
    construction symmetrizes via ``(M + M^dagger) / 2``, which is an exact
    no-op for already-Hermitian IEEE input.  Raw input whose asymmetry
    exceeds `atol` is rejected.
    """

    __slots__ = ("_mat", "_eig_cache")

    def __init__(self, entries, *, atol: float = HERMITICITY_ATOL):
        mat = np.array(entries, dtype=np.complex128)
        if mat.ndim != 2 or mat.shape[0] != mat.shape[1]:
            raise ValueError(f"expected a square matrix, got shape {mat.shape}")
        if mat.shape[0] < 1:
            raise ValueError("dimension must be at least 1")
        if not np.all(np.isfinite(mat.view(np.float64))):
            raise ValueError("matrix entries must be finite")
        asym = np.max(np.abs(mat - mat.conj().T)) if mat.size else 0.0
        scale = max(1.0, float(np.max(np.abs(mat))))
        if asym > atol * scale:
            raise NonHermitianError(
                f"matrix asymmetry {asym:.3e} exceeds {atol:.1e} * {scale:.3e}"
            )
        mat = (mat + mat.conj().T) / 2
        mat.setflags(write=False)
        object.__setattr__(self, "_mat", mat)
        object.__setattr__(self, "_eig_cache", None)

    def __setattr__(self, name, value):
        raise AttributeError("HermitianOperator is immutable")

    @property
    def dim(self) -> int:
        return self._mat.shape[0]

    @property
    def mat(self) -> np.ndarray:
        """Read-only view of the underlying complex matrix."""
        return self._mat

    def trace(self) -> float:
        return float(np.trace(self._mat).real)

    def norm(self) -> float:
        """Hilbert-Schmidt norm induced by the trace inner product."""
        return float(np.linalg.norm(self._mat))

    def __add__(self, other: "HermitianOperator") -> "HermitianOperator":
        _check_same_dim(self, other)
        return HermitianOperator(self._mat + other._mat)

    def __sub__(self, other: "HermitianOperator") -> "HermitianOperator":
        _check_same_dim(self, other)
        return HermitianOperator(self._mat - other._mat)

    def __neg__(self) -> "HermitianOperator":
        return HermitianOperator(-self._mat)

    def __mul__(self, scalar) -> "HermitianOperator":
        if not isinstance(scalar, (int, float, np.integer, np.floating)):
            return NotImplemented
        return HermitianOperator(self._mat * float(scalar))

    __rmul__ = __mul__

    def __repr__(self) -> str:
        return f"HermitianOperator(dim={self.dim})"


def _check_same_dim(a: HermitianOperator, b: HermitianOperator) -> None:
    if a.dim != b.dim:
        raise DimensionMismatchError(f"dimension mismatch: {a.dim} vs {b.dim}")


def identity(d: int) -> HermitianOperator:
    return HermitianOperator(np.eye(d, dtype=np.complex128))


def zero(d: int) -> HermitianOperator:
    return HermitianOperator(np.zeros((d, d), dtype=np.complex128))


def rank_one(vec) -> HermitianOperator:
    """Projector-style operator |v><v| for a complex vector v."""
    v = np.asarray(vec, dtype=np.complex128).reshape(-1)
    return HermitianOperator(np.outer(v, v.conj()))


def hs_inner(a: HermitianOperator, b: HermitianOperator) -> float:
    """Trace inner product Tr(AB) of two Hermitian operators.

    Symmetric in its arguments and real for Hermitian input; the imaginary
    rounding residue is discarded.
    """
    _check_same_dim(a, b)
    # Tr(AB) = sum_jk A[j,k] * conj(B[j,k]) for Hermitian B.
    return float(np.vdot(b.mat, a.mat).real)


def hs_distance(a: HermitianOperator, b: HermitianOperator) -> float:
    _check_same_dim(a, b)
    return float(np.linalg.norm(a.mat - b.mat))


# ---------------------------------------------------------------------------
# Cyclic Jacobi eigensolver
# ---------------------------------------------------------------------------

def _jacobi_rotate(a: np.ndarray, v: np.ndarray, p: int, q: int) -> None:
    """Zero a[p, q] with a unitary plane rotation, updating a and v in place."""
    apq = a[p, q]
    r = abs(apq)
    u = apq / r
    alpha = a[p, p].real
    beta = a[q, q].real
    # Angle for the real symmetric 2x2 block [[alpha, r], [r, beta]].
    tau = (beta - alpha) / (2.0 * r)
    if tau >= 0.0:
        t = 1.0 / (tau + math.hypot(1.0, tau))
    else:
        t = -1.0 / (-tau + math.hypot(1.0, tau))
    c = 1.0 / math.sqrt(1.0 + t * t)
    s = t * c
    su = s * u
    suc = s * u.conjugate()

    # A <- R^dagger A R with R the identity apart from
    # R[p,p]=c, R[p,q]=s*u, R[q,p]=-s*conj(u), R[q,q]=c.
    col_p = a[:, p].copy()
    col_q = a[:, q].copy()
    a[:, p] = c * col_p - suc * col_q
    a[:, q] = su * col_p + c * col_q
    row_p = a[p, :].copy()
    row_q = a[q, :].copy()
    a[p, :] = c * row_p - su * row_q
    a[q, :] = suc * row_p + c * row_q
    a[p, q] = 0.0
    a[q, p] = 0.0
    a[p, p] = a[p, p].real
    a[q, q] = a[q, q].real

    col_p = v[:, p].copy()
    col_q = v[:, q].copy()
    v[:, p] = c * col_p - suc * col_q
    v[:, q] = su * col_p + c * col_q


def _offdiag_norm(a: np.ndarray) -> float:
    off = a - np.diag(np.diag(a))
    return float(np.linalg.norm(off))


def eig_hermitian(
    a: HermitianOperator,
    tol: ToleranceConfig = DEFAULT_TOL,
    max_sweeps: int = 100,
) -> tuple[np.ndarray, np.ndarray]:
    """Full eigendecomposition of a Hermitian operator by cyclic Jacobi sweeps.

    Parameters
    ----------
    a : HermitianOperator
        Operator to diagonalize.
    tol : ToleranceConfig
        Convergence is declared when the off-diagonal Frobenius norm drops
        below ``tol.eig_offdiag * max(1, ||a||_F)``.
    max_sweeps : int
        Sweep limit before `EigensolverError` is raised.

    Returns
    -------
    (eigenvalues, eigenvectors)
        Eigenvalues as a real array sorted in descending order and the
        matching orthonormal eigenvectors as columns of a complex matrix,
        so that ``V diag(w) V^dagger`` reconstructs the input.
    """
    cache = a._eig_cache
    if cache is not None and cache[0] == tol.eig_offdiag:
        return cache[1], cache[2]

    d = a.dim
    work = np.array(a.mat, dtype=np.complex128)
    vecs = np.eye(d, dtype=np.complex128)
    thresh = tol.eig_offdiag * max(1.0, float(np.linalg.norm(work)))
    if d > 1:
        skip = thresh / (d * d)
        converged = False
        for _ in range(max_sweeps):
            if _offdiag_norm(work) < thresh:
                converged = True
                break
            for p in range(d - 1):
                for q in range(p + 1, d):
                    if abs(work[p, q]) > skip:
                        _jacobi_rotate(work, vecs, p, q)
        else:
            converged = _offdiag_norm(work) < thresh
        if not converged:
            raise EigensolverError(
                f"no convergence after {max_sweeps} sweeps "
                f"(off-diagonal norm {_offdiag_norm(work):.3e}, threshold {thresh:.3e})"
            )

    w = np.diag(work).real.copy()
    order = np.argsort(-w, kind="stable")
    w = w[order]
    vecs = vecs[:, order]
    w.setflags(write=False)
    vecs.setflags(write=False)
    object.__setattr__(a, "_eig_cache", (tol.eig_offdiag, w, vecs))
    return w, vecs


# ---------------------------------------------------------------------------
# Real coordinates and operator bases
# ---------------------------------------------------------------------------

def real_coordinates(a: HermitianOperator) -> np.ndarray:
    """Isometric real coordinates of a Hermitian operator.

    Maps ``a`` to a real vector of length d**2 such that Euclidean inner
    products of coordinate vectors equal trace inner products of operators
    (diagonal entries, then sqrt(2)-scaled real and imaginary parts of the
    strict upper triangle).
    """
    m = a.mat
    d = a.dim
    iu = np.triu_indices(d, k=1)
    upper = m[iu]
    return np.concatenate(
        [np.diag(m).real, math.sqrt(2.0) * upper.real, math.sqrt(2.0) * upper.imag]
    )


def _operator_from_coordinates(coords: np.ndarray, d: int) -> HermitianOperator:
    iu = np.triu_indices(d, k=1)
    n_off = iu[0].size
    m = np.zeros((d, d), dtype=np.complex128)
    m[np.diag_indices(d)] = coords[:d]
    upper = (coords[d : d + n_off] + 1j * coords[d + n_off :]) / math.sqrt(2.0)
    m[iu] = upper
    m[iu[1], iu[0]] = upper.conj()
    return HermitianOperator(m)


BASIS_KINDS = ("orthonormal", "augmented", "mic-pom", "generic")


class OperatorBasis:
    """A basis of the real vector space of Hermitian operators on C^d.

    Holds exactly d**2 linearly independent Hermitian operators.  Linear
    independence is certified at construction time through the singular
    values of the real coordinate matrix; bases tagged ``orthonormal``
    additionally must have an identity Gram matrix.
    """

    __slots__ = ("_elements", "_kind", "_tol", "__dict__")

    def __init__(
        self,
        elements: Iterable[HermitianOperator],
        kind: str = "generic",
        tol: ToleranceConfig = DEFAULT_TOL,
    ):
        elements = tuple(elements)
        if kind not in BASIS_KINDS:
            raise ValueError(f"unknown basis kind {kind!r}")
        if not elements:
            raise ValueError("basis needs at least one element")
        d = elements[0].dim
        if any(el.dim != d for el in elements):
            raise DimensionMismatchError("basis elements must share one dimension")
        if len(elements) != d * d:
            raise ValueError(f"expected {d * d} elements for dim {d}, got {len(elements)}")
        self._elements = elements
        self._kind = kind
        self._tol = tol
        if self.rank < d * d:
            raise SingularBasisError(
                f"basis is rank deficient: rank {self.rank} < {d * d} "
                f"(sigma_min/sigma_max = {self.singular_values[-1] / self.singular_values[0]:.3e})"
            )
        if kind == "orthonormal":
            dev = float(np.max(np.abs(self.gram - np.eye(d * d))))
            if dev > tol.residual:
                raise ValueError(f"orthonormal basis has Gram deviation {dev:.3e}")

    @property
    def dim(self) -> int:
        return self._elements[0].dim

    @property
    def kind(self) -> str:
        return self._kind

    @property
    def elements(self) -> tuple[HermitianOperator, ...]:
        return self._elements

    def __len__(self) -> int:
        return len(self._elements)

    def __iter__(self):
        return iter(self._elements)

    def __getitem__(self, j: int) -> HermitianOperator:
        return self._elements[j]

    @cached_property
    def coordinate_matrix(self) -> np.ndarray:
        """d**2 x d**2 real matrix whose columns are element coordinates."""
        m = np.column_stack([real_coordinates(el) for el in self._elements])
        m.setflags(write=False)
        return m

    @cached_property
    def gram(self) -> np.ndarray:
        g = self.coordinate_matrix.T @ self.coordinate_matrix
        g.setflags(write=False)
        return g

    @cached_property
    def singular_values(self) -> np.ndarray:
        s = np.linalg.svd(self.coordinate_matrix, compute_uv=False)
        s.setflags(write=False)
        return s

    @property
    def rank(self) -> int:
        s = self.singular_values
        return int(np.count_nonzero(s > self._tol.rank_cutoff * s[0]))

    def __repr__(self) -> str:
        return f"OperatorBasis(dim={self.dim}, kind={self._kind!r})"


@dataclass(frozen=True, eq=False)
class CoefficientVector:
    """Coordinates of a Hermitian operator in a given basis."""

    basis: OperatorBasis
    coeffs: np.ndarray

    def __post_init__(self) -> None:
        coeffs = np.asarray(self.coeffs, dtype=np.float64)
        coeffs.setflags(write=False)
        object.__setattr__(self, "coeffs", coeffs)

    def recombine(self) -> HermitianOperator:
        """Reassemble sum_j coeffs[j] * basis[j]."""
        d = self.basis.dim
        acc = np.zeros((d, d), dtype=np.complex128)
        for cj, el in zip(self.coeffs, self.basis.elements):
            acc += cj * el.mat
        return HermitianOperator(acc)


def orthonormal_operator_basis(d: int, tol: ToleranceConfig = DEFAULT_TOL) -> OperatorBasis:
    """Closed-form orthonormal basis of the Hermitian operators on C^d.

    Consists of the normalized identity, the d-1 normalized traceless
    diagonal operators, and the normalized symmetric / antisymmetric
    off-diagonal pairs; exactly orthonormal before rounding.
    """
    if d < 2:
        raise ValueError("dimension must be at least 2")
    ops: list[HermitianOperator] = []
    eye = np.eye(d, dtype=np.complex128)
    ops.append(HermitianOperator(eye / math.sqrt(d)))
    for level in range(1, d):
        diag = np.zeros(d, dtype=np.complex128)
        diag[:level] = 1.0
        diag[level] = -level
        ops.append(HermitianOperator(np.diag(diag) / math.sqrt(level * (level + 1))))
    for j in range(d):
        for k in range(j + 1, d):
            sym = np.zeros((d, d), dtype=np.complex128)
            sym[j, k] = sym[k, j] = 1.0 / math.sqrt(2.0)
            ops.append(HermitianOperator(sym))
            antisym = np.zeros((d, d), dtype=np.complex128)
            antisym[j, k] = -1j / math.sqrt(2.0)
            antisym[k, j] = 1j / math.sqrt(2.0)
            ops.append(HermitianOperator(antisym))
    return OperatorBasis(ops, kind="orthonormal", tol=tol)


def expand(
    h: HermitianOperator,
    basis: OperatorBasis,
    tol: ToleranceConfig = DEFAULT_TOL,
) -> CoefficientVector:
    """Coordinates of ``h`` in ``basis`` via the Gram-matrix normal equations.

    Raises `SingularBasisError` when the basis condition exceeds the
    configured rank cutoff, and `DimensionMismatchError` on dimension
    mismatch.
    """
    if h.dim != basis.dim:
        raise DimensionMismatchError(f"operator dim {h.dim} vs basis dim {basis.dim}")
    s = basis.singular_values
    if s[-1] <= tol.rank_cutoff * s[0]:
        raise SingularBasisError(
            f"basis too ill-conditioned to expand (sigma_min/sigma_max = {s[-1] / s[0]:.3e})"
        )
    rhs = basis.coordinate_matrix.T @ real_coordinates(h)
    coeffs = np.linalg.solve(basis.gram, rhs)
    return CoefficientVector(basis=basis, coeffs=coeffs)


class ChangeOfBasis(NamedTuple):
    """Coordinate transport between two bases of the same operator space.

    ``matrix`` maps source coordinates to destination coordinates; the
    ``inverse_transpose`` is the matrix transporting linear functionals the
    opposite way.
    """

    matrix: np.ndarray
    inverse_transpose: np.ndarray


def change_of_basis(
    src: OperatorBasis,
    dst: OperatorBasis,
    tol: ToleranceConfig = DEFAULT_TOL,
) -> ChangeOfBasis:
    """Matrix D with ``D @ expand(H, src) = expand(H, dst)`` for all H."""
    if src.dim != dst.dim:
        raise DimensionMismatchError(f"basis dims differ: {src.dim} vs {dst.dim}")
    for basis in (src, dst):
        s = basis.singular_values
        if s[-1] <= tol.rank_cutoff * s[0]:
            raise SingularBasisError("cannot change between rank-deficient bases")
    d_mat = np.linalg.solve(dst.coordinate_matrix, src.coordinate_matrix)
    d_invt = np.linalg.solve(src.coordinate_matrix, dst.coordinate_matrix).T
    d_mat.setflags(write=False)
    d_invt.setflags(write=False)
    return ChangeOfBasis(matrix=d_mat, inverse_transpose=d_invt)


# ---------------------------------------------------------------------------
# JSON wire format
# ---------------------------------------------------------------------------

def operator_to_jsonable(a: HermitianOperator) -> dict:
    """Wire format ``{"dim": d, "entries": [[[re, im], ...], ...]}``."""
    entries = [
        [[float(x.real), float(x.imag)] for x in row]
        for row in a.mat
    ]
    return {"dim": a.dim, "entries": entries}


def operator_from_jsonable(obj: dict, atol: float = HERMITICITY_ATOL) -> HermitianOperator:
    """Parse the operator wire format, rejecting non-Hermitian input.

    Asymmetry beyond ``atol`` (relative to the largest entry) raises
    `NonHermitianError`; malformed payloads raise `ValueError`.
    """
    if not isinstance(obj, dict) or "dim" not in obj or "entries" not in obj:
        raise ValueError("operator JSON must carry 'dim' and 'entries'")
    d = int(obj["dim"])
    entries = obj["entries"]
    if len(entries) != d or any(len(row) != d for row in entries):
        raise ValueError(f"'entries' must be a {d}x{d} grid of [re, im] pairs")
    try:
        mat = np.array(
            [[complex(cell[0], cell[1]) for cell in row] for row in entries],
            dtype=np.complex128,
        )
    except (TypeError, IndexError) as exc:
        raise ValueError("each entry must be a [re, im] pair") from exc
    return HermitianOperator(mat, atol=atol)
