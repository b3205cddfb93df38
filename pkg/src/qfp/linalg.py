"""Numerical substrate: Haar sampling, orthonormalization, trace norms.

States are plain numpy arrays wrapped in thin value types that check the
relevant invariants at construction. Low-rank density operators keep
their pure components; dense matrices are materialized only where an
eigendecomposition is unavoidable.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
from numpy.random import Generator

NORM_TOL = 1e-9
ORTHO_TOL = 1e-8
GS_DROP_TOL = 1e-8


class DimensionMismatchError(ValueError):
    pass


class InvalidDimensionError(ValueError):
    pass


@dataclass(frozen=True)
class UnitVector:
    """Unit vector in C^dim; norm checked to 1e-9."""

    dim: int
    amplitudes: np.ndarray

    def __post_init__(self):
        amps = np.asarray(self.amplitudes, dtype=np.complex128)
        if amps.shape != (self.dim,):
            raise DimensionMismatchError(
                f"expected {self.dim} amplitudes, got shape {amps.shape}")
        nrm = np.linalg.norm(amps)
        if abs(nrm - 1.0) > NORM_TOL:
            raise ValueError(f"norm {nrm!r} is not 1 within {NORM_TOL}")
        object.__setattr__(self, "amplitudes", amps)

    @classmethod
    def normalized(cls, raw: np.ndarray) -> "UnitVector":
        raw = np.asarray(raw, dtype=np.complex128)
        nrm = np.linalg.norm(raw)
        if nrm == 0:
            raise ValueError("cannot normalize the zero vector")
        return cls(raw.shape[0], raw / nrm)


@dataclass(frozen=True)
class DensityOperator:
    """Density operator, stored dense or as weighted pure components.

    Component storage is preferred for rank much below the dimension:
    memory then scales with rank * dim instead of dim^2.
    """

    dim: int
    matrix: np.ndarray | None = None
    components: tuple[tuple[float, UnitVector], ...] | None = None

    def __post_init__(self):
        if (self.matrix is None) == (self.components is None):
            raise ValueError("provide exactly one of matrix, components")
        if self.matrix is not None:
            m = np.asarray(self.matrix, dtype=np.complex128)
            if m.shape != (self.dim, self.dim):
                raise DimensionMismatchError(f"bad shape {m.shape}")
            if np.abs(m - m.conj().T).max() > NORM_TOL:
                raise ValueError("matrix is not Hermitian within 1e-9")
            if abs(np.trace(m).real - 1.0) > NORM_TOL:
                raise ValueError("trace is not 1 within 1e-9")
            if np.linalg.eigvalsh(m).min() < -NORM_TOL:
                raise ValueError("negative eigenvalue below -1e-9")
            object.__setattr__(self, "matrix", m)
        else:
            comps = tuple(self.components)
            if not comps:
                raise ValueError("empty component list")
            for w, vec in comps:
                if w < 0:
                    raise ValueError("negative component weight")
                if vec.dim != self.dim:
                    raise DimensionMismatchError("component dimension differs")
            if abs(sum(w for w, _ in comps) - 1.0) > NORM_TOL:
                raise ValueError("component weights do not sum to 1")
            object.__setattr__(self, "components", comps)

    @classmethod
    def from_pure(cls, vec: UnitVector) -> "DensityOperator":
        return cls(vec.dim, components=((1.0, vec),))

    @classmethod
    def from_mixture(cls, weighted: list[tuple[float, UnitVector]]) -> "DensityOperator":
        return cls(weighted[0][1].dim, components=tuple(weighted))

    def to_dense(self) -> np.ndarray:
        if self.matrix is not None:
            return self.matrix
        out = np.zeros((self.dim, self.dim), dtype=np.complex128)
        for w, vec in self.components:
            out += w * np.outer(vec.amplitudes, vec.amplitudes.conj())
        return out

    def expectation(self, v: np.ndarray) -> float:
        """<v|rho|v> for a (not necessarily unit) vector v."""
        if self.components is not None:
            return float(sum(w * abs(np.vdot(u.amplitudes, v)) ** 2
                             for w, u in self.components))
        return float(np.real(np.vdot(v, self.matrix @ v)))


@dataclass(frozen=True)
class OrthonormalBasis:
    """Complete orthonormal basis; rows of ``matrix`` are the vectors."""

    dim: int
    matrix: np.ndarray = field(repr=False)

    def __post_init__(self):
        m = np.asarray(self.matrix, dtype=np.complex128)
        if m.shape != (self.dim, self.dim):
            raise DimensionMismatchError(f"bad shape {m.shape}")
        gram = m @ m.conj().T
        if np.abs(gram - np.eye(self.dim)).max() > ORTHO_TOL:
            raise ValueError("rows are not orthonormal within 1e-8")
        object.__setattr__(self, "matrix", m)

    @property
    def vectors(self) -> list[UnitVector]:
        return [UnitVector(self.dim, row) for row in self.matrix]


def haar_unit_vector(dim: int, rng: Generator) -> UnitVector:
    """Spherically symmetric unit vector in C^dim.

    Draws 2*dim independent standard normals as real and imaginary
    parts, then normalizes.
    """
    if dim < 1:
        raise InvalidDimensionError("dimension must be >= 1")
    raw = rng.standard_normal(dim) + 1j * rng.standard_normal(dim)
    return UnitVector.normalized(raw)


def haar_matrix(dim: int, rng: Generator) -> np.ndarray:
    """Haar unitary: Ginibre matrix, QR, R-diagonal phases absorbed."""
    if dim < 1:
        raise InvalidDimensionError("dimension must be >= 1")
    z = rng.standard_normal((dim, dim)) + 1j * rng.standard_normal((dim, dim))
    q, r = np.linalg.qr(z)
    d = np.diagonal(r)
    return q * (d / np.abs(d))


def haar_basis(dim: int, rng: Generator) -> OrthonormalBasis:
    """Haar-distributed orthonormal basis (columns of a Haar unitary)."""
    return OrthonormalBasis(dim, haar_matrix(dim, rng).T)


def gram_schmidt(vectors: list[np.ndarray], tol: float = GS_DROP_TOL):
    """Sequential Gram-Schmidt preserving input order.

    Implements v'_i = u_i - sum_{j<i} v_j <v_j, u_i>, v_i = v'_i / |v'_i|.
    A vector whose residual norm falls below ``tol`` is dropped rather
    than normalized; drops are reported, not hidden, because for random
    near-orthogonal inputs rank deficiency is an exceptional event.

    Returns (orthonormal rows as an ndarray, list of dropped indices).
    """
    if not vectors:
        return np.zeros((0, 0), dtype=np.complex128), []
    dim = np.asarray(vectors[0]).shape[0]
    kept: list[np.ndarray] = []
    dropped: list[int] = []
    for idx, u in enumerate(vectors):
        u = np.asarray(u, dtype=np.complex128)
        if u.shape != (dim,):
            raise DimensionMismatchError(f"vector {idx} has shape {u.shape}")
        v = u.copy()
        for w in kept:
            v -= w * np.vdot(w, u)
        nrm = np.linalg.norm(v)
        if nrm < tol:
            dropped.append(idx)
            continue
        kept.append(v / nrm)
    frame = np.array(kept) if kept else np.zeros((0, dim), dtype=np.complex128)
    return frame, dropped


def _as_dense(state) -> np.ndarray:
    if isinstance(state, DensityOperator):
        return state.to_dense()
    return np.asarray(state, dtype=np.complex128)


def trace_distance(s1, s2) -> float:
    """Trace norm |s1 - s2|_1 = sum of |eigenvalues| of the difference."""
    a, b = _as_dense(s1), _as_dense(s2)
    if a.shape != b.shape:
        raise DimensionMismatchError(f"shapes {a.shape} and {b.shape} differ")
    return float(np.abs(np.linalg.eigvalsh(a - b)).sum())


def pure_trace_distance(v: np.ndarray, w: np.ndarray) -> float:
    """Trace distance between |v><v| and |w><w|: 2*sqrt(1 - |<v|w>|^2)."""
    ov = abs(np.vdot(v, w)) ** 2
    return 2.0 * float(np.sqrt(max(0.0, 1.0 - ov)))
