"""Symmetric generalized eigenvalue computation with diagonal mass matrices.

Every spectral quantity in the package reduces to the lowest eigenvalues of
``A u = lam * M u`` with ``A`` real symmetric positive semidefinite and ``M``
diagonal positive.  The generalized problem is reduced to an ordinary
symmetric one by the similarity ``M^{-1/2} A M^{-1/2}``, which is exact for
diagonal mass.  Dense problems go to LAPACK, larger ones to ARPACK
(Lanczos with full reorthogonalization) with a seeded start vector so runs
are reproducible.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
import scipy.linalg
import scipy.sparse
import scipy.sparse.linalg

from .errors import ArgumentError, NonConvergenceError

#: Relative eigenvalue accuracy of the dense path.
TOL_EIG_DENSE = 1e-9
#: Relative eigenvalue accuracy of the iterative path.
TOL_EIG_ITER = 1e-8
#: Dimension at or below which the dense solver is used.
DENSE_CUTOFF = 2000


@dataclass(frozen=True)
class SymMatrix:
    """Sparse real symmetric matrix stored as its upper triangle.

    Parameters
    ----------
    dimension : int
        Matrix size, at least 1.
    entries : dict
        Map ``(i, j) -> value`` with ``i <= j``.  Symmetry is a property of
        the representation: the lower triangle is implied.
    """

    dimension: int
    entries: dict = field(default_factory=dict)

    def __post_init__(self):
        if self.dimension < 1:
            raise ArgumentError("matrix dimension must be >= 1")
        for (i, j) in self.entries:
            if not (0 <= i <= j < self.dimension):
                raise ArgumentError(
                    f"entry ({i},{j}) outside upper triangle of "
                    f"dimension {self.dimension}"
                )

    def to_dense(self) -> np.ndarray:
        a = np.zeros((self.dimension, self.dimension))
        for (i, j), v in self.entries.items():
            a[i, j] += v
            if i != j:
                a[j, i] += v
        return a

    def to_csr(self) -> scipy.sparse.csr_matrix:
        rows, cols, vals = [], [], []
        for (i, j), v in self.entries.items():
            rows.append(i)
            cols.append(j)
            vals.append(v)
            if i != j:
                rows.append(j)
                cols.append(i)
                vals.append(v)
        return scipy.sparse.csr_matrix(
            (vals, (rows, cols)), shape=(self.dimension, self.dimension)
        )

    def matvec(self, u: np.ndarray) -> np.ndarray:
        return self.to_csr() @ u


class SymBuilder:
    """Accumulator for assembling a :class:`SymMatrix` entry by entry."""

    def __init__(self, dimension: int):
        self.dimension = dimension
        self._entries: dict = {}

    def add(self, i: int, j: int, value: float) -> None:
        if i > j:
            i, j = j, i
        key = (i, j)
        self._entries[key] = self._entries.get(key, 0.0) + value

    def build(self) -> SymMatrix:
        return SymMatrix(self.dimension, dict(self._entries))


@dataclass(frozen=True)
class MassMatrix:
    """Diagonal mass matrix with strictly positive entries."""

    dimension: int
    diagonal: np.ndarray

    def __post_init__(self):
        diag = np.asarray(self.diagonal, dtype=float)
        object.__setattr__(self, "diagonal", diag)
        if self.dimension < 1:
            raise ArgumentError("mass dimension must be >= 1")
        if diag.shape != (self.dimension,):
            raise ArgumentError("mass diagonal length must equal dimension")
        if not np.all(diag > 0):
            raise ArgumentError("mass matrix entries must be strictly positive")

    @staticmethod
    def identity(dimension: int) -> "MassMatrix":
        return MassMatrix(dimension, np.ones(dimension))


@dataclass(frozen=True)
class Spectrum:
    """Ascending eigenvalue list, repeated according to multiplicity."""

    values: np.ndarray
    count_requested: int

    def __post_init__(self):
        vals = np.asarray(self.values, dtype=float)
        object.__setattr__(self, "values", vals)
        if np.any(np.diff(vals) < -1e-12 * max(1.0, np.abs(vals).max(initial=0.0))):
            raise ArgumentError("spectrum values must be nondecreasing")

    def __len__(self):
        return len(self.values)

    def __getitem__(self, k):
        return self.values[k]

    def __iter__(self):
        return iter(self.values)


def _check_pair(stiffness: SymMatrix, mass: MassMatrix) -> None:
    if stiffness.dimension != mass.dimension:
        raise ArgumentError(
            f"dimension mismatch: stiffness {stiffness.dimension} vs "
            f"mass {mass.dimension}"
        )


def _whitened(stiffness: SymMatrix, mass: MassMatrix, dense: bool):
    """Return ``M^{-1/2} A M^{-1/2}`` as a dense array or CSR matrix."""
    d = 1.0 / np.sqrt(mass.diagonal)
    if dense:
        a = stiffness.to_dense()
        return (a * d).T * d
    a = stiffness.to_csr()
    scale = scipy.sparse.diags(d)
    return (scale @ a @ scale).tocsr()


def eig_lowest(
    stiffness: SymMatrix,
    mass: MassMatrix,
    k: int,
    *,
    dense_cutoff: int = DENSE_CUTOFF,
    seed: int = 0,
    maxiter: int | None = None,
) -> Spectrum:
    """Lowest ``k`` eigenvalues of ``A u = lam M u``, ascending.

    These are the Rayleigh-quotient min-max critical values of the pair.
    The dense path is used for ``dimension <= dense_cutoff``; above that an
    ARPACK Lanczos iteration with a seeded deterministic start vector runs.

    Raises
    ------
    ArgumentError
        On dimension mismatch or ``k < 1``.
    NonConvergenceError
        If the iterative solver does not converge; carries the achieved
        residual of the best partial eigenpair.
    """
    _check_pair(stiffness, mass)
    if k < 1:
        raise ArgumentError("eigenvalue count k must be >= 1")
    n = stiffness.dimension
    kk = min(k, n)

    if n <= dense_cutoff or kk >= n - 1:
        b = _whitened(stiffness, mass, dense=True)
        vals = scipy.linalg.eigvalsh(b)
        return Spectrum(np.sort(vals)[:kk], k)

    b = _whitened(stiffness, mass, dense=False)
    rng = np.random.default_rng((seed, n))
    v0 = rng.standard_normal(n)
    try:
        vals = scipy.sparse.linalg.eigsh(
            b,
            k=kk,
            which="SA",
            v0=v0,
            maxiter=maxiter,
            return_eigenvectors=False,
        )
    except scipy.sparse.linalg.ArpackNoConvergence as exc:
        nconv = len(exc.eigenvalues)
        residual = None
        if nconv:
            w = exc.eigenvectors[:, 0]
            residual = float(
                np.linalg.norm(b @ w - exc.eigenvalues[0] * w) / np.linalg.norm(w)
            )
        raise NonConvergenceError(
            f"Lanczos converged {nconv}/{kk} eigenvalues "
            f"(best residual {residual})",
            converged=nconv,
            residual=residual,
        ) from exc
    return Spectrum(np.sort(vals), k)


def eig_pairs(
    stiffness: SymMatrix,
    mass: MassMatrix,
    k: int,
    *,
    dense_cutoff: int = DENSE_CUTOFF,
    seed: int = 0,
) -> tuple[Spectrum, np.ndarray]:
    """Lowest ``k`` eigenpairs; columns of the vector array solve A u = lam M u."""
    _check_pair(stiffness, mass)
    if k < 1:
        raise ArgumentError("eigenvalue count k must be >= 1")
    n = stiffness.dimension
    kk = min(k, n)
    d = 1.0 / np.sqrt(mass.diagonal)
    if n <= dense_cutoff or kk >= n - 1:
        b = _whitened(stiffness, mass, dense=True)
        vals, vecs = scipy.linalg.eigh(b)
        vals, vecs = vals[:kk], vecs[:, :kk]
    else:
        b = _whitened(stiffness, mass, dense=False)
        rng = np.random.default_rng((seed, n))
        vals, vecs = scipy.sparse.linalg.eigsh(
            b, k=kk, which="SA", v0=rng.standard_normal(n)
        )
        order = np.argsort(vals)
        vals, vecs = vals[order], vecs[:, order]
    return Spectrum(vals, k), vecs * d[:, None]


def residual_enclosure(
    stiffness: SymMatrix, mass: MassMatrix, u: np.ndarray, lam: float
) -> float:
    """Quasimode certificate: radius ``r`` with dist(lam, spec) <= r.

    For the mass-weighted operator the spectral theorem gives
    ``dist(lam, spec) <= ||(A - lam M) u||_{M^{-1}} / ||u||_M``, so the
    closed interval ``[lam - r, lam + r]`` contains at least one point of
    the generalized spectrum of the pair.
    """
    _check_pair(stiffness, mass)
    u = np.asarray(u, dtype=float)
    if u.shape != (stiffness.dimension,):
        raise ArgumentError("vector length must equal matrix dimension")
    m = mass.diagonal
    norm_u = float(np.sqrt(np.dot(u * m, u)))
    if norm_u == 0.0:
        raise ArgumentError("residual enclosure requires a nonzero vector")
    r = stiffness.matvec(u) - lam * m * u
    return float(np.sqrt(np.dot(r / m, r))) / norm_u
