"""Empirical operators built from i.i.d. samples of the domain.

Given samples x_1..x_N drawn from rho, the normalized sample kernel matrix

    K_hat[i, k] = K(x_i, x_k) / N

shares its nonzero spectrum with the empirical integral operator
T_hat f = (1/N) sum_i K(., x_i) f(x_i). Everything downstream (wavelet
frames, reconstructions, norms) is driven by the eigendecomposition
K_hat = U diag(lambda_hat) U^T computed here.

Conventions, fixed once:

* eigenvalues are descending and clamped to zero within
  eps_rank = 1e-12 * kappa^2 * N; the rank r counts eigenvalues above
  the clamp and only the corresponding r eigenvector columns are stored
  (zero modes never contribute to any spectral formula);
* eigenvectors carry unit Euclidean norm and a deterministic sign (the
  largest-magnitude component is positive);
* the out-of-sample extension of eigenvector i is
  v_hat_i(x) = (1/(sqrt(lambda_hat_i) N)) sum_l u_i[l] K(x, x_l),
  which satisfies v_hat_i(x_k) = sqrt(lambda_hat_i) u_i[k] at the samples;
  the family sqrt(N) * v_hat_i is orthonormal in the reproducing space;
* for f in the span of {K(., x_i)} with sample values f_vec, the
  reproducing-space norm is
  ||f||^2 = (1/N) sum_{i<=r} (u_i . f_vec)^2 / lambda_hat_i.

Sampling uses the Philox counter-based generator; every sample set
records its seed.
"""

from __future__ import annotations

import json
from dataclasses import dataclass

import numpy as np

from .kernels import Circle, EuclideanBox, FiniteGraph, GraphHeatKernel, EPS_PSD

RNG_NAME = "philox"
EPS_RANK_COEFF = 1e-12
EXCLUDED_MASS_LIMIT = 1e-6
HS_RADICAND_FLOOR = -1e-12


class RankError(ValueError):
    """Raised when a spectral operation touches components below eps_rank."""


def philox(seed: int, *stream: int) -> np.random.Generator:
    """Philox generator keyed by a seed and an optional stream tuple."""
    return np.random.Generator(np.random.Philox(np.random.SeedSequence([int(seed), *map(int, stream)])))


def derive_seed(base: int, *parts: int) -> int:
    """Stable 64-bit sub-seed for a trial keyed by (base, parts)."""
    ss = np.random.SeedSequence([int(base), *map(int, parts)])
    return int(ss.generate_state(1, np.uint64)[0])


@dataclass
class SampleSet:
    """Points drawn i.i.d. from a domain's measure, with provenance."""

    domain: object
    points: np.ndarray
    seed: int
    stratified: bool = False

    @property
    def n(self) -> int:
        return self.points.shape[0]

    def descriptor(self) -> dict:
        return {"domain": self.domain.descriptor(), "n": self.n,
                "seed": self.seed, "rng": RNG_NAME,
                "stratified": self.stratified}


def draw_samples(domain, n: int, seed: int) -> SampleSet:
    """Draw n i.i.d. points from the domain's uniform measure.

    Deterministic in (domain, n, seed); distinct seeds give independent
    streams. Graph vertices are drawn with replacement.
    """
    if n < 1:
        raise ValueError("need at least one sample")
    gen = philox(seed)
    if isinstance(domain, Circle):
        pts = gen.random(n)
    elif isinstance(domain, EuclideanBox):
        lo = np.asarray(domain.lo)
        hi = np.asarray(domain.hi)
        pts = lo + (hi - lo) * gen.random((n, domain.dim))
    elif isinstance(domain, FiniteGraph):
        pts = gen.integers(0, domain.size, size=n)
    else:
        raise TypeError(f"cannot sample from {type(domain).__name__}")
    return SampleSet(domain=domain, points=pts, seed=int(seed))


def stratified_vertex_samples(domain: FiniteGraph, n: int) -> SampleSet:
    """Test hook: every vertex exactly n/m times, so the empirical measure
    equals rho and the empirical operator matches the reference exactly."""
    if not isinstance(domain, FiniteGraph):
        raise TypeError("stratified sampling is a graph-only hook")
    if n % domain.size != 0:
        raise ValueError("n must be a multiple of the vertex count")
    pts = np.tile(np.arange(domain.size), n // domain.size)
    return SampleSet(domain=domain, points=pts, seed=0, stratified=True)


def kernel_matrix(kernel, samples: SampleSet) -> np.ndarray:
    """Normalized sample kernel matrix K_hat = [K(x_i, x_k)] / N."""
    pts = samples.points
    return kernel.matrix(pts, pts) / samples.n


# ---------------------------------------------------------------------------
# eigensystems


@dataclass
class EigenSystem:
    """Spectral data of K_hat: descending eigenvalues (length N, zeros
    clamped) and the eigenvector columns for the positive part (N x r)."""

    evals: np.ndarray
    evecs: np.ndarray
    kappa_sq: float
    eps_rank: float
    seed: int
    kernel_descriptor: dict

    @property
    def n(self) -> int:
        return self.evals.size

    @property
    def rank(self) -> int:
        return self.evecs.shape[1]

    @property
    def positive_evals(self) -> np.ndarray:
        return self.evals[: self.rank]

    def spectral_coefficients(self, f_vec: np.ndarray) -> np.ndarray:
        """b[i] = u_i . f_vec for the positive eigenvectors."""
        return self.evecs.T @ np.asarray(f_vec, dtype=float)

    def save(self, path: str) -> None:
        np.savez(path, evals=self.evals, evecs=self.evecs,
                 kappa_sq=self.kappa_sq, eps_rank=self.eps_rank,
                 seed=self.seed,
                 kernel_descriptor=json.dumps(self.kernel_descriptor, sort_keys=True))

    @classmethod
    def load(cls, path: str) -> "EigenSystem":
        with np.load(path, allow_pickle=False) as data:
            return cls(evals=data["evals"], evecs=data["evecs"],
                       kappa_sq=float(data["kappa_sq"]),
                       eps_rank=float(data["eps_rank"]),
                       seed=int(data["seed"]),
                       kernel_descriptor=json.loads(str(data["kernel_descriptor"])))


def _fix_signs(vecs: np.ndarray) -> np.ndarray:
    if vecs.size == 0:
        return vecs
    lead = vecs[np.abs(vecs).argmax(axis=0), np.arange(vecs.shape[1])]
    return vecs * np.where(lead < 0, -1.0, 1.0)


def eigendecompose(khat: np.ndarray, kappa_sq: float, *, seed: int = 0,
                   kernel_descriptor: dict | None = None) -> EigenSystem:
    """Dense symmetric eigendecomposition of the normalized kernel matrix."""
    khat = np.asarray(khat, dtype=float)
    n = khat.shape[0]
    lam, vec = np.linalg.eigh(khat)
    if lam.min() < -EPS_PSD * kappa_sq:
        raise ValueError(
            f"kernel matrix is not positive semidefinite: min eigenvalue "
            f"{lam.min()} < {-EPS_PSD * kappa_sq}")
    lam = lam[::-1].copy()
    vec = vec[:, ::-1]
    eps_rank = EPS_RANK_COEFF * kappa_sq * n
    lam[lam < eps_rank] = 0.0
    r = int((lam > 0).sum())
    return EigenSystem(evals=lam, evecs=_fix_signs(vec[:, :r]).copy(),
                       kappa_sq=kappa_sq, eps_rank=eps_rank, seed=seed,
                       kernel_descriptor=kernel_descriptor or {})


def eigendecompose_graph(kernel: GraphHeatKernel, samples: SampleSet,
                         *, kernel_descriptor: dict | None = None) -> EigenSystem:
    """Rank-compressed eigendecomposition for graph samples.

    With P the one-hot sample-to-vertex matrix and D = diag(counts)/N,
    K_hat = (1/N) P K_M P^T shares its positive spectrum with the m x m
    matrix B = D^{1/2} K_M D^{1/2} restricted to sampled vertices, and the
    sample-side eigenvectors are recovered as u[l] = w[vertex(l)] /
    sqrt(count(vertex(l))). Identical to ``eigendecompose`` on the full
    matrix (dual-route tested) at O(m^3 + N m) cost instead of O(N^3).
    """
    pts = np.asarray(samples.points, dtype=int)
    n = samples.n
    counts = np.bincount(pts, minlength=kernel.domain.size)
    support = np.flatnonzero(counts)
    d = counts[support] / n
    km = kernel.kernel_matrix_full[np.ix_(support, support)]
    b = np.sqrt(d)[:, None] * km * np.sqrt(d)[None, :]
    lam, w = np.linalg.eigh(b)
    lam = lam[::-1].copy()
    w = w[:, ::-1]
    eps_rank = EPS_RANK_COEFF * kernel.kappa_sq * n
    keep = lam > eps_rank
    lam_pos = lam[keep]
    w = w[:, keep]
    # lift to sample space: u[l, i] = w[pos(vertex(l)), i] / sqrt(count)
    pos = np.full(kernel.domain.size, -1)
    pos[support] = np.arange(support.size)
    rows = pos[pts]
    u = w[rows] / np.sqrt(counts[pts])[:, None]
    evals = np.zeros(n)
    evals[: lam_pos.size] = lam_pos
    return EigenSystem(evals=evals, evecs=_fix_signs(u).copy(),
                       kappa_sq=kernel.kappa_sq, eps_rank=eps_rank,
                       seed=samples.seed,
                       kernel_descriptor=kernel_descriptor or kernel.descriptor())


def empirical_eigensystem(kernel, samples: SampleSet,
                          method: str = "auto") -> EigenSystem:
    """Eigendecompose K_hat, picking the compressed graph route when the
    domain makes it exact and cheap."""
    if method not in ("auto", "dense", "compressed"):
        raise ValueError(f"unknown method {method!r}")
    if method == "compressed" or (
            method == "auto" and isinstance(kernel, GraphHeatKernel)
            and kernel.domain.size < samples.n):
        if not isinstance(kernel, GraphHeatKernel):
            raise TypeError("compressed route needs a graph heat kernel")
        return eigendecompose_graph(kernel, samples)
    return eigendecompose(kernel_matrix(kernel, samples), kernel.kappa_sq,
                          seed=samples.seed, kernel_descriptor=kernel.descriptor())


# ---------------------------------------------------------------------------
# spectral operations


def nystrom_extend(eig: EigenSystem, kernel, samples: SampleSet,
                   i: int, xs) -> np.ndarray:
    """Out-of-sample values v_hat_i(x) = (1/(sqrt(lam_i) N)) sum_l u_i[l] K(x, x_l).

    At the samples this reproduces sqrt(lam_i) * u_i elementwise. Requests
    for components at or below eps_rank are refused: the division by
    sqrt(lam_i) is meaningless there.
    """
    if i < 0 or i >= eig.rank:
        raise RankError(
            f"component {i} outside the positive spectrum (rank {eig.rank})")
    kx = kernel.matrix(np.atleast_1d(xs), samples.points)
    return (kx @ eig.evecs[:, i]) / (np.sqrt(eig.evals[i]) * eig.n)


def extension_gram(eig: EigenSystem, kernel, samples: SampleSet) -> np.ndarray:
    """Gram matrix, in the reproducing space, of the normalized extension
    family sqrt(N) * v_hat_i. Should be the identity to rounding."""
    khat = kernel.matrix(samples.points, samples.points) / eig.n
    core = eig.evecs.T @ khat @ eig.evecs
    scale = 1.0 / np.sqrt(eig.positive_evals)
    return scale[:, None] * core * scale[None, :]


def apply_empirical(eig: EigenSystem, phi, f_vec: np.ndarray) -> np.ndarray:
    """Sample values of phi(T_hat) f from sample values of f.

    phi is a vectorized scalar function on the positive spectrum; zero
    eigenvalues are excluded, so phi(0) never needs a value. With
    phi = 1 this is the projection onto the positive eigenspace.
    """
    f_vec = np.asarray(f_vec, dtype=float)
    b = eig.spectral_coefficients(f_vec)
    return eig.evecs @ (np.asarray(phi(eig.positive_evals)) * b)


def hilbert_norm(eig: EigenSystem, f_vec: np.ndarray,
                 max_excluded: float = EXCLUDED_MASS_LIMIT) -> float:
    """Reproducing-space norm of a function in span{K(., x_i)} from its
    sample values: sqrt((1/N) sum_i b_i^2 / lambda_hat_i).

    Raises when more than ``max_excluded`` of the squared sample mass sits
    in clamped components, where the norm is not recoverable.
    """
    f_vec = np.asarray(f_vec, dtype=float)
    total = float(f_vec @ f_vec)
    b = eig.spectral_coefficients(f_vec)
    captured = float(b @ b)
    if total > 0:
        excluded = max(total - captured, 0.0) / total
        if excluded > max_excluded:
            raise RankError(
                f"{excluded:.3e} of the squared sample mass lies in clamped "
                f"spectral components (limit {max_excluded:.1e})")
    return float(np.sqrt((b**2 / eig.positive_evals).sum() / eig.n))


def hilbert_norm_sq(eig: EigenSystem, f_vec: np.ndarray,
                    max_excluded: float = EXCLUDED_MASS_LIMIT) -> float:
    return hilbert_norm(eig, f_vec, max_excluded) ** 2


def hs_distance(ref, emp, samples: SampleSet) -> float:
    """Hilbert-Schmidt distance ||T - T_hat||_HS via the three-term rule

        ||T||^2 + ||T_hat||^2 - 2 <T, T_hat>,

    where ||T_hat||^2 is the squared Frobenius norm of K_hat (equal to the
    sum of squared empirical eigenvalues) and the cross term is the exact
    mean (1/N) sum_i (T K_{x_i})(x_i) supplied by the reference operator.

    ``emp`` may be an EigenSystem or the K_hat matrix itself; both give the
    same value, the matrix route avoids the eigendecomposition.
    """
    if isinstance(emp, EigenSystem):
        emp_sq = float((emp.positive_evals**2).sum())
    else:
        khat = np.asarray(emp, dtype=float)
        emp_sq = float((khat**2).sum())
    radicand = ref.hs_norm_sq() + emp_sq - 2.0 * ref.hs_cross(samples.points)
    if radicand < HS_RADICAND_FLOOR:
        raise ValueError(f"negative HS radicand {radicand}: inconsistent inputs")
    return float(np.sqrt(max(radicand, 0.0)))
