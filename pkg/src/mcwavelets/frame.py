"""Empirical wavelet frames on sampled kernels.

The frame elements at scale j, centered at the sample points, are

    psi_{j, x_k} = G_j(T_hat) K_{x_k}
                 = (1/N) sum_{i <= r, l} G_j(lam_i) u_i[k] u_i[l] K(., x_l),

with G_j^2 = g_j - g_{j-1} the filter functions of a regularization
family. Analysis coefficients are point evaluations,

    c[j][k] = <f, psi_{j, x_k}> = (G_j(T_hat) f)(x_k),

computed spectrally as U G_j(Lam) U^T f_vec. Scale blocks of the frame
operator act as T_hat G_j(T_hat)^2, so partial reconstructions telescope
to T_hat g_tau(T_hat) f and the coefficient energy up to scale tau equals
<T_hat g_tau(T_hat) f, f>. The Parseval defect of a truncated expansion is

    gap = ||f||^2 - sum_{j<=tau} (1/N) sum_k c[j][k]^2
        = (1/N) sum_i (1 - lam_i g_tau(lam_i)) b_i^2 / lam_i  >=  0.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .filters import FilterFamily
from .operator import EigenSystem, SampleSet, hilbert_norm, nystrom_extend


def default_tau(n: int, alpha: float, family: FilterFamily) -> int:
    """Scale cutoff ceil(N^(1/(2 beta + 2))) with beta = min(alpha,
    qualification), balancing truncation against sampling error."""
    if n < 1:
        raise ValueError("need a positive sample count")
    if alpha <= 0:
        raise ValueError("smoothness exponent alpha must be positive")
    beta = family.beta(alpha)
    if not math.isfinite(beta):
        raise ValueError("alpha produced a non-finite exponent")
    return int(math.ceil(n ** (1.0 / (2.0 * beta + 2.0))))


@dataclass
class CoefficientTable:
    """Analysis coefficients c[j][k], scales j = 1..tau by samples k,
    with the 1/N empirical scale weights."""

    values: np.ndarray  # (tau, n)
    n: int
    seed: int
    filter_descriptor: dict

    @property
    def tau(self) -> int:
        return self.values.shape[0]

    def scale_energies(self) -> np.ndarray:
        """(1/N) sum_k c[j][k]^2 per scale."""
        return (self.values**2).sum(axis=1) / self.n

    def total_energy(self) -> float:
        return float(self.scale_energies().sum())

    def to_csv(self, path: str, config_echo: dict | None = None) -> None:
        import json

        with open(path, "w") as fh:
            fh.write(f"# n={self.n} seed={self.seed}\n")
            fh.write(f"# filter={json.dumps(self.filter_descriptor, sort_keys=True)}\n")
            if config_echo is not None:
                fh.write(f"# config={json.dumps(config_echo, sort_keys=True)}\n")
            fh.write("j,k,c\n")
            for j in range(self.values.shape[0]):
                for k in range(self.values.shape[1]):
                    fh.write(f"{j + 1},{k},{float(self.values[j, k])!r}\n")


@dataclass
class ParsevalReport:
    """Truncated coefficient energy against the squared norm."""

    partial_sum: float
    norm_sq: float
    gap: float
    tau: int
    n: int

    @property
    def relative_gap(self) -> float:
        return self.gap / self.norm_sq if self.norm_sq > 0 else 0.0

    def as_dict(self) -> dict:
        return {"partial_sum": self.partial_sum, "norm_sq": self.norm_sq,
                "gap": self.gap, "relative_gap": self.relative_gap,
                "tau": self.tau, "n": self.n}


class WaveletFrame:
    """Wavelets psi_{j, x_k} for one eigensystem and filter family.

    Parameters
    ----------
    eig : EigenSystem
    samples : SampleSet
    kernel : kernel the samples were decomposed under
    family : FilterFamily
        Must carry the same spectral bound as the kernel.
    tau_max : int
        Largest scale the frame is meant to be used at (bookkeeping only;
        individual calls may pass any tau and get a range check).
    """

    def __init__(self, eig: EigenSystem, samples: SampleSet, kernel,
                 family: FilterFamily, tau_max: int):
        if abs(family.kappa_sq - kernel.kappa_sq) > 1e-12 * kernel.kappa_sq:
            raise ValueError(
                f"filter family bound {family.kappa_sq} does not match "
                f"kernel bound {kernel.kappa_sq}")
        if tau_max < 1:
            raise ValueError("tau_max must be at least 1")
        self.eig = eig
        self.samples = samples
        self.kernel = kernel
        self.family = family
        self.tau_max = int(tau_max)

    @property
    def n(self) -> int:
        return self.eig.n

    def _check_scale(self, j: int) -> None:
        if j < 1 or j > self.tau_max:
            raise ValueError(f"scale {j} outside 1..{self.tau_max}")

    def _filter_values(self, j: int) -> np.ndarray:
        return np.sqrt(np.asarray(self.family.g_squared(j, self.eig.positive_evals)))

    # -- frame elements -------------------------------------------------------

    def wavelet(self, j: int, k: int, xs) -> np.ndarray:
        """psi_{j, x_k} evaluated at points xs through the sample expansion."""
        self._check_scale(j)
        if k < 0 or k >= self.n:
            raise ValueError(f"center index {k} outside 0..{self.n - 1}")
        gj = self._filter_values(j)
        weights = self.eig.evecs @ (gj * self.eig.evecs[k]) / self.n
        kx = self.kernel.matrix(np.atleast_1d(xs), self.samples.points)
        return kx @ weights

    def wavelet_via_extension(self, j: int, k: int, xs) -> np.ndarray:
        """Same element through the eigenfunction route
        sum_i G_j(lam_i) v_hat_i(x_k) v_hat_i(.); dual formula for tests."""
        self._check_scale(j)
        gj = self._filter_values(j)
        out = np.zeros(np.atleast_1d(xs).shape[0])
        for i in range(self.eig.rank):
            if gj[i] == 0.0:
                continue
            vi_k = np.sqrt(self.eig.evals[i]) * self.eig.evecs[k, i]
            out += gj[i] * vi_k * nystrom_extend(self.eig, self.kernel,
                                                 self.samples, i, xs)
        return out

    # -- analysis / synthesis ---------------------------------------------------

    def analyze(self, f_vec: np.ndarray, tau: int) -> CoefficientTable:
        """Coefficients c[j][k] = (G_j(T_hat) f)(x_k) for j = 1..tau."""
        self._check_scale(tau)
        f_vec = np.asarray(f_vec, dtype=float)
        b = self.eig.spectral_coefficients(f_vec)
        rows = np.empty((tau, self.n))
        for j in range(1, tau + 1):
            gj = self._filter_values(j)
            rows[j - 1] = self.eig.evecs @ (gj * b)
        return CoefficientTable(values=rows, n=self.n, seed=self.eig.seed,
                                filter_descriptor=self.family.descriptor())

    def frame_operator_apply(self, f_vec: np.ndarray, j: int) -> np.ndarray:
        """Sample values of the scale-j frame operator block
        T_hat G_j(T_hat)^2 f."""
        self._check_scale(j)
        b = self.eig.spectral_coefficients(np.asarray(f_vec, dtype=float))
        lam = self.eig.positive_evals
        gsq = np.asarray(self.family.g_squared(j, lam))
        return self.eig.evecs @ (lam * gsq * b)

    def frame_operator_apply_dual(self, f_vec: np.ndarray, j: int) -> np.ndarray:
        """Same block through the frame expansion
        sum_k c[j][k] psi_{j, x_k}, evaluated at the samples.

        The 1/N empirical weight is already folded into each wavelet, so
        the sum over centers carries no extra normalization."""
        self._check_scale(j)
        f_vec = np.asarray(f_vec, dtype=float)
        b = self.eig.spectral_coefficients(f_vec)
        gj = self._filter_values(j)
        coeffs = self.eig.evecs @ (gj * b)
        out = np.zeros(self.n)
        for k in range(self.n):
            out += coeffs[k] * self.wavelet(j, k, self.samples.points)
        return out

    def reconstruct(self, f_vec: np.ndarray, tau: int) -> np.ndarray:
        """Sample values of sum_{j<=tau} T_hat G_j^2(T_hat) f =
        T_hat g_tau(T_hat) f (the telescoped fast path)."""
        self._check_scale(tau)
        b = self.eig.spectral_coefficients(np.asarray(f_vec, dtype=float))
        lam = self.eig.positive_evals
        return self.eig.evecs @ (lam * np.asarray(self.family.g(tau, lam)) * b)

    def parseval_report(self, f_vec: np.ndarray, tau: int) -> ParsevalReport:
        """Coefficient energy up to tau against the squared norm of f.

        Per-scale energies are accumulated scale by scale (the eigenvector
        orthonormality makes (1/N)||c_j||^2 = (1/N)||G_j(Lam) b||^2, so
        scales beyond a few thousand stay affordable); the norm comes from
        ``hilbert_norm`` independently.
        """
        if tau < 1:
            raise ValueError("tau must be at least 1")
        f_vec = np.asarray(f_vec, dtype=float)
        b = self.eig.spectral_coefficients(f_vec)
        bsq = b**2
        lam = self.eig.positive_evals
        partial = 0.0
        for j in range(1, tau + 1):
            partial += float((np.asarray(self.family.g_squared(j, lam)) * bsq).sum())
        partial /= self.n
        norm_sq = hilbert_norm(self.eig, f_vec) ** 2
        gap = norm_sq - partial
        if gap < -1e-10 * max(norm_sq, 1.0):
            raise ValueError(f"coefficient energy exceeds the norm: gap {gap}")
        return ParsevalReport(partial_sum=partial, norm_sq=norm_sq, gap=gap,
                              tau=tau, n=self.n)
