"""Sampling domains and positive semidefinite kernels.

Three concrete settings, each a probability space (X, rho) together with a
bounded, measurable, positive semidefinite kernel K with
sup_x K(x, x) <= kappa^2:

* ``EuclideanBox`` with a Gaussian kernel and uniform rho,
* ``Circle`` (R/Z, represented as [0, 1)) with a translation-invariant
  kernel defined by a finite table of nonnegative Fourier coefficients,
* ``FiniteGraph`` with the heat kernel exp(-s L) of the unnormalized
  Laplacian L = D - W and uniform rho on the vertices.

Points are numpy arrays: shape (n,) of floats on the circle, (n, d) in a
box, (n,) of integer vertex ids on a graph.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

# Tolerance for positive semidefiniteness checks, relative to kappa^2.
EPS_PSD = 1e-10


class DomainError(ValueError):
    """Raised for points outside a domain or malformed domain data."""


# ---------------------------------------------------------------------------
# domains


@dataclass(frozen=True)
class EuclideanBox:
    """Axis-aligned box [lo_1, hi_1] x ... x [lo_d, hi_d] with uniform rho."""

    lo: tuple[float, ...]
    hi: tuple[float, ...]

    kind = "box"

    def __post_init__(self):
        if len(self.lo) != len(self.hi) or not self.lo:
            raise DomainError("lo and hi must be nonempty and equally long")
        if any(a >= b for a, b in zip(self.lo, self.hi)):
            raise DomainError("need lo < hi in every coordinate")

    @property
    def dim(self) -> int:
        return len(self.lo)

    def contains(self, xs: np.ndarray) -> bool:
        xs = np.atleast_2d(xs)
        lo = np.asarray(self.lo)
        hi = np.asarray(self.hi)
        return bool(np.all(xs >= lo) and np.all(xs <= hi))

    def descriptor(self) -> dict:
        return {"kind": "box", "lo": list(self.lo), "hi": list(self.hi)}


@dataclass(frozen=True)
class Circle:
    """The circle R/Z, coordinates in [0, 1), uniform rho."""

    kind = "circle"

    def contains(self, xs: np.ndarray) -> bool:
        xs = np.asarray(xs)
        return bool(np.all(xs >= 0.0) and np.all(xs < 1.0))

    def descriptor(self) -> dict:
        return {"kind": "circle"}


class FiniteGraph:
    """Weighted undirected graph on m vertices, uniform rho on vertices.

    Parameters
    ----------
    weights : (m, m) array
        Symmetric nonnegative adjacency with zero diagonal.
    """

    kind = "graph"

    def __init__(self, weights: np.ndarray, topology: str = "custom"):
        w = np.asarray(weights, dtype=float)
        if w.ndim != 2 or w.shape[0] != w.shape[1]:
            raise DomainError("weights must be a square matrix")
        if not np.allclose(w, w.T):
            raise DomainError("weights must be symmetric")
        if np.any(w < 0):
            raise DomainError("weights must be nonnegative")
        if np.any(np.diag(w) != 0):
            raise DomainError("weights must have zero diagonal")
        self.weights = w
        self.topology = topology

    @property
    def size(self) -> int:
        return self.weights.shape[0]

    def laplacian(self) -> np.ndarray:
        """Unnormalized Laplacian L = D - W."""
        w = self.weights
        return np.diag(w.sum(axis=1)) - w

    def contains(self, xs: np.ndarray) -> bool:
        xs = np.asarray(xs)
        return bool(np.all(xs >= 0) and np.all(xs < self.size))

    def descriptor(self) -> dict:
        return {"kind": "graph", "size": self.size, "topology": self.topology}

    # -- constructors -------------------------------------------------------

    @classmethod
    def ring(cls, m: int, weight: float = 1.0) -> "FiniteGraph":
        if m < 3:
            raise DomainError("ring needs at least 3 vertices")
        w = np.zeros((m, m))
        idx = np.arange(m)
        w[idx, (idx + 1) % m] = weight
        w[(idx + 1) % m, idx] = weight
        return cls(w, topology="ring")

    @classmethod
    def path(cls, m: int, weight: float = 1.0) -> "FiniteGraph":
        if m < 2:
            raise DomainError("path needs at least 2 vertices")
        w = np.zeros((m, m))
        idx = np.arange(m - 1)
        w[idx, idx + 1] = weight
        w[idx + 1, idx] = weight
        return cls(w, topology="path")

    @classmethod
    def complete(cls, m: int, weight: float = 1.0) -> "FiniteGraph":
        if m < 2:
            raise DomainError("complete graph needs at least 2 vertices")
        w = np.full((m, m), weight) - weight * np.eye(m)
        return cls(w, topology="complete")

    @classmethod
    def from_edge_list(cls, path: str, size: int | None = None) -> "FiniteGraph":
        """Read 'u v weight' lines, 0-based vertex ids, blank lines ignored."""
        edges = []
        top = -1
        with open(path) as fh:
            for lineno, line in enumerate(fh, start=1):
                parts = line.split()
                if not parts or parts[0].startswith("#"):
                    continue
                if len(parts) != 3:
                    raise DomainError(f"{path}:{lineno}: expected 'u v weight'")
                u, v, wt = int(parts[0]), int(parts[1]), float(parts[2])
                if u < 0 or v < 0 or u == v or wt < 0:
                    raise DomainError(f"{path}:{lineno}: bad edge ({u}, {v}, {wt})")
                top = max(top, u, v)
                edges.append((u, v, wt))
        m = size if size is not None else top + 1
        if m <= top:
            raise DomainError(f"edge list references vertex {top} >= size {m}")
        w = np.zeros((m, m))
        for u, v, wt in edges:
            w[u, v] = wt
            w[v, u] = wt
        return cls(w, topology="edge_list")


Domain = EuclideanBox | Circle | FiniteGraph


# ---------------------------------------------------------------------------
# kernels


class GaussianKernel:
    """K(x, y) = exp(-||x - y||^2 / (2 sigma^2)) on a Euclidean box."""

    kind = "gaussian"

    def __init__(self, domain: EuclideanBox, sigma: float):
        if sigma <= 0:
            raise ValueError("sigma must be positive")
        self.domain = domain
        self.sigma = float(sigma)
        self.kappa_sq = 1.0

    def pair(self, x, y) -> float:
        d = np.asarray(x, dtype=float) - np.asarray(y, dtype=float)
        return float(np.exp(-float(d @ d) / (2.0 * self.sigma**2)))

    def matrix(self, xs: np.ndarray, ys: np.ndarray) -> np.ndarray:
        xs = np.atleast_2d(np.asarray(xs, dtype=float))
        ys = np.atleast_2d(np.asarray(ys, dtype=float))
        sq = ((xs[:, None, :] - ys[None, :, :]) ** 2).sum(axis=-1)
        return np.exp(-sq / (2.0 * self.sigma**2))

    def diag(self, xs: np.ndarray) -> np.ndarray:
        n = np.atleast_2d(np.asarray(xs)).shape[0]
        return np.ones(n)

    def descriptor(self) -> dict:
        return {"kind": "gaussian", "sigma": self.sigma,
                "domain": self.domain.descriptor()}


class CircleKernel:
    """Translation-invariant kernel on R/Z with finite Fourier support.

    K(x, y) = c[0] + 2 * sum_{m=1}^{M} c[m] cos(2 pi m (x - y)) with
    c[m] >= 0, so K is positive semidefinite by construction. The kernel
    is defined *by* its coefficient table: there is no truncation error,
    the reproducing space is the (2M+1)-dimensional span of the retained
    Fourier modes.

    Parameters
    ----------
    coefficients : (M+1,) array
        c[m] for m = 0..M; the signed coefficient table is symmetric,
        c[-m] = c[m].
    """

    kind = "circle_fourier"

    def __init__(self, coefficients: np.ndarray,
                 profile: str = "custom", rate: float | None = None):
        c = np.asarray(coefficients, dtype=float)
        if c.ndim != 1 or c.size < 1:
            raise ValueError("coefficients must be a nonempty 1-d array")
        if np.any(c < 0):
            raise ValueError("Fourier coefficients must be nonnegative")
        if c.sum() <= 0:
            raise ValueError("kernel must not vanish identically")
        self.coefficients = c
        self.profile = profile
        self.rate = rate
        # K(x, x) = sum over signed m of c[|m|], independent of x.
        self.kappa_sq = float(c[0] + 2.0 * c[1:].sum())
        # sum over signed m of c[|m|]^2: the Hilbert-Schmidt norm of the
        # associated integral operator, used by the reference operator.
        self.sq_coefficient_sum = float(c[0] ** 2 + 2.0 * (c[1:] ** 2).sum())

    @property
    def truncation(self) -> int:
        return self.coefficients.size - 1

    @classmethod
    def from_decay(cls, profile: str, rate: float, truncation: int) -> "CircleKernel":
        """Build a coefficient table from a named decay profile.

        ``exponential`` gives c[m] = exp(-rate * m), ``gaussian`` gives
        c[m] = exp(-rate * m^2).
        """
        if truncation < 0:
            raise ValueError("truncation must be nonnegative")
        if rate <= 0:
            raise ValueError("rate must be positive")
        m = np.arange(truncation + 1, dtype=float)
        if profile == "exponential":
            c = np.exp(-rate * m)
        elif profile == "gaussian":
            c = np.exp(-rate * m**2)
        else:
            raise ValueError(f"unknown decay profile {profile!r}")
        return cls(c, profile=profile, rate=rate)

    def fourier_eigenvalue(self, m: int) -> float:
        """Coefficient c[|m|]; raises for |m| beyond the table."""
        if abs(m) > self.truncation:
            raise ValueError(f"mode {m} outside truncation {self.truncation}")
        return float(self.coefficients[abs(m)])

    def _displacement_values(self, d: np.ndarray) -> np.ndarray:
        # Chebyshev-style recurrence: cos(m t) from cos((m-1) t), cos((m-2) t).
        # One trig call regardless of the table length.
        c = self.coefficients
        out = np.full(d.shape, c[0])
        if c.size == 1:
            return out
        base = np.cos(2.0 * np.pi * d)
        prev = np.ones_like(base)
        cur = base
        out += 2.0 * c[1] * cur
        for m in range(2, c.size):
            prev, cur = cur, 2.0 * base * cur - prev
            out += 2.0 * c[m] * cur
        return out

    def pair(self, x: float, y: float) -> float:
        return float(self._displacement_values(np.asarray(float(x) - float(y))))

    def matrix(self, xs: np.ndarray, ys: np.ndarray) -> np.ndarray:
        xs = np.asarray(xs, dtype=float)
        ys = np.asarray(ys, dtype=float)
        return self._displacement_values(xs[:, None] - ys[None, :])

    def diag(self, xs: np.ndarray) -> np.ndarray:
        return np.full(np.asarray(xs).shape[0], self.kappa_sq)

    def descriptor(self) -> dict:
        d = {"kind": "circle_fourier", "truncation": self.truncation,
             "profile": self.profile, "domain": {"kind": "circle"}}
        if self.rate is not None:
            d["rate"] = self.rate
        else:
            d["coefficients"] = [float(v) for v in self.coefficients]
        return d


class GraphHeatKernel:
    """Heat kernel K = scale * exp(-s L) on a finite weighted graph.

    L = D - W is the unnormalized Laplacian. The matrix exponential is
    evaluated through the spectral decomposition of L, which keeps the
    kernel matrix exactly symmetric and positive definite. ``scale``
    rescales the reproducing space norm only; it is the knob that places
    the top eigenvalue of the associated integral operator at O(1) when a
    benchmark needs filter scales j ~ 1/lambda to be reachable.
    """

    kind = "graph_heat"

    def __init__(self, domain: FiniteGraph, s: float, scale: float = 1.0):
        if s <= 0:
            raise ValueError("diffusion time s must be positive")
        if scale <= 0:
            raise ValueError("scale must be positive")
        self.domain = domain
        self.s = float(s)
        self.scale = float(scale)
        lap = domain.laplacian()
        mu, u = np.linalg.eigh(lap)
        mu = np.clip(mu, 0.0, None)  # Laplacian is PSD; clip rounding noise
        self.laplacian_eigenvalues = mu
        self.laplacian_eigenvectors = u
        self.kernel_matrix_full = (u * (self.scale * np.exp(-self.s * mu))) @ u.T
        self.kappa_sq = float(np.diag(self.kernel_matrix_full).max())

    def pair(self, x: int, y: int) -> float:
        return float(self.kernel_matrix_full[int(x), int(y)])

    def matrix(self, xs: np.ndarray, ys: np.ndarray) -> np.ndarray:
        xs = np.asarray(xs, dtype=int)
        ys = np.asarray(ys, dtype=int)
        return self.kernel_matrix_full[np.ix_(xs, ys)]

    def diag(self, xs: np.ndarray) -> np.ndarray:
        xs = np.asarray(xs, dtype=int)
        return np.diag(self.kernel_matrix_full)[xs]

    def descriptor(self) -> dict:
        return {"kind": "graph_heat", "s": self.s, "scale": self.scale,
                "domain": self.domain.descriptor()}


Kernel = GaussianKernel | CircleKernel | GraphHeatKernel


def psd_floor(kernel) -> float:
    """Most negative eigenvalue tolerated in a sampled kernel matrix."""
    return -EPS_PSD * kernel.kappa_sq
