"""Bounded domains with a signed boundary-distance function.

Two domain kinds are supported: an interval ``[a, b]`` on the line and a
closed Euclidean ball.  Both expose the same three operations used by the
path simulator and the PDE grid:

* ``phi`` -- signed distance to the boundary (positive inside, zero on the
  boundary, negative outside),
* ``inward_normal`` -- unit inward normal, defined off the medial point,
* ``project_to_closure`` -- closest point of the closure plus the distance
  moved.

The distance function has unit gradient near the boundary, which is what
makes the projection distance a usable local-time increment for reflected
paths.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

Array = np.ndarray

__all__ = [
    "DegeneratePointError",
    "DomainSpec",
    "interval",
    "ball",
    "phi",
    "inward_normal",
    "project_to_closure",
    "phi_batch",
    "inward_normal_batch",
    "project_batch",
]


class DegeneratePointError(ValueError):
    """Raised when the inward normal is requested at a medial point."""


@dataclass(frozen=True)
class DomainSpec:
    """Description of a bounded domain.

    Parameters
    ----------
    kind : str
        Either ``"interval"`` or ``"ball"``.
    a, b : float
        Endpoints for the interval kind (``a < b``).
    center : ndarray
        Center of the ball, shape ``(dim,)``.
    radius : float
        Ball radius, strictly positive.
    dim : int
        Ambient dimension (1 for intervals).
    """

    kind: str
    a: float = 0.0
    b: float = 1.0
    center: Array = field(default_factory=lambda: np.zeros(1))
    radius: float = 1.0
    dim: int = 1

    def __post_init__(self):
        if self.kind not in ("interval", "ball"):
            raise ValueError(f"unknown domain kind {self.kind!r}")
        if self.kind == "interval":
            if not self.a < self.b:
                raise ValueError(f"interval needs a < b, got a={self.a}, b={self.b}")
            if self.dim != 1:
                raise ValueError("interval domains are one-dimensional")
        else:
            center = np.atleast_1d(np.asarray(self.center, dtype=float))
            object.__setattr__(self, "center", center)
            if self.radius <= 0:
                raise ValueError(f"ball radius must be positive, got {self.radius}")
            if self.dim != center.shape[0]:
                raise ValueError(
                    f"dim={self.dim} does not match center of length {center.shape[0]}"
                )

    @property
    def width(self) -> float:
        """Diameter of the domain (b - a, or 2*radius)."""
        if self.kind == "interval":
            return self.b - self.a
        return 2.0 * self.radius


def interval(a: float, b: float) -> DomainSpec:
    """Interval domain [a, b]."""
    return DomainSpec(kind="interval", a=float(a), b=float(b), dim=1)


def ball(center, radius: float) -> DomainSpec:
    """Closed ball of given center and radius."""
    center = np.atleast_1d(np.asarray(center, dtype=float))
    return DomainSpec(kind="ball", center=center, radius=float(radius), dim=center.shape[0])


# ---------------------------------------------------------------------------
# batch operations (n, d) -> (n, ...)
# ---------------------------------------------------------------------------


def _as_batch(domain: DomainSpec, x) -> Array:
    pts = np.asarray(x, dtype=float)
    if pts.ndim == 0:
        pts = pts.reshape(1, 1)
    elif pts.ndim == 1:
        # A 1-d array is a single point in R^d, except in dimension one where
        # it is read as a batch of scalar points.
        if domain.dim == 1:
            pts = pts.reshape(-1, 1)
        else:
            pts = pts.reshape(1, -1)
    if pts.shape[-1] != domain.dim:
        raise ValueError(f"points of dimension {pts.shape[-1]}, domain has dim {domain.dim}")
    return pts


def phi_batch(domain: DomainSpec, pts: Array) -> Array:
    """Signed boundary distance for a batch of points, shape (n, d) -> (n,)."""
    if domain.kind == "interval":
        x = pts[..., 0]
        return np.minimum(x - domain.a, domain.b - x)
    r = np.linalg.norm(pts - domain.center, axis=-1)
    return domain.radius - r


def inward_normal_batch(domain: DomainSpec, pts: Array) -> Array:
    """Unit inward normals for a batch of points, shape (n, d) -> (n, d).

    Raises
    ------
    DegeneratePointError
        If any point sits at the interval midpoint or the ball center,
        where the distance function is not differentiable.
    """
    if domain.kind == "interval":
        x = pts[..., 0]
        lower = x - domain.a
        upper = domain.b - x
        if np.any(lower == upper):
            raise DegeneratePointError(
                "inward normal undefined at the interval midpoint "
                f"x={(domain.a + domain.b) / 2.0}"
            )
        return np.where(lower < upper, 1.0, -1.0)[..., None]
    diff = domain.center - pts
    r = np.linalg.norm(diff, axis=-1)
    if np.any(r == 0.0):
        raise DegeneratePointError("inward normal undefined at the ball center")
    return diff / r[..., None]


def project_batch(domain: DomainSpec, pts: Array) -> tuple[Array, Array]:
    """Closest points of the closure and distances moved, batched.

    Returns
    -------
    proj : ndarray, shape (n, d)
    dist : ndarray, shape (n,)
        Euclidean distance from each input point to its projection; zero
        for points already inside the closure.
    """
    if domain.kind == "interval":
        proj = np.clip(pts, domain.a, domain.b)
        dist = np.abs(pts - proj)[..., 0]
        return proj, dist
    diff = pts - domain.center
    r = np.linalg.norm(diff, axis=-1)
    outside = r > domain.radius
    proj = pts.copy()
    if np.any(outside):
        # Safe division: only outside points are rescaled, and those have r > 0.
        scale = np.ones_like(r)
        scale[outside] = domain.radius / r[outside]
        proj = domain.center + diff * scale[..., None]
    dist = np.where(outside, r - domain.radius, 0.0)
    return proj, dist


# ---------------------------------------------------------------------------
# single-point convenience wrappers
# ---------------------------------------------------------------------------


def phi(domain: DomainSpec, x) -> float | Array:
    """Signed distance to the boundary; positive inside, negative outside.

    Accepts a scalar (1-d domains), a point of shape ``(d,)``, or a batch
    of shape ``(n, d)``; returns a float or an array of shape ``(n,)``.
    """
    pts = _as_batch(domain, x)
    out = phi_batch(domain, pts)
    if np.asarray(x).ndim <= 1 and out.shape == (1,):
        return float(out[0])
    return out


def inward_normal(domain: DomainSpec, x) -> Array:
    """Unit inward normal at a point near the boundary."""
    pts = _as_batch(domain, x)
    out = inward_normal_batch(domain, pts)
    if np.asarray(x).ndim <= 1 and out.shape[0] == 1:
        return out[0]
    return out


def project_to_closure(domain: DomainSpec, x) -> tuple[Array, float | Array]:
    """Project a point onto the closed domain.

    Returns the projected point and the distance moved (zero for interior
    points).  Projection is idempotent and lands inside the closure up to
    roundoff: ``phi(domain, proj) >= -1e-12``.
    """
    pts = _as_batch(domain, x)
    proj, dist = project_batch(domain, pts)
    if np.asarray(x).ndim <= 1 and proj.shape[0] == 1:
        return proj[0], float(dist[0])
    return proj, dist
