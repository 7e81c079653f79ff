"""Problem data for reflected equations with boundary driver terms.

A problem is described by four pieces:

* :class:`DriverSpec` -- the running driver ``f(t, x, y, z)`` and the
  boundary driver ``g(t, x, y)`` (integrated against local time), together
  with their declared structure constants,
* :class:`WeightSet` -- time weights with closed-form tail integrals, used
  to size the Picard contraction on long horizons,
* :class:`ObstacleSpec` -- lower obstacle and terminal value,
* :class:`HorizonSpec` -- deterministic, state-hitting, or unbounded
  horizon (the latter two carry a truncation cap).

``validate_problem`` checks the declared constants and probes the declared
inequalities on sampled points; it reports one pass/fail entry per
assumption with the first violating sample as a witness, rather than
raising.  Solvers call :func:`assert_valid` to turn failures into
:class:`AssumptionError`.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, Optional

import numpy as np

Array = np.ndarray

__all__ = [
    "AssumptionError",
    "DivergenceError",
    "DriverSpec",
    "WeightSet",
    "ObstacleSpec",
    "HorizonSpec",
    "CheckResult",
    "ValidationReport",
    "ProbeResult",
    "validate_problem",
    "assert_valid",
    "monotonicity_probe",
    "contraction_constant",
    "max_stable_dt",
    "exponential_weights",
    "zero_weights",
    "make_driver",
    "make_obstacle",
    "driver_names",
    "obstacle_names",
]


class AssumptionError(ValueError):
    """A problem failed its structural assumptions."""


class DivergenceError(ValueError):
    """A weight tail integral diverges."""


# ---------------------------------------------------------------------------
# specifications
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class DriverSpec:
    """Driver pair with declared structure constants.

    ``f(t, x, y, z)`` and ``g(t, x, y)`` must broadcast over paths:
    ``t`` scalar, ``x`` of shape (n, d), ``y`` of shape (n,), ``z`` of
    shape (n, d), returning (n,).

    Declared constants (checked by :func:`validate_problem`):

    * ``alpha`` -- one-sided slope of f in y:
      (y - y')(f(..y..) - f(..y'..)) <= alpha (y - y')^2,
    * ``beta`` -- same for g; must be strictly negative,
    * ``k_f`` -- Lipschitz constant of f in z,
    * ``k_growth`` -- constant in the growth bounds
      |f| <= phi(t) + k_growth (|y| + |z|), |g| <= psi(t) + k_growth |y|,
    * ``lam``/``mu`` -- exponential weight rates; admissibility requires
      lam > 2|alpha| + k_f^2 and mu > 2|beta|,
    * ``growth_phi``/``growth_psi`` -- deterministic growth processes
      phi(t), psi(t).

    The dependence flags let solvers skip implicit resolution or the
    Z-regression when the driver provably ignores those arguments.
    """

    f: Callable[[float, Array, Array, Array], Array]
    g: Callable[[float, Array, Array], Array]
    alpha: float
    beta: float
    k_f: float
    lam: float
    mu: float
    growth_phi: Callable[[float], float] = lambda t: 1.0
    growth_psi: Callable[[float], float] = lambda t: 1.0
    k_growth: float = 0.0
    f_depends_y: bool = True
    g_depends_y: bool = True
    f_depends_z: bool = True
    name: str = "custom"
    params: dict = field(default_factory=dict)

    @property
    def depends_y(self) -> bool:
        return self.f_depends_y or self.g_depends_y


@dataclass(frozen=True)
class WeightSet:
    """Time weights with closed-form tails.

    ``v`` bounds the y-slope of f, ``v_prime`` the z-slope of f, and ``u``
    the y-slope of g.  The tail callables return the exact integrals

        v_tail(t0)         = int_t0^inf v(s) ds
        v_prime_sq_tail(t0) = int_t0^inf v'(s)^2 ds
        u_tail(t0)         = int_t0^inf u(s) ds

    and ``g_rate_bound`` converts the last one into a bound on the
    local-time integral: int_t0^inf u dG <= g_rate_bound * u_tail(t0).
    """

    v: Callable[[Array], Array]
    v_prime: Callable[[Array], Array]
    u: Callable[[Array], Array]
    v_tail: Callable[[float], float]
    v_prime_sq_tail: Callable[[float], float]
    u_tail: Callable[[float], float]
    g_rate_bound: float = 1.0

    def total_mass(self) -> float:
        """int_0^inf [v + v'^2] dt + g-rate-weighted int u dt."""
        return self.v_tail(0.0) + self.v_prime_sq_tail(0.0) + self.g_rate_bound * self.u_tail(0.0)


def exponential_weights(
    v: tuple[float, float] = (1.0, 1.0),
    v_prime: tuple[float, float] = (1.0, 1.0),
    u: tuple[float, float] = (0.0, 1.0),
    g_rate_bound: float = 1.0,
) -> WeightSet:
    """Weights of the form a * exp(-r t), given as (a, r) pairs.

    Tails are exact: int_t0^inf a e^{-rs} ds = (a/r) e^{-r t0}, and the
    square of the z-weight integrates to (a^2 / 2r) e^{-2r t0}.  A zero
    coefficient gives a zero weight regardless of the rate; a nonpositive
    rate with a nonzero coefficient yields divergent tails (+inf), which
    :func:`contraction_constant` turns into :class:`DivergenceError`.
    """

    def tail(a: float, r: float) -> Callable[[float], float]:
        def _tail(t0: float) -> float:
            if a == 0.0:
                return 0.0
            if r <= 0.0:
                return math.inf
            return (a / r) * math.exp(-r * t0)

        return _tail

    def sq_tail(a: float, r: float) -> Callable[[float], float]:
        def _tail(t0: float) -> float:
            if a == 0.0:
                return 0.0
            if r <= 0.0:
                return math.inf
            return (a * a / (2.0 * r)) * math.exp(-2.0 * r * t0)

        return _tail

    (av, rv), (avp, rvp), (au, ru) = v, v_prime, u
    return WeightSet(
        v=lambda t, a=av, r=rv: a * np.exp(-r * np.asarray(t, float)),
        v_prime=lambda t, a=avp, r=rvp: a * np.exp(-r * np.asarray(t, float)),
        u=lambda t, a=au, r=ru: a * np.exp(-r * np.asarray(t, float)),
        v_tail=tail(av, rv),
        v_prime_sq_tail=sq_tail(avp, rvp),
        u_tail=tail(au, ru),
        g_rate_bound=g_rate_bound,
    )


def zero_weights() -> WeightSet:
    """All-zero weights (drivers independent of y and z)."""
    return exponential_weights(v=(0.0, 1.0), v_prime=(0.0, 1.0), u=(0.0, 1.0))


@dataclass(frozen=True)
class ObstacleSpec:
    """Lower obstacle ``h(x)`` and terminal rule.

    ``terminal_rule`` is ``"h_of_x_tau"`` (terminal value is the obstacle
    at the final state) or ``"explicit"`` (separate evaluator ``xi``).
    Consistency requires h <= xi at terminal states, within 1e-12.
    """

    h: Callable[[Array], Array]
    terminal_rule: str = "h_of_x_tau"
    xi: Optional[Callable[[Array], Array]] = None
    name: str = "custom"
    params: dict = field(default_factory=dict)

    def __post_init__(self):
        if self.terminal_rule not in ("h_of_x_tau", "explicit"):
            raise ValueError(f"unknown terminal rule {self.terminal_rule!r}")
        if self.terminal_rule == "explicit" and self.xi is None:
            raise ValueError("explicit terminal rule requires an xi evaluator")

    def xi_eval(self, x: Array) -> Array:
        if self.terminal_rule == "h_of_x_tau":
            return np.asarray(self.h(x), dtype=float)
        return np.asarray(self.xi(x), dtype=float)

    def terminal_gap(self, states: Array) -> float:
        """max over states of h - xi (must be <= 1e-12)."""
        return float(np.max(np.asarray(self.h(states), float) - self.xi_eval(states)))


@dataclass(frozen=True)
class HorizonSpec:
    """Deterministic horizon, hitting-time horizon, or unbounded horizon.

    ``t_max`` is always the truncation cap of the computational grid; for
    deterministic horizons it equals T.
    """

    kind: str
    T: float = 0.0
    predicate: Optional[Callable[[float, Array], Array]] = None
    t_max: float = 0.0

    def __post_init__(self):
        if self.kind not in ("deterministic", "hitting", "infinite"):
            raise ValueError(f"unknown horizon kind {self.kind!r}")
        if self.kind == "deterministic":
            if self.T <= 0:
                raise ValueError("deterministic horizon requires T > 0")
            object.__setattr__(self, "t_max", float(self.T))
        else:
            if self.t_max <= 0:
                raise ValueError(f"{self.kind} horizon requires t_max > 0")
            if self.kind == "hitting" and self.predicate is None:
                raise ValueError("hitting horizon requires a predicate")


# ---------------------------------------------------------------------------
# validation
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class CheckResult:
    name: str
    passed: bool
    detail: str
    witness: Optional[dict] = None


@dataclass(frozen=True)
class ValidationReport:
    checks: tuple[CheckResult, ...]

    @property
    def passed(self) -> bool:
        return all(c.passed for c in self.checks)

    def failures(self) -> list[CheckResult]:
        return [c for c in self.checks if not c.passed]

    def as_dict(self) -> dict:
        return {
            "passed": self.passed,
            "checks": [
                {"name": c.name, "passed": c.passed, "detail": c.detail, "witness": c.witness}
                for c in self.checks
            ],
        }


@dataclass(frozen=True)
class ProbeResult:
    f_margin: float
    g_margin: float
    f_witness: Optional[dict]
    g_witness: Optional[dict]
    tol: float

    @property
    def passed(self) -> bool:
        return self.f_margin <= self.tol and self.g_margin <= self.tol


def _sample_cloud(rng, t_range, x_range, y_range, z_range, dim, n):
    t = rng.uniform(t_range[0], t_range[1], size=n)
    x = rng.uniform(x_range[0], x_range[1], size=(n, dim))
    y = rng.uniform(y_range[0], y_range[1], size=(n, 2))
    z = rng.uniform(z_range[0], z_range[1], size=(n, dim))
    return t, x, y, z


def monotonicity_probe(
    driver: DriverSpec,
    t_range: tuple[float, float] = (0.0, 10.0),
    x_range: tuple[float, float] = (0.0, 1.0),
    y_range: tuple[float, float] = (-5.0, 5.0),
    z_range: tuple[float, float] = (-5.0, 5.0),
    dim: int = 1,
    n_samples: int = 512,
    seed: int = 0,
    tol: float = 1e-8,
) -> ProbeResult:
    """Sample one-sided-slope margins of f and g in y.

    The margin of f at a sample is (y-y')(f(y)-f(y')) - alpha (y-y')^2;
    the probe reports the worst margin over the cloud (<= tol on pass) and
    the first sample exceeding the tolerance.
    """
    rng = np.random.default_rng(seed)
    t, x, y, z = _sample_cloud(rng, t_range, x_range, y_range, z_range, dim, n_samples)
    worst_f, worst_g = -math.inf, -math.inf
    wit_f = wit_g = None
    for i in range(n_samples):
        yi, yip = y[i]
        dy = yi - yip
        fi = float(driver.f(t[i], x[i : i + 1], np.array([yi]), z[i : i + 1])[0])
        fip = float(driver.f(t[i], x[i : i + 1], np.array([yip]), z[i : i + 1])[0])
        m_f = dy * (fi - fip) - driver.alpha * dy * dy
        gi = float(driver.g(t[i], x[i : i + 1], np.array([yi]))[0])
        gip = float(driver.g(t[i], x[i : i + 1], np.array([yip]))[0])
        m_g = dy * (gi - gip) - driver.beta * dy * dy
        if m_f > worst_f:
            worst_f = m_f
            if m_f > tol and wit_f is None:
                wit_f = {"t": float(t[i]), "x": x[i].tolist(), "y": float(yi), "y2": float(yip)}
        if m_g > worst_g:
            worst_g = m_g
            if m_g > tol and wit_g is None:
                wit_g = {"t": float(t[i]), "x": x[i].tolist(), "y": float(yi), "y2": float(yip)}
    return ProbeResult(f_margin=worst_f, g_margin=worst_g, f_witness=wit_f, g_witness=wit_g, tol=tol)


def validate_problem(
    driver: DriverSpec,
    obstacle: Optional[ObstacleSpec] = None,
    horizon: Optional[HorizonSpec] = None,
    weights: Optional[WeightSet] = None,
    t_range: Optional[tuple[float, float]] = None,
    x_range: tuple[float, float] = (0.0, 1.0),
    y_range: tuple[float, float] = (-5.0, 5.0),
    z_range: tuple[float, float] = (-5.0, 5.0),
    dim: int = 1,
    n_samples: int = 256,
    seed: int = 0,
    tol: float = 1e-8,
) -> ValidationReport:
    """Check declared constants and probe the structural inequalities.

    Returns one entry per assumption.  Nothing raises here: a driver with
    beta = 0 yields a failed entry with the message "beta must be
    negative" rather than an exception.
    """
    checks: list[CheckResult] = []
    if t_range is None:
        cap = horizon.t_max if horizon is not None else 10.0
        t_range = (0.0, cap)

    checks.append(
        CheckResult(
            "beta_negative",
            driver.beta < 0.0,
            "beta must be negative" if driver.beta >= 0 else f"beta = {driver.beta} < 0",
        )
    )
    lam_floor = 2.0 * abs(driver.alpha) + driver.k_f**2
    checks.append(
        CheckResult(
            "lambda_admissible",
            driver.lam > lam_floor,
            f"lambda = {driver.lam} vs floor 2|alpha| + k_f^2 = {lam_floor}",
        )
    )
    mu_floor = 2.0 * abs(driver.beta)
    checks.append(
        CheckResult(
            "mu_admissible",
            driver.mu > mu_floor,
            f"mu = {driver.mu} vs floor 2|beta| = {mu_floor}",
        )
    )

    probe = monotonicity_probe(
        driver, t_range, x_range, y_range, z_range, dim, n_samples, seed, tol
    )
    checks.append(
        CheckResult(
            "f_monotone_in_y",
            probe.f_margin <= tol,
            f"worst margin {probe.f_margin:.3e} (tol {tol:.1e})",
            probe.f_witness,
        )
    )
    checks.append(
        CheckResult(
            "g_monotone_in_y",
            probe.g_margin <= tol,
            f"worst margin {probe.g_margin:.3e} (tol {tol:.1e})",
            probe.g_witness,
        )
    )

    rng = np.random.default_rng(seed + 1)
    t, x, y, z = _sample_cloud(rng, t_range, x_range, y_range, z_range, dim, n_samples)
    z2 = rng.uniform(z_range[0], z_range[1], size=z.shape)
    worst_lip = -math.inf
    wit_lip = None
    worst_fg = -math.inf
    wit_fg = None
    worst_gg = -math.inf
    wit_gg = None
    for i in range(n_samples):
        yi = y[i, :1]
        fi = float(driver.f(t[i], x[i : i + 1], yi, z[i : i + 1])[0])
        fi2 = float(driver.f(t[i], x[i : i + 1], yi, z2[i : i + 1])[0])
        dz = float(np.linalg.norm(z[i] - z2[i]))
        m = abs(fi - fi2) - driver.k_f * dz
        if m > worst_lip:
            worst_lip = m
            if m > tol and wit_lip is None:
                wit_lip = {"t": float(t[i]), "x": x[i].tolist(), "z": z[i].tolist(), "z2": z2[i].tolist()}
        growth_f = abs(fi) - (
            float(driver.growth_phi(t[i]))
            + driver.k_growth * (abs(float(yi[0])) + float(np.linalg.norm(z[i])))
        )
        if growth_f > worst_fg:
            worst_fg = growth_f
            if growth_f > tol and wit_fg is None:
                wit_fg = {"t": float(t[i]), "x": x[i].tolist(), "y": float(yi[0]), "z": z[i].tolist()}
        gi = float(driver.g(t[i], x[i : i + 1], yi)[0])
        growth_g = abs(gi) - (float(driver.growth_psi(t[i])) + driver.k_growth * abs(float(yi[0])))
        if growth_g > worst_gg:
            worst_gg = growth_g
            if growth_g > tol and wit_gg is None:
                wit_gg = {"t": float(t[i]), "x": x[i].tolist(), "y": float(yi[0])}
    checks.append(
        CheckResult("f_lipschitz_in_z", worst_lip <= tol, f"worst margin {worst_lip:.3e}", wit_lip)
    )
    checks.append(
        CheckResult("f_growth_bound", worst_fg <= tol, f"worst margin {worst_fg:.3e}", wit_fg)
    )
    checks.append(
        CheckResult("g_growth_bound", worst_gg <= tol, f"worst margin {worst_gg:.3e}", wit_gg)
    )

    if obstacle is not None:
        states = rng.uniform(x_range[0], x_range[1], size=(n_samples, dim))
        gap = obstacle.terminal_gap(states)
        checks.append(
            CheckResult(
                "obstacle_terminal_consistency",
                gap <= 1e-12,
                f"max(h - xi) over sampled terminal states = {gap:.3e}",
            )
        )

    if weights is not None:
        mass = weights.total_mass()
        checks.append(
            CheckResult(
                "weights_integrable",
                math.isfinite(mass),
                f"total weight mass {mass}",
            )
        )

    return ValidationReport(tuple(checks))


def assert_valid(driver: DriverSpec, **kwargs) -> None:
    """Raise AssumptionError when validate_problem reports failures."""
    report = validate_problem(driver, **kwargs)
    if not report.passed:
        msgs = "; ".join(f"{c.name}: {c.detail}" for c in report.failures())
        raise AssumptionError(msgs)


# ---------------------------------------------------------------------------
# contraction arithmetic
# ---------------------------------------------------------------------------


def contraction_constant(weights: WeightSet, t0: float = 0.0) -> float:
    """Picard contraction constant of the tail problem started at t0.

    Equals 24 [ (int_t0^inf v ds + int_t0^inf u dG)^2 + int_t0^inf v'^2 ds ],
    with the local-time integral bounded through ``g_rate_bound``.  The
    iteration on the tail is a contraction when this is below one.
    """
    v_tail = weights.v_tail(t0)
    u_tail = weights.g_rate_bound * weights.u_tail(t0)
    vp_tail = weights.v_prime_sq_tail(t0)
    total = 24.0 * ((v_tail + u_tail) ** 2 + vp_tail)
    if not math.isfinite(total):
        raise DivergenceError(f"weight tails diverge at t0 = {t0}")
    return total


def max_stable_dt(driver: DriverSpec, g_rate: float = 1.0) -> float:
    """Step-size cap 1 / (2 (|alpha| + |beta| g_rate)) for the implicit step."""
    denom = 2.0 * (abs(driver.alpha) + abs(driver.beta) * g_rate)
    return math.inf if denom == 0.0 else 1.0 / denom


# ---------------------------------------------------------------------------
# registries
# ---------------------------------------------------------------------------


def _linear_driver(
    f_const: float = 0.0,
    f_y: float = 0.0,
    f_z: float = 0.0,
    g_const: float = 0.0,
    g_y: float = -1.0,
    lam: Optional[float] = None,
    mu: Optional[float] = None,
) -> DriverSpec:
    beta = g_y  # reported as-is; validation flags nonnegative values
    alpha = f_y
    k_f = abs(f_z)
    lam = lam if lam is not None else 2.0 * abs(alpha) + k_f**2 + 0.5
    mu = mu if mu is not None else 2.0 * abs(beta) + 0.5
    return DriverSpec(
        f=lambda t, x, y, z: f_const + f_y * y + f_z * z[..., 0],
        g=lambda t, x, y: g_const + g_y * y,
        alpha=alpha,
        beta=beta,
        k_f=k_f,
        lam=lam,
        mu=mu,
        growth_phi=lambda t: abs(f_const),
        growth_psi=lambda t: abs(g_const),
        k_growth=max(abs(f_y), abs(f_z), abs(g_y)),
        f_depends_y=f_y != 0.0,
        g_depends_y=g_y != 0.0,
        f_depends_z=f_z != 0.0,
        name="linear",
        params=dict(f_const=f_const, f_y=f_y, f_z=f_z, g_const=g_const, g_y=g_y),
    )


def _affine_decay_driver(
    f_amp: float = 1.0,
    f_rate: float = 2.0,
    f_y_amp: float = 0.0,
    f_y_rate: float = 1.0,
    f_z_amp: float = 0.0,
    f_z_rate: float = 1.0,
    g_y: float = -0.05,
    g_y_rate: float = 0.0,
    t_cap: float = 10.0,
    lam: Optional[float] = None,
    mu: Optional[float] = None,
) -> DriverSpec:
    """Exponentially decaying driver family for unbounded horizons.

    f(t, y, z) = f_amp e^{-f_rate t} - f_y_amp e^{-f_y_rate t} y
                 + f_z_amp e^{-f_z_rate t} z,
    g(t, y)    = g_y e^{-g_y_rate t} y            (g_y < 0).

    The one-sided slope bounds are taken uniformly over [0, t_cap].
    """
    alpha = 0.0 if f_y_amp > 0 else abs(f_y_amp)  # slope -f_y_amp e^{-rt} <= 0
    beta = g_y * math.exp(-g_y_rate * t_cap)  # worst (least negative) slope on the grid
    k_f = abs(f_z_amp)
    lam = lam if lam is not None else 2.0 * abs(alpha) + k_f**2 + 0.5
    mu = mu if mu is not None else 2.0 * abs(beta) + 0.5
    return DriverSpec(
        f=lambda t, x, y, z: (
            f_amp * np.exp(-f_rate * t)
            - f_y_amp * np.exp(-f_y_rate * t) * y
            + f_z_amp * np.exp(-f_z_rate * t) * z[..., 0]
        ),
        g=lambda t, x, y: g_y * np.exp(-g_y_rate * t) * y,
        alpha=alpha,
        beta=beta,
        k_f=k_f,
        lam=lam,
        mu=mu,
        growth_phi=lambda t: abs(f_amp) * math.exp(-f_rate * t),
        growth_psi=lambda t: 0.0,
        k_growth=max(abs(f_y_amp), abs(f_z_amp), abs(g_y)),
        f_depends_y=f_y_amp != 0.0,
        g_depends_y=g_y != 0.0,
        f_depends_z=f_z_amp != 0.0,
        name="affine_decay",
        params=dict(
            f_amp=f_amp, f_rate=f_rate, f_y_amp=f_y_amp, f_y_rate=f_y_rate,
            f_z_amp=f_z_amp, f_z_rate=f_z_rate, g_y=g_y, g_y_rate=g_y_rate, t_cap=t_cap,
        ),
    )


def _put_payoff_driver(rate: float = 0.05, g_y: float = -0.05) -> DriverSpec:
    """Discounting driver for optimal stopping: f = -rate * y, g = g_y * y."""
    return DriverSpec(
        f=lambda t, x, y, z: -rate * y,
        g=lambda t, x, y: g_y * y,
        alpha=-rate,
        beta=g_y,
        k_f=0.0,
        lam=2.0 * rate + 0.5,
        mu=2.0 * abs(g_y) + 0.5,
        growth_phi=lambda t: 0.0,
        growth_psi=lambda t: 0.0,
        k_growth=max(rate, abs(g_y)),
        f_depends_y=True,
        g_depends_y=True,
        f_depends_z=False,
        name="put_payoff",
        params=dict(rate=rate, g_y=g_y),
    )


def _manufactured_pde_driver(alpha: float = -1.0, beta: float = -8.0) -> DriverSpec:
    """Driver manufactured so u(x) = x^2 solves the obstacle-free problem
    on [0, 1] with unit diffusion and no drift.

    f(x, u) = -1 + alpha (u - x^2) vanishes the interior residual
    (Lu + f = 0 for u = x^2), and g(x, u) = 2x + beta (u - x^2) meets the
    boundary conditions g(0, u(0)) = 0 and g(1, u(1)) = 2.  alpha and beta
    control how fast the backward flow forgets terminal data; they do not
    move the solution.
    """
    if alpha >= 0 or beta >= 0:
        raise ValueError("manufactured driver needs alpha < 0 and beta < 0")
    return DriverSpec(
        f=lambda t, x, y, z: -1.0 + alpha * (y - x[..., 0] ** 2),
        g=lambda t, x, y: 2.0 * x[..., 0] + beta * (y - x[..., 0] ** 2),
        alpha=alpha,
        beta=beta,
        k_f=0.0,
        lam=2.0 * abs(alpha) + 0.5,
        mu=2.0 * abs(beta) + 0.5,
        growth_phi=lambda t: 1.0 + abs(alpha),
        growth_psi=lambda t: 2.0 + abs(beta),
        k_growth=max(abs(alpha), abs(beta)),
        f_depends_y=True,
        g_depends_y=True,
        f_depends_z=False,
        name="manufactured_pde",
        params=dict(alpha=alpha, beta=beta),
    )


_DRIVERS = {
    "linear": _linear_driver,
    "affine_decay": _affine_decay_driver,
    "put_payoff": _put_payoff_driver,
    "manufactured_pde": _manufactured_pde_driver,
}


def make_driver(name: str, **params) -> DriverSpec:
    """Build a driver from the registry of named families.

    Only numeric parameters are accepted; there is no expression parsing.
    """
    try:
        builder = _DRIVERS[name]
    except KeyError:
        raise KeyError(f"unknown driver {name!r}; available: {sorted(_DRIVERS)}") from None
    return builder(**params)


def driver_names() -> list[str]:
    return sorted(_DRIVERS)


def _constant_obstacle(level: float = -1e6) -> ObstacleSpec:
    return ObstacleSpec(
        h=lambda x: np.full(x.shape[0], level),
        terminal_rule="h_of_x_tau",
        name="constant",
        params=dict(level=level),
    )


def _sentinel_obstacle(xi_level: float = 0.0) -> ObstacleSpec:
    """Obstacle low enough to never bind, with an explicit terminal value."""
    return ObstacleSpec(
        h=lambda x: np.full(x.shape[0], -1e6),
        terminal_rule="explicit",
        xi=lambda x: np.full(x.shape[0], xi_level),
        name="sentinel",
        params=dict(xi_level=xi_level),
    )


def _put_obstacle(strike: float = 0.6) -> ObstacleSpec:
    return ObstacleSpec(
        h=lambda x: np.maximum(strike - x[..., 0], 0.0),
        terminal_rule="h_of_x_tau",
        name="put",
        params=dict(strike=strike),
    )


_OBSTACLES = {
    "constant": _constant_obstacle,
    "sentinel": _sentinel_obstacle,
    "put": _put_obstacle,
}


def make_obstacle(name: str, **params) -> ObstacleSpec:
    try:
        builder = _OBSTACLES[name]
    except KeyError:
        raise KeyError(f"unknown obstacle {name!r}; available: {sorted(_OBSTACLES)}") from None
    return builder(**params)


def obstacle_names() -> list[str]:
    return sorted(_OBSTACLES)
