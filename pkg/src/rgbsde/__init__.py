"""Reflected generalized BSDEs on bounded domains.

The package covers the full pipeline from reflected-diffusion simulation to
obstacle PDEs:

* :mod:`rgbsde.geometry` -- interval/ball domains, boundary distance,
  inward normals, projection.
* :mod:`rgbsde.reflected_sde` -- projection Euler scheme with boundary
  local time, hitting times, moment diagnostics.
* :mod:`rgbsde.drivers` -- problem data (drivers, weights, obstacles,
  horizons), assumption validation, contraction constants.
* :mod:`rgbsde.snell` -- lattice Snell envelopes, Doob-Meyer decomposition,
  exhaustive optimal-stopping oracles.
* :mod:`rgbsde.solver` -- regression and tree-exact backward solvers for
  reflected equations with boundary (local-time) driver terms, on finite,
  random, and infinite horizons.
* :mod:`rgbsde.pricing` -- stopping rules, payoff estimates, optimality
  checks.
* :mod:`rgbsde.pde` -- finite-difference obstacle problems with nonlinear
  Neumann boundary conditions, cross-validated against the probabilistic
  solver.
* :mod:`rgbsde.presets` / :mod:`rgbsde.cli` -- named experiment pipelines,
  config validation, reproducible runs.
"""

from __future__ import annotations

__version__ = "0.1.0"

__all__ = ["__version__"]
