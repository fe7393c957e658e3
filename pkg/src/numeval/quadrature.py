"""
Numerical integration of projective forms over the standard simplex.

On the slice ∑α = 1 the form P Ψ^a / Ξ^b Ω becomes an ordinary integral over
the simplex; the unit cube is mapped onto it by stick breaking.
"""

import logging
import warnings
from typing import Callable, Literal, Optional, Tuple

import numpy as np
import sympy as sp
import vegas
from pydantic import BaseModel, Field
from scipy import integrate

import config
from graphkin import KinematicPoint, validate_generic
from polyalg import KPoly, quadratic_form_matrix
from symanzik import ParametricIntegrand

from . import DivergentIntegralError, NonEuclideanError, NumevalError

# Configure module-specific logger
logger = logging.getLogger(__name__)

Method = Literal["adaptive", "mc"]


class QuadratureResult(BaseModel):
    value: float
    error_estimate: float = Field(..., ge=0)
    method: Method
    samples: int = Field(..., description="Function evaluations (mc) or subdivision limit (adaptive)")
    seed: Optional[int] = None

    def relative_error(self, reference: float) -> float:
        return abs(self.value - reference) / abs(reference)


def _simplex_map(u: np.ndarray) -> Tuple[np.ndarray, np.ndarray]:
    """
    Stick breaking from [0,1]^{n−1} onto {x ≥ 0, ∑x = 1} ⊂ R^n.

    Args:
        u: Array of shape (batch, n−1)

    Returns:
        (x of shape (batch, n), Jacobian of shape (batch,))
    """
    batch, dim = u.shape
    x = np.empty((batch, dim + 1))
    remaining = np.ones(batch)
    jacobian = np.ones(batch)
    for i in range(dim):
        x[:, i] = remaining * u[:, i]
        jacobian *= remaining
        remaining = remaining * (1.0 - u[:, i])
    x[:, dim] = remaining
    return x, jacobian


def _integrand(
    numerator: KPoly, xi: KPoly, psi_power: int, xi_power: int
) -> Tuple[Callable[[np.ndarray], np.ndarray], Callable[..., float]]:
    """Batch integrand for vegas and scalar integrand for scipy, both on the cube."""
    alphas = xi.alphas
    psi = sp.Add(*alphas)
    expr = numerator.as_expr() * psi**psi_power / xi.as_expr() ** xi_power
    batch_func = sp.lambdify(alphas, expr, "numpy")
    scalar_func = sp.lambdify(alphas, expr, "math")

    def evaluate_batch(u: np.ndarray) -> np.ndarray:
        x, jacobian = _simplex_map(np.atleast_2d(u))
        values = batch_func(*(x[:, i] for i in range(x.shape[1])))
        return np.broadcast_to(values, jacobian.shape) * jacobian

    def evaluate_scalar(*u: float) -> float:
        x = []
        remaining = 1.0
        jacobian = 1.0
        for t in u:
            x.append(remaining * t)
            jacobian *= remaining
            remaining *= 1.0 - t
        x.append(remaining)
        return float(scalar_func(*x)) * jacobian

    return evaluate_batch, evaluate_scalar


def _check_vertices(xi: KPoly) -> None:
    C = quadratic_form_matrix(xi).entries
    for i in range(C.rows):
        if not C[i, i] > 0:
            raise DivergentIntegralError(
                f"Ξ vanishes or changes sign at the simplex vertex of {xi.alphas[i].name}"
            )


def simplex_quadrature(
    numerator: KPoly,
    xi: KPoly,
    xi_power: int,
    psi_power: int = 0,
    method: Method = "adaptive",
    budget: Optional[int] = None,
    seed: Optional[int] = None,
    epsrel: Optional[float] = None,
) -> QuadratureResult:
    """
    ∫_σ P Ψ^a / Ξ^b Ω for one-loop Ψ = ∑α, with every polynomial already
    specialized to rational coefficients.

    Args:
        numerator: P
        xi: Ξ at the kinematic point
        xi_power: b
        psi_power: a
        method: "adaptive" (scipy) or "mc" (vegas)
        budget: Subdivision limit (adaptive) or total evaluations (mc)
        seed: Random seed for mc
        epsrel: Relative tolerance for adaptive integration

    Raises:
        DivergentIntegralError: If Ξ is not positive at a simplex vertex
    """
    if xi_power > 0:
        _check_vertices(xi)
    dim = xi.arity - 1
    f, f_scalar = _integrand(numerator, xi, psi_power, xi_power)

    if method == "adaptive":
        limit = budget or config.common.ADAPTIVE_LIMIT
        epsrel = epsrel if epsrel is not None else config.common.ADAPTIVE_EPSREL
        opts = {"epsabs": 0.0, "epsrel": epsrel, "limit": limit}
        with warnings.catch_warnings(record=True) as caught:
            warnings.simplefilter("always", integrate.IntegrationWarning)
            if dim == 1:
                value, error = integrate.quad(f_scalar, 0.0, 1.0, **opts)
            else:
                value, error = integrate.nquad(f_scalar, dim * [[0.0, 1.0]], opts=opts)
        for warning in caught:
            logger.warning(f"Adaptive quadrature: {warning.message}")
        return QuadratureResult(value=value, error_estimate=abs(error), method="adaptive", samples=limit)

    if method == "mc":
        seed = config.common.DEFAULT_SEED if seed is None else seed
        budget = budget or config.common.MC_SAMPLES
        iterations = config.common.MC_ITERATIONS
        np.random.seed(seed)
        integ = vegas.Integrator(dim * [[0, 1]])

        @vegas.batchintegrand
        def batch(u):
            return f(np.asarray(u))

        # adaptation pass, discarded
        integ(batch, nitn=iterations, neval=max(budget // (4 * iterations), 1000))
        result = integ(batch, nitn=iterations, neval=max(budget // iterations, 1000))
        logger.debug(f"vegas: {result.summary()}")
        return QuadratureResult(
            value=float(result.mean),
            error_estimate=float(result.sdev),
            method="mc",
            samples=budget,
            seed=seed,
        )

    raise NumevalError(f"Unknown quadrature method: {method}")


def parametric_quadrature(
    ig: ParametricIntegrand,
    p: KinematicPoint,
    method: Method = "adaptive",
    budget: Optional[int] = None,
    seed: Optional[int] = None,
    epsrel: Optional[float] = None,
) -> QuadratureResult:
    """
    I_G(m,q) = ∫_σ ω_G(m,q) at a Euclidean kinematic point.

    Raises:
        DivergentIntegralError: For integrands flagged divergent
        NonEuclideanError: If p is off the Euclidean sheet
    """
    if ig.divergent:
        raise DivergentIntegralError(ig.divergence_reason or f"{ig.graph.name} diverges")
    if not validate_generic(ig.graph, p).euclidean:
        raise NonEuclideanError(f"kinematic point is not on the Euclidean sheet of {ig.graph.name}")
    xi = ig.polynomials.xi.specialize(p.substitutions(ig.graph))
    one = KPoly(1, xi.alphas)
    result = simplex_quadrature(
        one, xi, ig.xi_power, ig.psi_power, method=method, budget=budget, seed=seed, epsrel=epsrel
    )
    logger.info(
        f"{ig.graph.name} d={ig.dimension}: {result.value:.12g} ± {result.error_estimate:.2g} ({result.method})"
    )
    return result


__all__ = ["QuadratureResult", "simplex_quadrature", "parametric_quadrature"]
