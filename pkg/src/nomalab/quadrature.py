"""Thin wrapper around adaptive quadrature with an explicit failure channel.

All semi-infinite integrals in this package go through `integrate_semi_infinite`,
which applies the y = u/(1-u) substitution onto (0, 1) before handing off to
the adaptive scheme, per the numerical design of the analytics layer.
"""

from __future__ import annotations

import warnings
from typing import Callable

from scipy.integrate import IntegrationWarning, quad

from nomalab.errors import IntegrationError

REL_TOL = 1e-8
ABS_FLOOR = 1e-12
_SUBDIV_LIMIT = 200


def integrate(
    f: Callable[[float], float],
    a: float,
    b: float,
    rel_tol: float = REL_TOL,
    abs_floor: float = ABS_FLOOR,
) -> float:
    """Integrate f over the finite interval (a, b).

    Raises IntegrationError when the adaptive scheme reports non-convergence
    and its error estimate exceeds the requested tolerance.
    """
    if a == b:
        return 0.0
    try:
        with warnings.catch_warnings():
            warnings.simplefilter("error", IntegrationWarning)
            try:
                value, err = quad(
                    f, a, b, epsabs=abs_floor, epsrel=rel_tol, limit=_SUBDIV_LIMIT
                )
            except IntegrationWarning as exc:
                # Re-run tolerantly to recover the estimate, then judge it.
                with warnings.catch_warnings():
                    warnings.simplefilter("ignore", IntegrationWarning)
                    value, err = quad(
                        f, a, b, epsabs=abs_floor, epsrel=rel_tol, limit=_SUBDIV_LIMIT
                    )
                if err > max(abs_floor, 100.0 * rel_tol * abs(value)):
                    raise IntegrationError(
                        f"quadrature on ({a:.6g}, {b:.6g}) did not converge: {exc}"
                    ) from exc
    except ZeroDivisionError as exc:
        # Subdivision only reaches a singular endpoint when the tail does not
        # decay; report that as non-convergence instead of leaking the raw error.
        raise IntegrationError(
            f"quadrature on ({a:.6g}, {b:.6g}) pushed nodes onto a singular "
            "endpoint; the integral probably diverges"
        ) from exc
    if value != value:  # NaN
        raise IntegrationError(f"quadrature on ({a:.6g}, {b:.6g}) returned NaN")
    return value


def integrate_semi_infinite(
    f: Callable[[float], float],
    a: float,
    rel_tol: float = REL_TOL,
    abs_floor: float = ABS_FLOOR,
) -> float:
    """Integrate f over (a, infinity) via the u/(1-u) map onto the unit interval."""

    def mapped(u: float) -> float:
        one_minus = 1.0 - u
        y = a + u / one_minus
        return f(y) / (one_minus * one_minus)

    return integrate(mapped, 0.0, 1.0, rel_tol=rel_tol, abs_floor=abs_floor)
