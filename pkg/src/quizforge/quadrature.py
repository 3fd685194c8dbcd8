"""Adaptive Simpson quadrature with an absolute error target."""

from __future__ import annotations


class IntegrationError(ArithmeticError):
    pass


def _simpson(f, a, fa, b, fb):
    m = (a + b) / 2
    fm = f(m)
    return m, fm, (b - a) / 6 * (fa + 4 * fm + fb)


def _adaptive(f, a, fa, b, fb, m, fm, whole, tol, depth):
    lm, flm, left = _simpson(f, a, fa, m, fm)
    rm, frm, right = _simpson(f, m, fm, b, fb)
    delta = left + right - whole
    if abs(delta) <= 15 * tol:
        return left + right + delta / 15
    if depth <= 0:
        raise IntegrationError("adaptive Simpson did not converge")
    return (_adaptive(f, a, fa, m, fm, lm, flm, left, tol / 2, depth - 1)
            + _adaptive(f, m, fm, b, fb, rm, frm, right, tol / 2, depth - 1))


def integrate(f, lower: float, upper: float, tol: float = 1e-8,
              max_depth: int = 50) -> float:
    """Integrate f over [lower, upper] to absolute tolerance tol."""
    if lower == upper:
        return 0.0
    sign = 1.0
    a, b = lower, upper
    if a > b:
        a, b = b, a
        sign = -1.0
    fa, fb = f(a), f(b)
    m, fm, whole = _simpson(f, a, fa, b, fb)
    return sign * _adaptive(f, a, fa, b, fb, m, fm, whole, tol, max_depth)
