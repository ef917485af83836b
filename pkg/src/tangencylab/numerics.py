"""Small shared numerics: guarded Newton iteration with bisection fallback."""

from __future__ import annotations

from typing import Callable

from .errors import NumericError

__all__ = ["solve_newton"]


def solve_newton(
    f: Callable[[float], float],
    fprime: Callable[[float], float],
    x0: float,
    *,
    tol: float,
    bracket: tuple[float, float] | None = None,
    max_iter: int = 60,
) -> float:
    """Root of f near x0 with |f(root)| <= tol.

    Newton steps are taken while they behave (finite derivative, iterate
    inside the bracket when one is given); otherwise the solver falls back to
    bisection on the bracket.  Raises NumericError with the final residual if
    neither converges.
    """
    x = float(x0)
    lo, hi = (None, None) if bracket is None else (min(bracket), max(bracket))
    for _ in range(max_iter):
        fx = f(x)
        if abs(fx) <= tol:
            return x
        dfx = fprime(x)
        if dfx == 0.0:
            break
        step = fx / dfx
        nxt = x - step
        if lo is not None and not (lo <= nxt <= hi):
            break
        if nxt == x:
            return x if abs(fx) <= tol else _bisect_or_fail(f, lo, hi, tol, fx)
        x = nxt
    residual = f(x)
    if abs(residual) <= tol:
        return x
    return _bisect_or_fail(f, lo, hi, tol, residual)


def _bisect_or_fail(f, lo, hi, tol, last_residual) -> float:
    if lo is None:
        raise NumericError("Newton iteration failed and no bracket was given", residual=abs(last_residual))
    flo, fhi = f(lo), f(hi)
    if flo == 0.0:
        return lo
    if fhi == 0.0:
        return hi
    if flo * fhi > 0.0:
        raise NumericError("no sign change in bracket for bisection fallback", residual=abs(last_residual))
    for _ in range(200):
        mid = 0.5 * (lo + hi)
        fm = f(mid)
        if abs(fm) <= tol or mid == lo or mid == hi:
            if abs(fm) <= tol:
                return mid
            break
        if flo * fm <= 0.0:
            hi, fhi = mid, fm
        else:
            lo, flo = mid, fm
    mid = 0.5 * (lo + hi)
    raise NumericError("bisection stalled above tolerance", residual=abs(f(mid)))
