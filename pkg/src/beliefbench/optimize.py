"""Minimal derivative-free simplex (Nelder-Mead) minimizer.

Deterministic: no randomness, fixed coefficients, so fits are reproducible
bit-for-bit across runs and platforms with the same libm.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Sequence

_ALPHA = 1.0  # reflection
_GAMMA = 2.0  # expansion
_RHO = 0.5    # contraction
_SIGMA = 0.5  # shrink


@dataclass(frozen=True)
class SimplexResult:
    x: tuple[float, ...]
    fun: float
    iterations: int
    converged: bool


def nelder_mead(
    fun: Callable[[Sequence[float]], float],
    x0: Sequence[float],
    step: float = 0.5,
    fun_tol: float = 1e-14,
    x_tol: float = 1e-12,
    max_iter: int = 400,
    target: float | None = None,
) -> SimplexResult:
    """Minimize ``fun`` starting from ``x0``.

    Stops when the simplex collapses (function spread < ``fun_tol`` and
    diameter < ``x_tol``), when ``max_iter`` is exhausted, or as soon as the
    best value drops below ``target`` (used to cut multistart fits short).
    """
    n = len(x0)
    pts = [list(x0)]
    for i in range(n):
        p = list(x0)
        p[i] += step
        pts.append(p)
    vals = [fun(p) for p in pts]

    iterations = 0
    while iterations < max_iter:
        iterations += 1
        order = sorted(range(n + 1), key=lambda k: vals[k])
        pts = [pts[k] for k in order]
        vals = [vals[k] for k in order]

        if target is not None and vals[0] <= target:
            return SimplexResult(tuple(pts[0]), vals[0], iterations, True)
        spread = vals[-1] - vals[0]
        diam = max(
            max(abs(pts[j][i] - pts[0][i]) for i in range(n)) for j in range(1, n + 1)
        )
        if spread < fun_tol and diam < x_tol:
            return SimplexResult(tuple(pts[0]), vals[0], iterations, True)

        centroid = [sum(pts[j][i] for j in range(n)) / n for i in range(n)]
        worst = pts[-1]

        reflected = [centroid[i] + _ALPHA * (centroid[i] - worst[i]) for i in range(n)]
        f_ref = fun(reflected)
        if vals[0] <= f_ref < vals[-2]:
            pts[-1], vals[-1] = reflected, f_ref
            continue
        if f_ref < vals[0]:
            expanded = [centroid[i] + _GAMMA * (centroid[i] - worst[i]) for i in range(n)]
            f_exp = fun(expanded)
            if f_exp < f_ref:
                pts[-1], vals[-1] = expanded, f_exp
            else:
                pts[-1], vals[-1] = reflected, f_ref
            continue
        contracted = [centroid[i] + _RHO * (worst[i] - centroid[i]) for i in range(n)]
        f_con = fun(contracted)
        if f_con < vals[-1]:
            pts[-1], vals[-1] = contracted, f_con
            continue
        # shrink toward the best vertex
        for j in range(1, n + 1):
            pts[j] = [pts[0][i] + _SIGMA * (pts[j][i] - pts[0][i]) for i in range(n)]
            vals[j] = fun(pts[j])

    order = sorted(range(n + 1), key=lambda k: vals[k])
    best = order[0]
    converged = target is not None and vals[best] <= target
    return SimplexResult(tuple(pts[best]), vals[best], iterations, converged)
