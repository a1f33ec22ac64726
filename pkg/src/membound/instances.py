"""Convex test instances: distance cones L*||x - c|| (the hard-family
building block), max-affine functions with reference optima, adversarial
subgradient selectors, and the fixed 10-instance corpus the experiment
harness measures against.

Instances are immutable; evaluator and subgradient selector are pure.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace
from typing import Callable

import numpy as np
from scipy.optimize import linprog

from .geometry import greedy_packing, spawn_rng

__all__ = [
    "ConvexInstance",
    "make_distance_instance",
    "make_max_affine_instance",
    "make_hard_family",
    "adversarial_subgradient_selector",
    "ADVERSARIAL_MODES",
    "standard_corpus",
    "parse_instance_token",
    "check_instance",
]

ADVERSARIAL_MODES = ("max-norm", "fixed-direction", "kink-worst")

_TIE_TOL = 1e-12


@dataclass(frozen=True, eq=False)
class ConvexInstance:
    """A queryable convex Lipschitz function.

    L bounds the subgradient norms, B bounds the norm of the declared
    optimum, V bounds |F| on the unit query ball. x_star/f_star are known
    for all built-ins and drive suboptimality reporting.
    """

    d: int
    L: float
    B: float
    V: float
    x_star: np.ndarray | None
    f_star: float | None
    evaluate: Callable[[np.ndarray], float]
    subgradient: Callable[[np.ndarray], np.ndarray]
    token: str
    structure: tuple | None = None


def _fmt(v: float) -> str:
    return repr(float(v))


def _fmt_vec(x) -> str:
    return ",".join(_fmt(v) for v in np.asarray(x, dtype=float))


def make_distance_instance(x_center, L: float = 1.0) -> ConvexInstance:
    """F(x) = L * ||x - x_center||, optimum x_center with F* = 0.

    The default selector returns the unit-scaled direction away from the
    center, and 0 at the kink, so the optimum is a fixed point of gradient
    descent.
    """
    c = np.asarray(x_center, dtype=float).copy()
    if c.ndim != 1 or not np.all(np.isfinite(c)):
        raise ValueError("x_center must be a finite vector")
    if not (L > 0 and math.isfinite(L)):
        raise ValueError(f"L must be positive, got {L!r}")
    d = c.shape[0]
    c.flags.writeable = False

    def evaluate(x) -> float:
        return L * float(np.linalg.norm(np.asarray(x, dtype=float) - c))

    def subgradient(x) -> np.ndarray:
        delta = np.asarray(x, dtype=float) - c
        r = float(np.linalg.norm(delta))
        if r == 0.0:
            return np.zeros(d)
        return (L / r) * delta

    token = f"dist:d={d}:c={_fmt_vec(c)}"
    if L != 1.0:
        token += f":L={_fmt(L)}"
    norm_c = float(np.linalg.norm(c))
    return ConvexInstance(
        d=d,
        L=float(L),
        B=norm_c,
        V=float(L) * (1.0 + norm_c),
        x_star=c,
        f_star=0.0,
        evaluate=evaluate,
        subgradient=subgradient,
        token=token,
        structure=("distance", c, float(L)),
    )


def make_max_affine_instance(slopes, offsets) -> ConvexInstance:
    """F(x) = max_i <a_i, x> + b_i with the smallest-index maximizer's slope
    as the default subgradient.

    The reference optimum is computed at construction from the epigraph LP
    min t s.t. Ax + b <= t; construction fails if the minimum is not
    attained (the instance would fall outside the bounded-optimum class).
    """
    A = np.atleast_2d(np.asarray(slopes, dtype=float)).copy()
    b = np.atleast_1d(np.asarray(offsets, dtype=float)).copy()
    if A.size == 0 or b.size == 0:
        raise ValueError("max-affine instance needs at least one piece")
    if A.shape[0] != b.shape[0]:
        raise ValueError(f"{A.shape[0]} slopes vs {b.shape[0]} offsets")
    if not (np.all(np.isfinite(A)) and np.all(np.isfinite(b))):
        raise ValueError("pieces must be finite")
    k, d = A.shape
    A.flags.writeable = False
    b.flags.writeable = False

    # Epigraph LP over (x, t): minimize t subject to a_i.x - t <= -b_i.
    res = linprog(
        c=np.r_[np.zeros(d), 1.0],
        A_ub=np.hstack([A, -np.ones((k, 1))]),
        b_ub=-b,
        bounds=[(None, None)] * (d + 1),
        method="highs",
    )
    if not res.success:
        raise ValueError(
            "max-affine minimum is not attained (pieces must cone upward): "
            + str(res.message)
        )
    x_star = np.array(res.x[:d])
    x_star.flags.writeable = False
    f_star = float(np.max(A @ x_star + b))
    L = float(np.max(np.linalg.norm(A, axis=1)))

    def evaluate(x) -> float:
        return float(np.max(A @ np.asarray(x, dtype=float) + b))

    def subgradient(x) -> np.ndarray:
        vals = A @ np.asarray(x, dtype=float) + b
        return A[int(np.argmax(vals))].copy()

    token = (
        f"maxaff:d={d}"
        f":a={';'.join(_fmt_vec(row) for row in A)}"
        f":b={_fmt_vec(b)}"
    )
    V = float(np.max(np.linalg.norm(A, axis=1) + np.abs(b)))
    return ConvexInstance(
        d=d,
        L=L,
        B=float(np.linalg.norm(x_star)),
        V=max(V, abs(f_star)),
        x_star=x_star,
        f_star=f_star,
        evaluate=evaluate,
        subgradient=subgradient,
        token=token,
        structure=("maxaffine", A, b),
    )


def make_hard_family(
    d: int, eps: float, L: float = 1.0, B: float = 1.0, budget: int | None = None
) -> list[ConvexInstance]:
    """The lower-bound family: one distance instance per point of a
    (2*eps/L)-separated packing of the radius-B ball.

    Any point that is eps-optimal for one member is > eps-suboptimal for all
    others. With an unrestricted budget the family size reaches
    (L*B/(2*eps))^d.
    """
    if not (0 < eps <= L * B / 2):
        raise ValueError(f"need 0 < eps <= LB/2, got eps={eps!r}, L={L!r}, B={B!r}")
    if budget is None:
        budget = math.ceil((L * B / (2 * eps)) ** d)
    packing = greedy_packing(d, B, alpha=2 * eps / L, budget=budget)
    return [make_distance_instance(p, L) for p in packing.points]


def _active_pieces(A, b, x) -> np.ndarray:
    vals = A @ x + b
    top = float(np.max(vals))
    return np.flatnonzero(vals >= top - _TIE_TOL * max(1.0, abs(top)))


def adversarial_subgradient_selector(base: ConvexInstance, mode: str) -> ConvexInstance:
    """Same function, different valid subgradient selector.

    Exercises the worst-case-over-subgradients semantics: at kinks and ties
    the selector picks a different element of the subdifferential than the
    default. Away from non-differentiable points all modes agree with the
    unique gradient.
    """
    if mode not in ADVERSARIAL_MODES:
        raise ValueError(f"mode must be one of {ADVERSARIAL_MODES}, got {mode!r}")
    if base.structure is None:
        raise ValueError("instance does not expose its subdifferential structure")
    kind = base.structure[0]

    if kind == "distance":
        _, center, L = base.structure
        d = base.d

        def selector(x) -> np.ndarray:
            delta = np.asarray(x, dtype=float) - center
            r = float(np.linalg.norm(delta))
            if r > 0.0:
                return (L / r) * delta
            # Subdifferential at the kink is the full radius-L ball.
            g = np.zeros(d)
            if mode == "max-norm":
                g[0] = L
            elif mode == "fixed-direction":
                g[:] = L / math.sqrt(d)
            else:  # kink-worst: push off the optimum
                g[0] = -L
            return g

    elif kind == "maxaffine":
        _, A, b = base.structure
        if mode == "kink-worst" and base.x_star is None:
            raise ValueError("kink-worst needs a known optimum")
        x_star = base.x_star

        def selector(x) -> np.ndarray:
            x = np.asarray(x, dtype=float)
            active = _active_pieces(A, b, x)
            if mode == "max-norm":
                norms = np.linalg.norm(A[active], axis=1)
                return A[active[int(np.argmax(norms))]].copy()
            if mode == "fixed-direction":
                return A[active[0]].copy()
            uphill = A[active] @ (x - x_star)
            return A[active[int(np.argmax(uphill))]].copy()

    else:
        raise ValueError(f"unknown structure kind {kind!r}")

    return replace(base, subgradient=selector, token=base.token + f":adv={mode}")


def standard_corpus(d: int, seed: int) -> list[ConvexInstance]:
    """The fixed measurement corpus: 5 distance + 5 max-affine instances in
    the L = B = 1 class, deterministic in (d, seed).

    Max-affine members are built so every piece ties at a sampled interior
    point, which makes that point the exact global optimum; offsets stay
    small enough that |F| <= 2 on the unit ball (the value-codec window).
    """
    out: list[ConvexInstance] = []
    for i in range(5):
        rng = spawn_rng(seed, 0, i)
        direction = rng.standard_normal(d)
        direction /= np.linalg.norm(direction)
        radius = 0.9 * rng.random() ** (1.0 / d)
        out.append(make_distance_instance(radius * direction))
    for i in range(5):
        rng = spawn_rng(seed, 1, i)
        q, _ = np.linalg.qr(rng.standard_normal((d, d)))
        scales = rng.uniform(0.4, 1.0, size=d)
        A = np.vstack([q.T * scales[:, None], -q.T * scales[:, None]])
        direction = rng.standard_normal(d)
        direction /= np.linalg.norm(direction)
        x0 = 0.5 * rng.random() ** (1.0 / d) * direction
        v0 = rng.uniform(-0.3, 0.3)
        b = v0 - A @ x0
        out.append(make_max_affine_instance(A, b))
    return out


def parse_instance_token(token: str) -> ConvexInstance:
    """Rebuild an instance from its compact text token.

    Grammar (floats are repr-formatted):
      dist:d=<d>:c=<x1,...,xd>[:L=<L>][:adv=<mode>]
      maxaff:d=<d>:a=<a11,..;a21,..>:b=<b1,...>[:adv=<mode>]
    """
    fields = token.split(":")
    kind = fields[0]
    kv = {}
    for part in fields[1:]:
        key, _, val = part.partition("=")
        kv[key] = val
    try:
        d = int(kv["d"])
        if kind == "dist":
            c = np.array([float(v) for v in kv["c"].split(",")])
            inst = make_distance_instance(c, L=float(kv.get("L", 1.0)))
        elif kind == "maxaff":
            A = np.array(
                [[float(v) for v in row.split(",")] for row in kv["a"].split(";")]
            )
            b = np.array([float(v) for v in kv["b"].split(",")])
            inst = make_max_affine_instance(A, b)
        else:
            raise KeyError(kind)
    except (KeyError, ValueError, IndexError) as exc:
        raise ValueError(f"malformed instance token {token!r}") from exc
    if inst.d != d:
        raise ValueError(f"token declares d={d} but parameters have d={inst.d}")
    if "adv" in kv:
        inst = adversarial_subgradient_selector(inst, kv["adv"])
    return inst


def check_instance(inst: ConvexInstance, n_pairs: int = 10_000, seed: int = 0) -> dict:
    """Sampled convexity / Lipschitz / subgradient-inequality audit.

    Draws point pairs from the unit-or-B ball and returns the worst slack of
    each inequality (positive slack = violation beyond the 1e-9 tolerance).
    """
    rng = spawn_rng(seed)
    radius = max(1.0, inst.B)
    n = int(n_pairs)
    dirs = rng.standard_normal((2 * n, inst.d))
    dirs /= np.linalg.norm(dirs, axis=1, keepdims=True)
    radii = radius * rng.random(2 * n) ** (1.0 / inst.d)
    pts = dirs * radii[:, None]
    xs, ys = pts[:n], pts[n:]

    worst = {
        "convexity": -math.inf,
        "lipschitz": -math.inf,
        "subgrad_norm": -math.inf,
        "subgrad_ineq": -math.inf,
        "opt_norm": (float(np.linalg.norm(inst.x_star)) - inst.B)
        if inst.x_star is not None
        else -math.inf,
    }
    for x, y in zip(xs, ys):
        fx, fy = inst.evaluate(x), inst.evaluate(y)
        fm = inst.evaluate((x + y) / 2)
        g = inst.subgradient(x)
        dist = float(np.linalg.norm(x - y))
        worst["convexity"] = max(worst["convexity"], fm - (fx + fy) / 2 - 1e-9)
        worst["lipschitz"] = max(
            worst["lipschitz"], abs(fx - fy) - inst.L * dist * (1 + 1e-9)
        )
        worst["subgrad_norm"] = max(
            worst["subgrad_norm"], float(np.linalg.norm(g)) - inst.L * (1 + 1e-9)
        )
        worst["subgrad_ineq"] = max(
            worst["subgrad_ineq"], fx + float(g @ (y - x)) - fy - 1e-9
        )
    return worst
