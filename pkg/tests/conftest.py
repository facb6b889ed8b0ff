"""Shared helpers: a seeded random-expression generator used by both the
derivative property test and the acceptance suite.
"""

import math

from reflexivity import expr

# abs/tan/log/sqrt are left out on purpose: kinks and domain edges make
# central finite differences ill-conditioned near randomly drawn points.
_FUNCS = ("sin", "cos", "tanh", "exp")

FD_STEP = 1e-6


def gen_source(rng, depth):
    if depth <= 0 or rng.random() < 0.3:
        if rng.random() < 0.65:
            return "x"
        return format(rng.uniform(-2.0, 2.0), ".3f")
    r = rng.random()
    if r < 0.55:
        op = rng.choice("+-*")
        return f"({gen_source(rng, depth - 1)} {op} {gen_source(rng, depth - 1)})"
    if r < 0.70:
        return f"(-{gen_source(rng, depth - 1)})"
    if r < 0.85:
        return f"{rng.choice(_FUNCS)}({gen_source(rng, depth - 1)})"
    if r < 0.93:
        c = format(rng.uniform(0.5, 3.0), ".3f")
        return f"({gen_source(rng, depth - 1)} / {c})"
    return f"({gen_source(rng, depth - 1)})^{rng.choice((2, 3))}"


def sample_safe_expression(rng, depth=6, max_tries=500):
    """An (expression, point) pair where value and derivative are moderate,
    so the finite-difference oracle is well conditioned.
    """
    for _ in range(max_tries):
        src = gen_source(rng, depth)
        v = rng.uniform(-1.0, 1.0)
        try:
            e = expr.parse(src)
            f0 = expr.evaluate(e, v)
            fp = expr.evaluate(e, v + FD_STEP)
            fm = expr.evaluate(e, v - FD_STEP)
            d = expr.derivative(e, v)
        except expr.ExpressionError:
            continue
        vals = (f0, fp, fm, d)
        if not all(math.isfinite(x) for x in vals):
            continue
        if max(abs(f0), abs(fp), abs(fm)) > 30.0 or abs(d) > 100.0:
            continue
        return e, v
    raise RuntimeError("could not draw a safe random expression")


def central_difference(e, v, h=FD_STEP):
    return (expr.evaluate(e, v + h) - expr.evaluate(e, v - h)) / (2.0 * h)
