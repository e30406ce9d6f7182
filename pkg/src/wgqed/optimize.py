"""Deterministic 1D minimisation used for sub-grid polishing."""

import math

INV_PHI = (math.sqrt(5.0) - 1.0) / 2.0  # 1/phi
INV_PHI2 = (3.0 - math.sqrt(5.0)) / 2.0  # 1/phi^2


def golden_section(f, a, b, xtol):
    """Minimise a unimodal ``f`` on ``[a, b]``.

    Shrinks the bracket by 1/phi per step until it is narrower than ``xtol``
    and returns ``(x, f(x))`` for the better interior point. The number of
    function evaluations is fixed by ``(b - a) / xtol``, so the result is
    reproducible bit for bit.
    """
    if b < a:
        a, b = b, a
    h = b - a
    if h <= xtol:
        x = 0.5 * (a + b)
        return x, f(x)
    n = int(math.ceil(math.log(xtol / h) / math.log(INV_PHI)))
    c = a + INV_PHI2 * h
    d = a + INV_PHI * h
    yc = f(c)
    yd = f(d)
    for _ in range(n - 1):
        h *= INV_PHI
        if yc < yd:
            b, d, yd = d, c, yc
            c = a + INV_PHI2 * h
            yc = f(c)
        else:
            a, c, yc = c, d, yd
            d = a + INV_PHI * h
            yd = f(d)
    if yc < yd:
        return c, yc
    return d, yd


def parabolic_vertex(x0, x1, x2, y0, y1, y2):
    """Abscissa of the parabola through three points (x1 if degenerate)."""
    num = (x1 - x0) ** 2 * (y1 - y2) - (x1 - x2) ** 2 * (y1 - y0)
    den = (x1 - x0) * (y1 - y2) - (x1 - x2) * (y1 - y0)
    if den == 0:
        return x1
    return x1 - 0.5 * num / den
