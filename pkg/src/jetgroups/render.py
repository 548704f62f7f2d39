"""Canonical text forms.  Output of these functions parses back to the same value."""
from __future__ import annotations

from .coeff import CycRational

ALIASES = ("x", "y", "z", "w")


def var_names(n: int) -> list[str]:
    if n <= len(ALIASES):
        return list(ALIASES[:n])
    return [f"x{j + 1}" for j in range(n)]


def render_scalar(c: CycRational) -> str:
    return str(c)


def _monomial_text(exp, names) -> str:
    parts = []
    for e, name in zip(exp, names):
        if e == 1:
            parts.append(name)
        elif e > 1:
            parts.append(f"{name}^{e}")
    return "*".join(parts)


def _signed_coeff(c: CycRational):
    """(sign, text) where text is empty for a unit coefficient ±1."""
    if c.is_rational():
        q = c.to_fraction()
        sign = -1 if q < 0 else 1
        q = abs(q)
        return sign, "" if q == 1 else str(q)
    # multi-term coefficients are parenthesized; pull out a leading minus
    coords = [x for x in c.coords if x != 0]
    if len(coords) == 1 and coords[0] < 0:
        return -1, str(-c)
    return 1, f"({c})"


def render_series(f, names=None) -> str:
    """Terms in graded-lex order, e.g. ``x^2 + 2*x*y``; the zero series is ``0``."""
    names = names or var_names(f.n)
    out = []
    for exp, c in f.sorted_terms():
        sign, ctext = _signed_coeff(c)
        mono = _monomial_text(exp, names)
        if mono and ctext:
            body = f"{ctext}*{mono}"
        else:
            body = mono or ctext or "1"
        if not out:
            out.append(body if sign > 0 else f"-{body}")
        else:
            out.append(("+ " if sign > 0 else "- ") + body)
    return " ".join(out) if out else "0"


def render_diffeo(phi) -> str:
    names = var_names(phi.n)
    return "(" + ", ".join(render_series(g, names) for g in phi.components) + ")"


def render_field(X) -> str:
    names = var_names(X.n)
    parts = []
    for name, comp in zip(names, X.components):
        if comp.is_zero():
            continue
        parts.append(f"({render_series(comp, names)})*d/d{name}")
    return " + ".join(parts) if parts else "0"


def render_matrix(M) -> str:
    return "[" + ", ".join("[" + ", ".join(str(c) for c in row) + "]" for row in M) + "]"


def render(value) -> str:
    """Dispatch on the domain type."""
    from .diffeo import JetDiffeo
    from .series import TruncSeries
    from .vfield import JetVectorField

    if isinstance(value, CycRational):
        return render_scalar(value)
    if isinstance(value, TruncSeries):
        return render_series(value)
    if isinstance(value, JetDiffeo):
        return render_diffeo(value)
    if isinstance(value, JetVectorField):
        return render_field(value)
    if isinstance(value, (list, tuple)) and value and isinstance(value[0], (list, tuple)):
        return render_matrix(value)
    raise TypeError(f"no canonical text form for {type(value).__name__}")
