"""Shape descriptions, volume and homothety arithmetic, and the domain DSL.

Every shape is an immutable dataclass.  A :class:`Union` holds a flat, non-empty
tuple of non-union components which are taken to be pairwise disjoint; their
relative placement never enters a computed quantity.
"""

from __future__ import annotations

import math
import re
from dataclasses import dataclass, field
from pathlib import Path
from typing import Union as _U


class DomainError(ValueError):
    """Invalid shape parameters or unparsable domain string."""


def _positive(name: str, value: float) -> float:
    value = float(value)
    if not (value > 0.0 and math.isfinite(value)):
        raise DomainError(f"{name} must be a finite positive number, got {value!r}")
    return value


def ball_volume(N: int, R: float) -> float:
    """Volume of the N-ball of radius R."""
    return math.pi ** (N / 2.0) / math.gamma(N / 2.0 + 1.0) * R**N


def ball_radius(N: int, volume: float) -> float:
    """Radius of the N-ball with the given volume."""
    return (volume / ball_volume(N, 1.0)) ** (1.0 / N)


@dataclass(frozen=True)
class Interval:
    L: float

    def __post_init__(self):
        object.__setattr__(self, "L", _positive("L", self.L))

    dim = 1


@dataclass(frozen=True)
class Rectangle:
    a: float
    b: float

    def __post_init__(self):
        object.__setattr__(self, "a", _positive("a", self.a))
        object.__setattr__(self, "b", _positive("b", self.b))

    dim = 2


@dataclass(frozen=True)
class Disk:
    R: float

    def __post_init__(self):
        object.__setattr__(self, "R", _positive("R", self.R))

    dim = 2


@dataclass(frozen=True)
class Ball:
    N: int
    R: float

    def __post_init__(self):
        if int(self.N) != self.N or self.N < 1:
            raise DomainError(f"ball dimension must be an integer >= 1, got {self.N!r}")
        object.__setattr__(self, "N", int(self.N))
        object.__setattr__(self, "R", _positive("R", self.R))

    @property
    def dim(self) -> int:
        return self.N


@dataclass(frozen=True)
class MeshDomain:
    """A triangulated planar domain.

    ``mesh`` is a :class:`robinspec.fem.Mesh`; ``source`` is the file it came
    from, if any, and is only used for display.
    """

    mesh: object = field(compare=False, repr=False)
    source: str = ""

    dim = 2


Component = _U[Interval, Rectangle, Disk, Ball, MeshDomain]


@dataclass(frozen=True)
class Union:
    parts: tuple

    def __post_init__(self):
        flat = []
        for part in self.parts:
            if isinstance(part, Union):
                flat.extend(part.parts)
            else:
                flat.append(part)
        if not flat:
            raise DomainError("a union needs at least one component")
        dims = {part.dim for part in flat}
        if len(dims) != 1:
            raise DomainError(f"union components live in different dimensions: {sorted(dims)}")
        object.__setattr__(self, "parts", tuple(flat))

    @property
    def dim(self) -> int:
        return self.parts[0].dim


DomainSpec = _U[Interval, Rectangle, Disk, Ball, MeshDomain, Union]


def components(d: DomainSpec) -> tuple:
    """Connected pieces of ``d`` as a tuple (a single shape is its own piece)."""
    return d.parts if isinstance(d, Union) else (d,)


def volume(d: DomainSpec) -> float:
    """N-dimensional volume of ``d``; additive over unions."""
    if isinstance(d, Union):
        return math.fsum(volume(part) for part in d.parts)
    if isinstance(d, Interval):
        return d.L
    if isinstance(d, Rectangle):
        return d.a * d.b
    if isinstance(d, Disk):
        return math.pi * d.R**2
    if isinstance(d, Ball):
        return ball_volume(d.N, d.R)
    if isinstance(d, MeshDomain):
        return d.mesh.area()
    raise DomainError(f"unsupported domain {d!r}")


def make_ball(N: int, volume: float) -> DomainSpec:
    """Ball of the given volume, as an Interval/Disk in dimensions 1 and 2."""
    R = ball_radius(N, _positive("volume", volume))
    if N == 1:
        return Interval(2.0 * R)
    if N == 2:
        return Disk(R)
    return Ball(N, R)


def make_dk(M: float, k: int, N: int) -> Union:
    """Disjoint union of ``k`` equal balls in dimension ``N`` with total volume ``M``."""
    if int(k) != k or k < 1:
        raise DomainError(f"k must be a positive integer, got {k!r}")
    ball = make_ball(N, _positive("M", M) / k)
    return Union((ball,) * int(k))


def scale_domain(d: DomainSpec, t: float) -> DomainSpec:
    """Image of ``d`` under x -> t x."""
    t = _positive("t", t)
    if isinstance(d, Union):
        return Union(tuple(scale_domain(part, t) for part in d.parts))
    if isinstance(d, Interval):
        return Interval(d.L * t)
    if isinstance(d, Rectangle):
        return Rectangle(d.a * t, d.b * t)
    if isinstance(d, Disk):
        return Disk(d.R * t)
    if isinstance(d, Ball):
        return Ball(d.N, d.R * t)
    if isinstance(d, MeshDomain):
        return MeshDomain(d.mesh.scaled(t), d.source)
    raise DomainError(f"unsupported domain {d!r}")


def _canonical_piece(d) -> tuple:
    if isinstance(d, Interval):
        return ("ball", 1, d.L / 2.0)
    if isinstance(d, Disk):
        return ("ball", 2, d.R)
    if isinstance(d, Ball):
        return ("ball", d.N, d.R)
    if isinstance(d, Rectangle):
        return ("rect", 2, min(d.a, d.b), max(d.a, d.b))
    return ("mesh", 2, id(d.mesh))


def canonical_form(d: DomainSpec, digits: int = 12) -> tuple:
    """Sorted shape-parameter list identifying ``d`` up to rigid motions.

    Parameters are rounded to ``digits`` significant digits so that, e.g., a
    disk built from an area and one built from a radius compare equal.
    """

    def rnd(x):
        if isinstance(x, float):
            return float(f"{x:.{digits}g}")
        return x

    pieces = [tuple(rnd(v) for v in _canonical_piece(p)) for p in components(d)]
    return tuple(sorted(pieces, key=repr))


def same_domain(u: DomainSpec, v: DomainSpec) -> bool:
    """True when ``u`` and ``v`` have the same pieces up to rigid motions."""
    return canonical_form(u) == canonical_form(v)


def is_ball_union(d: DomainSpec) -> bool:
    return all(isinstance(p, (Interval, Disk, Ball)) for p in components(d))


def describe(d: DomainSpec) -> str:
    """Compact DSL-style rendering of ``d``."""
    if isinstance(d, Union):
        if len(d.parts) == 1:
            return describe(d.parts[0])
        return "union:[" + ";".join(describe(p) for p in d.parts) + "]"
    if isinstance(d, Interval):
        return f"interval:L={d.L:.12g}"
    if isinstance(d, Rectangle):
        return f"rect:a={d.a:.12g},b={d.b:.12g}"
    if isinstance(d, Disk):
        return f"disk:R={d.R:.12g}"
    if isinstance(d, Ball):
        return f"ball:N={d.N},R={d.R:.12g}"
    return f"mesh:{d.source}"


# ---------------------------------------------------------------------------
# DSL
# ---------------------------------------------------------------------------

_KV = re.compile(r"^\s*([A-Za-z]+)\s*=\s*([^=,]+?)\s*$")


def _keyvals(body: str, expected: dict) -> dict:
    out = {}
    for chunk in body.split(","):
        if not chunk.strip():
            continue
        m = _KV.match(chunk)
        if not m:
            raise DomainError(f"cannot parse parameter {chunk!r}")
        key, raw = m.group(1), m.group(2)
        if key not in expected:
            raise DomainError(f"unexpected parameter {key!r}; expected {sorted(expected)}")
        try:
            out[key] = expected[key](raw)
        except ValueError as exc:
            raise DomainError(f"bad value for {key}: {raw!r}") from exc
    missing = set(expected) - set(out)
    if missing:
        raise DomainError(f"missing parameter(s) {sorted(missing)}")
    return out


def _split_top(body: str) -> list:
    """Split on ';' outside brackets."""
    parts, depth, cur = [], 0, []
    for ch in body:
        if ch == "[":
            depth += 1
        elif ch == "]":
            depth -= 1
            if depth < 0:
                raise DomainError("unbalanced ']' in union")
        if ch == ";" and depth == 0:
            parts.append("".join(cur))
            cur = []
        else:
            cur.append(ch)
    if depth != 0:
        raise DomainError("unbalanced '[' in union")
    parts.append("".join(cur))
    return [p.strip() for p in parts if p.strip()]


def parse_domain(text: str) -> DomainSpec:
    """Parse a domain string such as ``disk:R=1`` or ``union:[disk:R=1;rect:a=1,b=2]``."""
    text = text.strip()
    kind, sep, body = text.partition(":")
    if not sep:
        raise DomainError(f"domain string needs a 'kind:' prefix, got {text!r}")
    kind = kind.strip().lower()
    if kind == "interval":
        return Interval(**_keyvals(body, {"L": float}))
    if kind in ("rect", "rectangle"):
        return Rectangle(**_keyvals(body, {"a": float, "b": float}))
    if kind == "disk":
        return Disk(**_keyvals(body, {"R": float}))
    if kind == "ball":
        return Ball(**_keyvals(body, {"N": int, "R": float}))
    if kind == "dk":
        return make_dk(**_keyvals(body, {"M": float, "k": int, "N": int}))
    if kind == "mesh":
        from .fem import load_mesh

        path = body.strip()
        try:
            return MeshDomain(load_mesh(Path(path)), path)
        except (OSError, KeyError, TypeError, ValueError) as exc:
            raise DomainError(f"cannot read mesh {path!r}: {exc}") from exc
    if kind == "union":
        body = body.strip()
        if not (body.startswith("[") and body.endswith("]")):
            raise DomainError("union body must be enclosed in [...]")
        return Union(tuple(parse_domain(p) for p in _split_top(body[1:-1])))
    raise DomainError(f"unknown domain kind {kind!r}")
