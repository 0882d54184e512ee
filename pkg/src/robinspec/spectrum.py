"""Eigenvalue lists with multiplicity and provenance, and their union merge."""

from __future__ import annotations

import math
from dataclasses import dataclass, field, replace

import numpy as np


class SolverError(RuntimeError):
    """A numerical routine failed to certify its result."""


class UndersuppliedComponent(SolverError):
    """A union component did not list enough eigenvalues to fix the first k of the union."""

    def __init__(self, index: int, needed: float, bound: float):
        self.index = index
        if math.isinf(needed):
            msg = (f"undersupplied component {index}: the components together list fewer than k "
                   f"eigenvalues (unlisted ones only known to be >= {bound:.6g})")
        else:
            msg = (f"undersupplied component {index}: its unlisted eigenvalues are only known "
                   f"to be >= {bound:.6g}, below the union's k-th value {needed:.6g}")
        super().__init__(msg)


@dataclass(frozen=True)
class BoundaryParams:
    """Boundary condition selector.

    ``kind`` is ``"robin"``, ``"dirichlet"`` or ``"neumann"``.  Neumann is
    normalised to Robin with alpha = 0.
    """

    kind: str = "robin"
    alpha: float = 0.0
    p: float = 2.0

    def __post_init__(self):
        kind = self.kind.lower()
        if kind not in ("robin", "dirichlet", "neumann"):
            raise ValueError(f"unknown boundary condition {self.kind!r}")
        if not (self.p > 1.0 and math.isfinite(self.p)):
            raise ValueError(f"exponent p must lie in (1, inf), got {self.p!r}")
        if kind == "neumann":
            kind, alpha = "robin", 0.0
        else:
            alpha = float(self.alpha)
        object.__setattr__(self, "kind", kind)
        object.__setattr__(self, "alpha", alpha)

    @property
    def is_dirichlet(self) -> bool:
        return self.kind == "dirichlet"


@dataclass(frozen=True)
class Entry:
    value: float
    multiplicity: int = 1
    component: int = 0
    mode: str = ""
    solver: str = ""
    err: float = 0.0


@dataclass(frozen=True)
class Spectrum:
    """Ascending eigenvalues with multiplicities.

    ``rest_bound`` is a lower bound for every eigenvalue *not* listed; when
    omitted it defaults to the largest listed value, which is correct whenever
    the list holds the first eigenvalues of the operator.
    """

    entries: tuple = ()
    rest_bound: float | None = None

    def __post_init__(self):
        entries = tuple(sorted(self.entries, key=lambda e: e.value))
        for e in entries:
            if e.multiplicity < 1:
                raise ValueError("multiplicities must be >= 1")
        object.__setattr__(self, "entries", entries)
        if self.rest_bound is None:
            object.__setattr__(self, "rest_bound", entries[-1].value if entries else -math.inf)

    def __len__(self) -> int:
        return sum(e.multiplicity for e in self.entries)

    def values(self) -> np.ndarray:
        """Eigenvalues repeated according to multiplicity."""
        return np.array([e.value for e in self.entries for _ in range(e.multiplicity)], dtype=float)

    def expanded(self) -> list:
        """One entry per eigenvalue, multiplicity 1 each."""
        return [replace(e, multiplicity=1) for e in self.entries for _ in range(e.multiplicity)]

    def errors(self) -> np.ndarray:
        return np.array([e.err for e in self.entries for _ in range(e.multiplicity)], dtype=float)

    def __getitem__(self, n: int) -> float:
        """``spec[n]`` is the n-th eigenvalue, 1-based, counted with multiplicity."""
        return float(self.values()[n - 1])

    def entry_at(self, n: int) -> Entry:
        return self.expanded()[n - 1]

    def first(self, k: int) -> "Spectrum":
        """The first ``k`` eigenvalues (multiplicity of the last entry clipped)."""
        if k > len(self):
            raise UndersuppliedComponent(0, math.inf, self.rest_bound)
        out, left = [], k
        for e in self.entries:
            if left <= 0:
                break
            take = min(left, e.multiplicity)
            out.append(replace(e, multiplicity=take))
            left -= take
        return Spectrum(tuple(out), rest_bound=out[-1].value)

    def grouped(self, rtol: float = 1e-10) -> list:
        """``[(value, multiplicity), ...]`` with coincident values combined,
        whatever component they came from."""
        out = []
        for e in self.entries:
            if out and abs(e.value - out[-1][0]) <= rtol * max(1.0, abs(out[-1][0])):
                out[-1] = (out[-1][0], out[-1][1] + e.multiplicity)
            else:
                out.append((e.value, e.multiplicity))
        return out

    def relabel(self, component: int) -> "Spectrum":
        return Spectrum(
            tuple(replace(e, component=component) for e in self.entries), self.rest_bound
        )


def group_values(values, solver: str, component: int = 0, modes=None, err=None, rtol=1e-10) -> Spectrum:
    """Build a Spectrum from raw values, merging coincidences within ``rtol``.

    ``modes`` labels the raw values; merged entries join their labels with '|'.
    """
    order = np.argsort(values, kind="stable")
    vals = np.asarray(values, dtype=float)[order]
    labels = [modes[i] if modes is not None else "" for i in order]
    errs = [float(err[i]) if err is not None else 0.0 for i in order]
    entries = []
    i = 0
    while i < len(vals):
        j = i + 1
        while j < len(vals) and abs(vals[j] - vals[i]) <= rtol * max(1.0, abs(vals[i])):
            j += 1
        entries.append(
            Entry(
                value=float(vals[i]),
                multiplicity=j - i,
                component=component,
                mode="|".join(dict.fromkeys(labels[i:j])),
                solver=solver,
                err=max(errs[i:j]),
            )
        )
        i = j
    return Spectrum(tuple(entries))


def merge_spectra(parts, k: int) -> Spectrum:
    """First ``k`` eigenvalues of a disjoint union from the spectra of its pieces.

    Each part's entries are tagged with its position in ``parts``.  A part
    that lists fewer than ``k`` values is trusted only up to its
    ``rest_bound``; if the union's k-th value exceeds that bound the result
    cannot be certified and :class:`UndersuppliedComponent` is raised.
    """
    if k < 1:
        raise ValueError("k must be >= 1")
    pool = []
    for idx, part in enumerate(parts):
        for e in part.entries:
            pool.append(replace(e, component=idx))
    total = sum(e.multiplicity for e in pool)
    pool.sort(key=lambda e: (e.value, e.component))
    if total < k:
        short = min(range(len(parts)), key=lambda i: parts[i].rest_bound)
        raise UndersuppliedComponent(short, math.inf, parts[short].rest_bound)
    picked, left = [], k
    for e in pool:
        if left <= 0:
            break
        take = min(left, e.multiplicity)
        picked.append(replace(e, multiplicity=take))
        left -= take
    kth = picked[-1].value
    for idx, part in enumerate(parts):
        if len(part) < k and kth > part.rest_bound * (1 + 1e-12) + 1e-300:
            raise UndersuppliedComponent(idx, kth, part.rest_bound)
    # same value from different components: keep separate entries for provenance
    return Spectrum(tuple(picked), rest_bound=kth)
