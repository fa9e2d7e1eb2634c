"""Toric grid model: the product group Z/n1 x ... x Z/nd, its characters, and its metrics.

Sites and characters are plain integer tuples.  Every table over the grid
(kernel tables, eigenvalue tables) is indexed by the row-major mixed-radix
site index fixed by `site_index` (last coordinate fastest); all modules
share this convention, which also matches numpy's C-order `reshape`.
"""

from __future__ import annotations

import itertools
import math
import sys
from dataclasses import dataclass
from enum import Enum
from typing import Iterator, Sequence

import numpy as np

Site = tuple[int, ...]
Character = tuple[int, ...]

__all__ = [
    "Site",
    "Character",
    "Metric",
    "GridDims",
    "wrap_abs",
    "distance",
    "distance_table",
    "site_index",
    "index_to_site",
    "enumerate_sites",
    "coords_array",
    "normalize_site",
    "add_sites",
    "sub_sites",
    "negate_site",
    "trivial_character",
    "minus_one_character",
    "conjugate_character",
    "is_self_conjugate",
    "character_value",
    "checkerboard_sites",
]


class Metric(Enum):
    """Translation-invariant distances between grid sites."""

    LEE = "lee"
    EUCLIDEAN_SQUARED = "euclid-sq"
    EUCLIDEAN = "euclid"
    CHEBYSHEV = "chebyshev"


@dataclass(frozen=True)
class GridDims:
    """Sizes n1..nd of the grid; the site space is the direct product of the Z/ni."""

    sizes: tuple[int, ...]

    def __post_init__(self) -> None:
        sizes = tuple(int(n) for n in self.sizes)
        if len(sizes) == 0:
            raise ValueError("grid needs at least one dimension")
        if any(n < 1 for n in sizes):
            raise ValueError(f"grid sizes must be positive, got {sizes}")
        order = 1
        for n in sizes:
            order *= n
            if order > sys.maxsize:
                raise ValueError(f"grid with sizes {sizes} is too large to index")
        object.__setattr__(self, "sizes", sizes)
        object.__setattr__(self, "_order", order)

    @classmethod
    def of(cls, *sizes: int) -> GridDims:
        return cls(tuple(sizes))

    @property
    def order(self) -> int:
        """Number of sites."""
        return self._order  # type: ignore[attr-defined]

    @property
    def ndim(self) -> int:
        return len(self.sizes)

    def all_even(self) -> bool:
        return all(n % 2 == 0 for n in self.sizes)

    def __str__(self) -> str:
        return "x".join(str(n) for n in self.sizes)


def wrap_abs(a: int, n: int) -> int:
    """Smallest non-negative representative of +-a modulo n; always <= n // 2."""
    if n < 1:
        raise ValueError(f"modulus must be positive, got {n}")
    r = a % n
    return min(r, n - r)


def _check_site(dims: GridDims, s: Sequence[int], name: str) -> None:
    if len(s) != dims.ndim:
        raise ValueError(
            f"{name} has {len(s)} coordinates but the grid has {dims.ndim} dimensions"
        )


def normalize_site(dims: GridDims, coords: Sequence[int]) -> Site:
    """Reduce every coordinate modulo its grid size."""
    _check_site(dims, coords, "site")
    return tuple(c % n for c, n in zip(coords, dims.sizes))


def distance(metric: Metric, g: Sequence[int], h: Sequence[int], dims: GridDims) -> float:
    """Distance between two sites under the wrap-around metric of the given kind."""
    _check_site(dims, g, "site g")
    _check_site(dims, h, "site h")
    wraps = [wrap_abs(hi - gi, n) for gi, hi, n in zip(g, h, dims.sizes)]
    if metric is Metric.LEE:
        return sum(wraps)
    if metric is Metric.EUCLIDEAN_SQUARED:
        return sum(w * w for w in wraps)
    if metric is Metric.EUCLIDEAN:
        return math.sqrt(sum(w * w for w in wraps))
    if metric is Metric.CHEBYSHEV:
        return max(wraps)
    raise ValueError(f"unknown metric {metric!r}")


def _axis_wraps(n: int) -> np.ndarray:
    r = np.arange(n)
    return np.minimum(r, n - r)


def distance_table(dims: GridDims, metric: Metric) -> np.ndarray:
    """Array of shape `dims.sizes` holding the distance of every site to the origin."""
    axes = np.ix_(*[_axis_wraps(n) for n in dims.sizes])
    if metric is Metric.LEE:
        out = sum(axes)
    elif metric is Metric.EUCLIDEAN_SQUARED:
        out = sum(a * a for a in axes)
    elif metric is Metric.EUCLIDEAN:
        out = np.sqrt(sum(a * a for a in axes))
    elif metric is Metric.CHEBYSHEV:
        out = axes[0]
        for a in axes[1:]:
            out = np.maximum(out, a)
    else:
        raise ValueError(f"unknown metric {metric!r}")
    return np.broadcast_to(out, dims.sizes).copy()


def site_index(dims: GridDims, site: Sequence[int]) -> int:
    """Row-major mixed-radix index of a site (last coordinate fastest)."""
    _check_site(dims, site, "site")
    idx = 0
    for c, n in zip(site, dims.sizes):
        idx = idx * n + (c % n)
    return idx


def index_to_site(dims: GridDims, index: int) -> Site:
    """Inverse of `site_index`."""
    if not 0 <= index < dims.order:
        raise ValueError(f"site index {index} out of range for |G| = {dims.order}")
    coords = []
    for n in reversed(dims.sizes):
        index, c = divmod(index, n)
        coords.append(c)
    return tuple(reversed(coords))


def enumerate_sites(dims: GridDims) -> Iterator[Site]:
    """All sites in row-major order; position of a site equals its `site_index`."""
    return itertools.product(*(range(n) for n in dims.sizes))


def coords_array(dims: GridDims) -> np.ndarray:
    """Integer array of shape (|G|, d) whose row i is the site with index i."""
    return np.stack(
        np.unravel_index(np.arange(dims.order), dims.sizes), axis=1
    ).astype(np.int64)


def add_sites(dims: GridDims, g: Sequence[int], h: Sequence[int]) -> Site:
    _check_site(dims, g, "site g")
    _check_site(dims, h, "site h")
    return tuple((a + b) % n for a, b, n in zip(g, h, dims.sizes))


def sub_sites(dims: GridDims, g: Sequence[int], h: Sequence[int]) -> Site:
    _check_site(dims, g, "site g")
    _check_site(dims, h, "site h")
    return tuple((a - b) % n for a, b, n in zip(g, h, dims.sizes))


def negate_site(dims: GridDims, g: Sequence[int]) -> Site:
    _check_site(dims, g, "site")
    return tuple((-a) % n for a, n in zip(g, dims.sizes))


def trivial_character(dims: GridDims) -> Character:
    """The character sending every site to 1."""
    return (0,) * dims.ndim


def minus_one_character(dims: GridDims) -> Character:
    """The real character (-1, ..., -1); exists exactly when all sizes are even."""
    if not dims.all_even():
        raise ValueError(f"(-1, ..., -1) requires all even sizes, got {dims.sizes}")
    return tuple(n // 2 for n in dims.sizes)


def conjugate_character(dims: GridDims, chi: Sequence[int]) -> Character:
    _check_site(dims, chi, "character")
    return tuple((n - j) % n for j, n in zip(chi, dims.sizes))


def is_self_conjugate(dims: GridDims, chi: Sequence[int]) -> bool:
    return conjugate_character(dims, chi) == tuple(j % n for j, n in zip(chi, dims.sizes))


def character_value(dims: GridDims, chi: Sequence[int], g: Sequence[int]) -> complex:
    """Value of the character at a site: the product of per-axis roots of unity."""
    _check_site(dims, chi, "character")
    _check_site(dims, g, "site")
    phase = sum((j * c % n) / n for j, c, n in zip(chi, g, dims.sizes))
    return complex(math.cos(2.0 * math.pi * phase), math.sin(2.0 * math.pi * phase))


def checkerboard_sites(dims: GridDims, parity: str = "even") -> list[Site]:
    """Sites whose coordinate sum has the given parity; needs all sizes even.

    The even and odd checkerboards partition the grid into two halves that
    are translates of each other by any single-step shift.
    """
    if parity not in ("even", "odd"):
        raise ValueError(f"parity must be 'even' or 'odd', got {parity!r}")
    if not dims.all_even():
        odd = [n for n in dims.sizes if n % 2]
        raise ValueError(f"checkerboard undefined: odd size(s) {odd} in {dims.sizes}")
    want = 0 if parity == "even" else 1
    return [s for s in enumerate_sites(dims) if sum(s) % 2 == want]
