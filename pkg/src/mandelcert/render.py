"""Three-valued rasterization of the bounded-orbit set with area brackets.

Every pixel gets the full certified decision, so an image here is a
theorem schedule, not an impression: Out pixels carry escape steps, In
pixels carry certificates, everything else is an honest Unknown. Pixel
(row 0, col 0) is the top-left lattice point re_min + i*im_max; rows
scan downward. In box mode each pixel is the closed square of
half-spacing radius around its lattice point (adjacent squares share
edges and the outer ring overhangs the viewport by half a pixel), and
the verdict must hold for the whole square, which makes the counts
genuine area bounds: certified-In area <= true area intersected with
the viewport <= not-certified-Out area.
"""

from __future__ import annotations

import json
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from fractions import Fraction

from . import certify
from .exact import ComplexBox, ComplexRational, format_rational

UNKNOWN, IN, OUT = 0, 1, 2

_TAG_CODE = {UNKNOWN: "u", IN: "i", OUT: "o"}

MAX_BAND = 254  # escape steps clip here; 255 is reserved for In
IN_BAND = 255
UNKNOWN_BAND = 0

DEFAULT_N = 256
DEFAULT_RENDER_BUDGET = 60

Cell = tuple[int, int | None]  # (tag, first_escape)


@dataclass(frozen=True)
class Viewport:
    re_min: Fraction
    re_max: Fraction
    im_min: Fraction
    im_max: Fraction
    n: int  # lattice points per axis

    def __post_init__(self) -> None:
        if self.n < 2:
            raise ValueError("need at least a 2x2 lattice")
        if self.re_min >= self.re_max or self.im_min >= self.im_max:
            raise ValueError("degenerate viewport")

    @classmethod
    def default(cls, n: int = DEFAULT_N) -> "Viewport":
        return cls(Fraction(-2), Fraction(2), Fraction(-2), Fraction(2), n)

    def pitch(self) -> tuple[Fraction, Fraction]:
        return (
            (self.re_max - self.re_min) / (self.n - 1),
            (self.im_max - self.im_min) / (self.n - 1),
        )

    def to_obj(self) -> dict:
        return {
            "re_min": format_rational(self.re_min),
            "re_max": format_rational(self.re_max),
            "im_min": format_rational(self.im_min),
            "im_max": format_rational(self.im_max),
            "n": self.n,
        }


def grid_point(v: Viewport, row: int, col: int) -> ComplexRational:
    """Exact lattice point: row 0 is im_max, col 0 is re_min."""
    dre, dim = v.pitch()
    return ComplexRational(v.re_min + col * dre, v.im_max - row * dim)


def grid_points(v: Viewport) -> list[list[ComplexRational]]:
    return [[grid_point(v, r, k) for k in range(v.n)] for r in range(v.n)]


def pixel_box(v: Viewport, row: int, col: int, p: int) -> ComplexBox:
    """Closed half-spacing square around the lattice point, rounded outward."""
    dre, dim = v.pitch()
    c = grid_point(v, row, col)
    return ComplexBox.from_rect(
        c.re - dre / 2, c.re + dre / 2, c.im - dim / 2, c.im + dim / 2, p
    )


@dataclass(frozen=True)
class PixelGrid:
    n: int
    cells: tuple[tuple[Cell, ...], ...]  # [row][col]
    provenance: dict

    def counts(self) -> dict[str, int]:
        flat = [cell for row in self.cells for cell in row]
        return {
            "in": sum(1 for tag, _ in flat if tag == IN),
            "out": sum(1 for tag, _ in flat if tag == OUT),
            "unknown": sum(1 for tag, _ in flat if tag == UNKNOWN),
        }


def _cell_of(verdict: certify.Verdict) -> Cell:
    if isinstance(verdict, certify.OutVerdict):
        return (OUT, verdict.n)
    if isinstance(verdict, certify.InVerdict):
        return (IN, None)
    return (UNKNOWN, None)


def _classify_row(args) -> tuple[int, tuple[Cell, ...]]:
    v, row, budget, p0, p_max, bit_cap, mode, use_region = args
    cells = []
    for col in range(v.n):
        if mode == "box":
            target: ComplexRational | ComplexBox = pixel_box(v, row, col, p_max)
        else:
            target = grid_point(v, row, col)
        verdict = certify.decide(
            target,
            budget=budget,
            p0=p0,
            p_max=p_max,
            bit_cap=bit_cap,
            use_region=use_region,
        )
        cells.append(_cell_of(verdict))
    return row, tuple(cells)


def classify_grid(
    v: Viewport,
    budget: int = DEFAULT_RENDER_BUDGET,
    p0: int = certify.DEFAULT_P0,
    p_max: int = certify.DEFAULT_P_MAX,
    bit_cap: int = certify.DEFAULT_BIT_CAP,
    mode: str = "point",
    jobs: int = 1,
    use_region: bool = True,
) -> PixelGrid:
    """Decide every pixel of the viewport.

    mode 'point' decides the exact lattice points, mode 'box' the whole
    pixel squares. Rows may be distributed over worker processes; the
    pixel decisions are pure functions of the arguments, so the result
    is identical for any jobs value.
    """
    if mode not in ("point", "box"):
        raise ValueError(f"mode must be 'point' or 'box', not {mode!r}")
    if jobs < 1:
        raise ValueError("jobs must be >= 1")
    arg_rows = [
        (v, row, budget, p0, p_max, bit_cap, mode, use_region) for row in range(v.n)
    ]
    if jobs == 1:
        results = [_classify_row(a) for a in arg_rows]
    else:
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            results = list(
                pool.map(_classify_row, arg_rows, chunksize=max(1, v.n // (8 * jobs)))
            )
    rows = [cells for _, cells in sorted(results)]
    provenance = {
        "viewport": v.to_obj(),
        "budget": budget,
        "p0": p0,
        "p_max": p_max,
        "bit_cap": bit_cap,
        "mode": mode,
    }
    return PixelGrid(n=v.n, cells=tuple(rows), provenance=provenance)


def escape_bands(grid: PixelGrid) -> list[list[int]]:
    """Byte image: Unknown -> 0, Out -> min(first_escape, 254), In -> 255."""
    image = []
    for row in grid.cells:
        image.append(
            [
                IN_BAND
                if tag == IN
                else (min(fe, MAX_BAND) if tag == OUT else UNKNOWN_BAND)
                for tag, fe in row
            ]
        )
    return image


def _check_image(image: list[list[int]]) -> tuple[int, int]:
    h = len(image)
    if h == 0:
        raise ValueError("empty image")
    w = len(image[0])
    if any(len(row) != w for row in image):
        raise ValueError("ragged image rows")
    return w, h


def emit_pgm(image: list[list[int]], path: str | None = None) -> bytes:
    """Binary graymap: header 'P5\\n<w> <h>\\n255\\n' then one raw byte
    per pixel, row-major from the top."""
    w, h = _check_image(image)
    data = f"P5\n{w} {h}\n255\n".encode("ascii") + b"".join(
        bytes(row) for row in image
    )
    if path is not None:
        with open(path, "wb") as fh:
            fh.write(data)
    return data


def default_palette() -> list[tuple[int, int, int]]:
    """256 RGB triples: 0 black (Unknown), 255 white (In), bands cycle
    through fixed pseudo-hues."""
    palette = [(0, 0, 0)]
    for k in range(1, 255):
        palette.append(
            (55 + (k * 53) % 200, 55 + (k * 97) % 200, 55 + (k * 193) % 200)
        )
    palette.append((255, 255, 255))
    return palette


def emit_ppm(
    image: list[list[int]],
    palette: list[tuple[int, int, int]] | None = None,
    path: str | None = None,
) -> bytes:
    """Binary pixmap: 'P6' header, then palette[band] RGB bytes per pixel."""
    w, h = _check_image(image)
    pal = default_palette() if palette is None else palette
    if len(pal) != 256:
        raise ValueError("palette must map all 256 bands")
    body = bytearray()
    for row in image:
        for band in row:
            body.extend(pal[band])
    data = f"P6\n{w} {h}\n255\n".encode("ascii") + bytes(body)
    if path is not None:
        with open(path, "wb") as fh:
            fh.write(data)
    return data


@dataclass(frozen=True)
class AreaBounds:
    """Exact rational bracket from pixel counts: lower from certified-In
    pixels, upper from everything not certified Out."""

    lower: Fraction
    upper: Fraction

    def __post_init__(self) -> None:
        if self.lower > self.upper:
            raise ValueError("inverted area bracket")


def area_estimate(grid: PixelGrid, v: Viewport) -> AreaBounds:
    pixel_area = (v.re_max - v.re_min) * (v.im_max - v.im_min) / (v.n * v.n)
    counts = grid.counts()
    return AreaBounds(
        lower=counts["in"] * pixel_area,
        upper=(counts["in"] + counts["unknown"]) * pixel_area,
    )


def grid_to_obj(grid: PixelGrid) -> dict:
    """JSON-ready grid: provenance, counts, and one compact string per
    cell ('u', 'i', or 'o<first_escape>'), row-major."""
    return {
        "n": grid.n,
        "provenance": grid.provenance,
        "counts": grid.counts(),
        "cells": [
            [
                _TAG_CODE[tag] + (str(fe) if tag == OUT else "")
                for tag, fe in row
            ]
            for row in grid.cells
        ],
    }


def grid_to_json(grid: PixelGrid) -> str:
    return json.dumps(grid_to_obj(grid), sort_keys=True, separators=(",", ":"))


def summary_csv(grid: PixelGrid, v: Viewport) -> str:
    """One-row CSV: verdict counts and the exact area bracket."""
    counts = grid.counts()
    area = area_estimate(grid, v)
    head = "in,out,unknown,area_lower,area_upper"
    row = (
        f"{counts['in']},{counts['out']},{counts['unknown']},"
        f"{format_rational(area.lower)},{format_rational(area.upper)}"
    )
    return head + "\n" + row + "\n"
