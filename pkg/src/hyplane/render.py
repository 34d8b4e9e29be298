"""SVG drawings of tilings in the disk or the upper half-plane.

Coordinates are model coordinates with the y axis flipped, so the SVG is
resolution independent; ``width`` only sets the pixel size.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .geom import DISK, HALFPLANE, angle_to_real
from .tiling import Tiling

LINE_TOL = 1e-12


@dataclass(frozen=True)
class SvgEdge:
    """One geodesic as drawn: a circular arc, or a straight segment when ``radius`` is None."""

    start: complex
    end: complex
    center: complex | None = None
    radius: float | None = None
    sweep: int = 0


def disk_edge(a: complex, b: complex) -> SvgEdge:
    """Geodesic between boundary points a, b of the unit disk."""
    den = 1 + (a * np.conj(b)).real
    if abs(den) < LINE_TOL:
        return SvgEdge(a, b)
    c = (a + b) / den
    r = math.sqrt(max(abs(c) ** 2 - 1, 0.0))
    cw = ((np.conj(a - c) * (b - c)).imag) < 0
    return SvgEdge(a, b, complex(c), r, int(cw))  # after the y flip, clockwise is sweep=1


def halfplane_edge(p: float, q: float, top: float) -> SvgEdge:
    """Geodesic between extended reals p, q; infinite ends run up to height ``top``."""
    if math.isinf(p) or math.isinf(q):
        x = q if math.isinf(p) else p
        s, e = (complex(x, top), complex(x, 0)) if math.isinf(p) else (complex(x, 0), complex(x, top))
        return SvgEdge(s, e)
    c = (p + q) / 2
    return SvgEdge(complex(p, 0), complex(q, 0), complex(c, 0), abs(q - p) / 2, int(p < q))


def _pt(z: complex) -> str:
    return f"{z.real:.9g} {-z.imag:.9g}"


def edge_path(e: SvgEdge) -> str:
    if e.radius is None:
        return f"M {_pt(e.start)} L {_pt(e.end)}"
    return f"M {_pt(e.start)} A {e.radius:.9g} {e.radius:.9g} 0 0 {e.sweep} {_pt(e.end)}"


def tiling_edges(t: Tiling, model: str = DISK, span: float = 4.0) -> list[SvgEdge]:
    ang = np.asarray(t.angles)
    nxt = np.roll(ang, -1, axis=1)
    edges = []
    if model == DISK:
        for a, b in zip(ang.ravel(), nxt.ravel()):
            edges.append(disk_edge(complex(np.exp(1j * a)), complex(np.exp(1j * b))))
    elif model == HALFPLANE:
        for a, b in zip(angle_to_real(ang).ravel(), angle_to_real(nxt).ravel()):
            edges.append(halfplane_edge(float(a), float(b), span))
    else:
        raise ValueError(f"model must be {DISK!r} or {HALFPLANE!r}")
    return edges


def render_svg(t: Tiling, width: int = 800, model: str = DISK, span: float = 4.0,
               stroke: float | None = None) -> str:
    """SVG 1.1 document drawing every polygon edge of ``t``."""
    if width <= 0:
        raise ValueError("width must be positive")
    if model == DISK:
        m = 1.02
        box, height = (-m, -m, 2 * m, 2 * m), width
        frame = '<circle cx="0" cy="0" r="1" fill="none" stroke="black" stroke-width="{sw}"/>'
    else:
        box, height = (-span, -span, 2 * span, span * 1.02), width // 2
        frame = f'<line x1="{-span}" y1="0" x2="{span}" y2="0" stroke="black" stroke-width="{{sw}}"/>'
    sw = stroke if stroke is not None else 1.0 * box[2] / width
    paths = [edge_path(e) for e in tiling_edges(t, model, span)]
    body = "\n".join(f'<path d="{d}"/>' for d in paths)
    return (
        '<?xml version="1.0" encoding="UTF-8"?>\n'
        '<svg xmlns="http://www.w3.org/2000/svg" version="1.1" '
        f'width="{width}" height="{height}" '
        f'viewBox="{box[0]:.6g} {box[1]:.6g} {box[2]:.6g} {box[3]:.6g}">\n'
        f'{frame.format(sw=sw)}\n'
        f'<g fill="none" stroke="black" stroke-width="{sw:.6g}" stroke-linecap="round">\n'
        f'{body}\n</g>\n</svg>\n'
    )
