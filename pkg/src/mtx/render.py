"""Deterministic SVG rendering of scenes and path frames.

Each frame applies a map to a reference picture (grid lines, cell outlines,
ring circles) and emits the image as polylines with fixed numeric
formatting, so identical inputs give identical bytes.
"""

from __future__ import annotations

import math

import numpy as np

from .paths import Map2


def _fmt(x: float) -> str:
    return f"{x:.6f}"


def _polyline(path_pts: np.ndarray, color: str, width: float, closed: bool = False) -> str:
    cmds = [f"M {_fmt(path_pts[0].real)} {_fmt(path_pts[0].imag)}"]
    cmds += [f"L {_fmt(p.real)} {_fmt(p.imag)}" for p in path_pts[1:]]
    if closed:
        cmds.append("Z")
    return (
        f'<path d="{" ".join(cmds)}" fill="none" stroke="{color}" '
        f'stroke-width="{_fmt(width)}"/>'
    )


def reference_picture(scene, grid_lines: int = 13, samples: int = 160) -> list:
    """Reference polylines: (points, color, closed) triples in scene coordinates."""
    base = scene.base
    pad = 0.15 * max(base.width, base.height)
    xs = np.linspace(base.xmin - pad, base.xmax + pad, grid_lines)
    ys = np.linspace(base.ymin - pad, base.ymax + pad, grid_lines)
    tx = np.linspace(base.xmin - pad, base.xmax + pad, samples)
    ty = np.linspace(base.ymin - pad, base.ymax + pad, samples)
    lines = []
    for x in xs:
        lines.append((x + 1j * ty, "#c8c8c8", False))
    for y in ys:
        lines.append((tx + 1j * y, "#c8c8c8", False))
    for w in scene.tree.words():
        cell = scene.tree.cell(w)
        corners = np.concatenate([cell.corners(), cell.corners()[:1]])
        dense = _densify(corners, samples // 4)
        lines.append((dense, "#2a6f2a", True))
    if scene.rings is not None:
        th = np.linspace(0.0, 2.0 * math.pi, samples, endpoint=True)
        for w in scene.rings.words:
            ring = scene.rings.ring(w)
            for radius in (ring.r_in, ring.r_out):
                lines.append((ring.center + radius * np.exp(1j * th), "#b03030", True))
    return lines


def _densify(pts: np.ndarray, per_edge: int) -> np.ndarray:
    out = []
    for a, b in zip(pts[:-1], pts[1:]):
        seg = a + (b - a) * np.linspace(0.0, 1.0, per_edge, endpoint=False)
        out.append(seg)
    out.append(pts[-1:])
    return np.concatenate(out)


def render_frame(scene, m: Map2, view_pad: float = 0.2) -> str:
    lines = reference_picture(scene)
    base = scene.base
    r = scene.rings.root.r_out if scene.rings is not None else base.circumradius
    c = base.center
    lo_x, hi_x = c.real - r * (1 + view_pad), c.real + r * (1 + view_pad)
    lo_y, hi_y = c.imag - r * (1 + view_pad), c.imag + r * (1 + view_pad)
    parts = [
        f'<svg xmlns="http://www.w3.org/2000/svg" viewBox="{_fmt(lo_x)} {_fmt(lo_y)} '
        f'{_fmt(hi_x - lo_x)} {_fmt(hi_y - lo_y)}">',
        f'<g transform="translate(0,{_fmt(lo_y + hi_y)}) scale(1,-1)">',
    ]
    for pts, color, closed in lines:
        image = m.forward(np.asarray(pts, dtype=np.complex128))
        parts.append(_polyline(image, color, 0.008 * r, closed))
    parts.append("</g></svg>")
    return "\n".join(parts) + "\n"


def render_frames(scene, path, frames: int, outdir) -> list:
    """Write frames 0000.svg .. NNNN.svg of the path applied to the reference picture."""
    import os

    os.makedirs(outdir, exist_ok=True)
    names = []
    ts = [0.0] if frames == 1 else np.linspace(0.0, 1.0, frames)
    for k, t in enumerate(ts):
        svg = render_frame(scene, path.at(float(t)))
        name = os.path.join(outdir, f"{k:04d}.svg")
        with open(name, "w") as fh:
            fh.write(svg)
        names.append(name)
    return names
