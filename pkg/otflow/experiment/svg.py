"""
SVG Scatter Plots - one circle element per atom, built with lxml

Circles are reserved for atoms; legend swatches are squares.
"""

from dataclasses import dataclass
from pathlib import Path
from typing import List, Sequence, Tuple, Union

import numpy as np
from lxml import etree

SVG_NS = "http://www.w3.org/2000/svg"
NSMAP = {None: SVG_NS}


@dataclass
class ScatterLayer:
    """Point cloud drawn in one color"""
    points: np.ndarray
    color: str
    label: str
    radius: float = 2.0


def _bounds(layers: Sequence[ScatterLayer]) -> Tuple[float, float, float, float]:
    stacked = np.vstack([np.asarray(layer.points, dtype=float)[:, :2] for layer in layers])
    low, high = stacked.min(axis=0), stacked.max(axis=0)
    span = float(max(high[0] - low[0], high[1] - low[1], 1e-9))
    pad = 0.05 * span
    return float(low[0]) - pad, float(low[1]) - pad, span + 2 * pad, span + 2 * pad


def scatter_svg(layers: Sequence[ScatterLayer], title: str, size: int = 480) -> etree._Element:
    """
    Square scatter plot of several layers sharing one coordinate frame

    Each layer becomes a ``<g>`` group with one ``<circle>`` per point; the y axis
    points up.
    """
    margin = 30
    root = etree.Element(f"{{{SVG_NS}}}svg", nsmap=NSMAP)
    root.set("width", str(size + 2 * margin))
    root.set("height", str(size + 2 * margin + 20 * len(layers)))
    root.set("version", "1.1")

    heading = etree.SubElement(root, f"{{{SVG_NS}}}text", x=str(margin), y=str(margin - 10))
    heading.set("font-family", "sans-serif")
    heading.set("font-size", "14")
    heading.text = title

    x0, y0, width, height = _bounds(layers)
    scale = size / max(width, height)

    frame = etree.SubElement(root, f"{{{SVG_NS}}}rect", x=str(margin), y=str(margin),
                             width=str(size), height=str(size), fill="none", stroke="#999999")
    frame.set("stroke-width", "1")

    for index, layer in enumerate(layers):
        group = etree.SubElement(root, f"{{{SVG_NS}}}g", fill=layer.color)
        group.set("class", "layer")
        group.set("data-label", layer.label)
        for x, y in np.asarray(layer.points, dtype=float)[:, :2]:
            cx = margin + (x - x0) * scale
            cy = margin + size - (y - y0) * scale
            etree.SubElement(group, f"{{{SVG_NS}}}circle", cx=f"{cx:.3f}", cy=f"{cy:.3f}",
                             r=f"{layer.radius:g}")

        legend_y = size + 2 * margin + 20 * index
        etree.SubElement(root, f"{{{SVG_NS}}}rect", x=str(margin + 1), y=str(legend_y - 8),
                         width="8", height="8", fill=layer.color)
        legend = etree.SubElement(root, f"{{{SVG_NS}}}text", x=str(margin + 15), y=str(legend_y))
        legend.set("font-family", "sans-serif")
        legend.set("font-size", "12")
        legend.text = layer.label
    return root


def write_svg(path: Union[str, Path], layers: Sequence[ScatterLayer], title: str) -> Path:
    """Render and write a scatter plot; returns the written path"""
    path = Path(path)
    document = etree.ElementTree(scatter_svg(layers, title))
    document.write(str(path), encoding="utf-8", xml_declaration=True, pretty_print=True)
    return path


def count_markers(path: Union[str, Path]) -> List[int]:
    """Number of circles in each layer group of a written plot"""
    tree = etree.parse(str(path))
    groups = tree.getroot().findall(f"{{{SVG_NS}}}g")
    return [len(group.findall(f"{{{SVG_NS}}}circle")) for group in groups]
