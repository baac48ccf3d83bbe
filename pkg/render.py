import logging
import os

import svgwrite

from config import ensure_dir
from models import layout, leftover_layout

logger = logging.getLogger(__name__)

ITEM_FILL = "#5a5a5a"
LEFTOVER_FILL = "#dedede"
FRAME_STROKE = "#000000"
TARGET_SIZE = 600.0


def _scale(width, height):
    return TARGET_SIZE / max(width, height)


def render_pattern(pattern, index=0):
    """SVG document for one cutting pattern, drawn to scale"""
    spec = pattern.bin
    scale = _scale(spec.width, spec.height)
    size = (round(spec.width * scale, 3), round(spec.height * scale, 3))
    drawing = svgwrite.Drawing(size=size, profile="full", debug=False)
    drawing.viewbox(0, 0, *size)

    leftovers = drawing.g(id="leftovers")
    for region in leftover_layout(pattern):
        leftovers.add(drawing.rect(
            insert=(round(region.x * scale, 3), round(region.y * scale, 3)),
            size=(round(region.width * scale, 3), round(region.height * scale, 3)),
            fill=LEFTOVER_FILL, stroke="none"))
    drawing.add(leftovers)

    items = drawing.g(id="items")
    labels = drawing.g(id="labels", fill="#ffffff", font_size=max(8, round(12 * scale ** 0.25)))
    for placement in layout(pattern):
        x, y = round(placement.x * scale, 3), round(placement.y * scale, 3)
        w, h = round(placement.width * scale, 3), round(placement.height * scale, 3)
        items.add(drawing.rect(insert=(x, y), size=(w, h), fill=ITEM_FILL, stroke="#ffffff", stroke_width=0.5))
        label = f"{placement.item_id}{'r' if placement.rotated else ''}"
        labels.add(drawing.text(label, insert=(round(x + w / 2, 3), round(y + h / 2, 3)), text_anchor="middle"))
    drawing.add(items)
    drawing.add(labels)

    drawing.add(drawing.rect(insert=(0, 0), size=size, fill="none", stroke=FRAME_STROKE, stroke_width=1,
                             id=f"bin-{index}"))
    return drawing.tostring()


def render_svg(solution):
    """One SVG string per cutting pattern, in pattern order"""
    return [render_pattern(pattern, index) for index, pattern in enumerate(solution.patterns)]


def save_svgs(solution, directory):
    ensure_dir(directory)
    paths = []
    for index, svg in enumerate(render_svg(solution)):
        pattern = solution.patterns[index]
        path = os.path.join(directory, f"pattern_{index:03d}_bin{pattern.bin.id}.svg")
        with open(path, "w", encoding="utf-8") as f:
            f.write(svg)
        paths.append(path)
    logger.info(f"Wrote {len(paths)} SVG file(s) to {directory}")
    return paths
