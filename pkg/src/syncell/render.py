"""Headless frame rendering: palette-indexed buffer, P6 pixmaps, ASCII grids.

The palette is fixed by this repository (it makes no claim about anyone
else's color choices): six basic-state colors plus wall, source, detector
and background. With remanence on, a pixel once painted by a cell or a
particle is never cleared again within the run, which accumulates the full
trace picture of an emission.
"""

from __future__ import annotations

from .world import BRICK, World

# palette indices
BG = 0
WALL = 1
SOURCE = 2
DETECTOR = 3
STATE0 = 4  # states s map to STATE0 + s

PALETTE: list[tuple[int, int, int]] = [
    (240, 240, 240),  # background
    (0, 0, 0),  # wall
    (220, 40, 40),  # source block
    (255, 150, 40),  # detector zone
    (50, 80, 230),  # state 0
    (40, 180, 70),  # state 1
    (235, 200, 40),  # state 2
    (230, 90, 200),  # state 3
    (60, 200, 220),  # state 4
    (150, 80, 40),  # state 5
]

ASCII_CHARS = ".#SD012345"


class FrameBuffer:
    """A width x height grid of palette indices, one pixel per cell."""

    def __init__(self, width: int, height: int, remanence: bool = False):
        self.width = width
        self.height = height
        self.remanence = remanence
        self.buf = bytearray(width * height)
        self._static: bytes | None = None

    def _paint_static(self, world: World) -> bytes:
        width = self.width
        static = bytearray(width * self.height)
        for c in world.grid.cells():
            if c.kind is BRICK:
                static[c.y * width + c.x] = WALL
        for d in world.detectors:
            x0, y0, x1, y1 = d.zone
            for y in range(y0, y1 + 1):
                for x in range(x0, x1 + 1):
                    static[y * width + x] = DETECTOR
        for s in world.sources:
            static[s.y * width + s.x] = SOURCE
        return bytes(static)

    def paint(self, world: World) -> "FrameBuffer":
        """Draw the current world state; with remanence, accumulate instead."""
        if self._static is None:
            self._static = self._paint_static(world)
            self.buf[:] = self._static
        elif not self.remanence:
            self.buf[:] = self._static
        width = self.width
        buf = self.buf
        for c in world.visible:
            buf[c.y * width + c.x] = STATE0 + c.basic_state
        for p in world.particles:
            x, y = int(p.fx), int(p.fy)
            if 0 <= x < width and 0 <= y < self.height:
                buf[y * width + x] = STATE0 + p.state
        return self

    def to_ppm_bytes(self) -> bytes:
        header = f"P6\n{self.width} {self.height}\n255\n".encode("ascii")
        body = bytearray(len(self.buf) * 3)
        for i, idx in enumerate(self.buf):
            r, g, b = PALETTE[idx]
            body[3 * i] = r
            body[3 * i + 1] = g
            body[3 * i + 2] = b
        return header + bytes(body)

    def to_ascii(self) -> str:
        width = self.width
        rows = []
        for y in range(self.height):
            row = self.buf[y * width : (y + 1) * width]
            rows.append("".join(ASCII_CHARS[idx] for idx in row))
        return "\n".join(rows) + "\n"


def render_frame(world: World, fb: FrameBuffer) -> FrameBuffer:
    """Paint the world into the buffer and return it."""
    return fb.paint(world)
