"""Procedurally generated watertight test shapes."""

from __future__ import annotations

import numpy as np

from .mesh import TriangleMesh, build_mesh

# Box face quads, outward winding, on the unit cube [-1, 1]^3 corner table.
_BOX_CORNERS = np.array(
    [
        [-1, -1, -1], [1, -1, -1], [1, 1, -1], [-1, 1, -1],
        [-1, -1, 1], [1, -1, 1], [1, 1, 1], [-1, 1, 1],
    ],
    dtype=float,
)
_BOX_QUADS = [
    (0, 3, 2, 1),  # -z
    (4, 5, 6, 7),  # +z
    (0, 1, 5, 4),  # -y
    (2, 3, 7, 6),  # +y
    (0, 4, 7, 3),  # -x
    (1, 2, 6, 5),  # +x
]


def make_box(extents=(1.0, 1.0, 1.0), center=(0.0, 0.0, 0.0)) -> TriangleMesh:
    """Axis-aligned box given full side lengths."""
    half = 0.5 * np.asarray(extents, dtype=float)
    verts = _BOX_CORNERS * half + np.asarray(center, dtype=float)
    faces = []
    for a, b, c, d in _BOX_QUADS:
        faces.append([a, b, c])
        faces.append([a, c, d])
    return build_mesh(verts, np.array(faces))


def make_plate(extents=(0.06, 0.04, 0.004), center=(0.0, 0.0, 0.0)) -> TriangleMesh:
    """Thin closed plate: a box that is much flatter than it is wide."""
    return make_box(extents, center)


def make_icosphere(radius: float = 0.03, subdivisions: int = 3, center=(0.0, 0.0, 0.0)) -> TriangleMesh:
    """Icosahedron subdivided toward a sphere.

    Subdivision levels 0..3 give 12 / 42 / 162 / 642 vertices.
    """
    phi = (1.0 + np.sqrt(5.0)) / 2.0
    verts = np.array(
        [
            [-1, phi, 0], [1, phi, 0], [-1, -phi, 0], [1, -phi, 0],
            [0, -1, phi], [0, 1, phi], [0, -1, -phi], [0, 1, -phi],
            [phi, 0, -1], [phi, 0, 1], [-phi, 0, -1], [-phi, 0, 1],
        ],
        dtype=float,
    )
    verts /= np.linalg.norm(verts[0])
    faces = [
        (0, 11, 5), (0, 5, 1), (0, 1, 7), (0, 7, 10), (0, 10, 11),
        (1, 5, 9), (5, 11, 4), (11, 10, 2), (10, 7, 6), (7, 1, 8),
        (3, 9, 4), (3, 4, 2), (3, 2, 6), (3, 6, 8), (3, 8, 9),
        (4, 9, 5), (2, 4, 11), (6, 2, 10), (8, 6, 7), (9, 8, 1),
    ]

    verts = [tuple(v) for v in verts]
    for _ in range(subdivisions):
        cache: dict[tuple[int, int], int] = {}

        def midpoint(i, j):
            key = (min(i, j), max(i, j))
            if key not in cache:
                m = np.asarray(verts[i]) + np.asarray(verts[j])
                m /= np.linalg.norm(m)
                cache[key] = len(verts)
                verts.append(tuple(m))
            return cache[key]

        new_faces = []
        for a, b, c in faces:
            ab, bc, ca = midpoint(a, b), midpoint(b, c), midpoint(c, a)
            new_faces += [(a, ab, ca), (b, bc, ab), (c, ca, bc), (ab, bc, ca)]
        faces = new_faces

    v = np.asarray(verts, dtype=float) * radius + np.asarray(center, dtype=float)
    return build_mesh(v, np.asarray(faces))


def make_cylinder(radius: float = 0.02, height: float = 0.06, segments: int = 48,
                  center=(0.0, 0.0, 0.0)) -> TriangleMesh:
    """Closed cylinder along z with fan-triangulated caps."""
    ang = 2.0 * np.pi * np.arange(segments) / segments
    ring = np.column_stack([radius * np.cos(ang), radius * np.sin(ang)])
    bottom = np.column_stack([ring, np.full(segments, -height / 2.0)])
    top = np.column_stack([ring, np.full(segments, height / 2.0)])
    c_bot = [[0.0, 0.0, -height / 2.0]]
    c_top = [[0.0, 0.0, height / 2.0]]
    verts = np.vstack([bottom, top, c_bot, c_top]) + np.asarray(center, dtype=float)

    faces = []
    ib, it = 2 * segments, 2 * segments + 1
    for i in range(segments):
        j = (i + 1) % segments
        faces.append([i, j, segments + i])          # side lower
        faces.append([j, segments + j, segments + i])  # side upper
        faces.append([ib, j, i])                    # bottom cap, -z out
        faces.append([it, segments + i, segments + j])  # top cap, +z out
    return build_mesh(verts, np.asarray(faces))


def make_l_prism(scale: float = 1.0, center=(0.0, 0.0, 0.0)) -> TriangleMesh:
    """L-shaped prism: the union of [0,1]^3 and [1,2]x[0,1]x[0,2], scaled.

    The L cross-section lives in the xz plane and is extruded along y.
    """
    # Cross-section polygon, counterclockwise in xz.
    poly = np.array([[0, 0], [2, 0], [2, 2], [1, 2], [1, 1], [0, 1]], dtype=float)
    n = len(poly)
    front = np.column_stack([poly[:, 0], np.ones(n), poly[:, 1]])   # y = 1
    back = np.column_stack([poly[:, 0], np.zeros(n), poly[:, 1]])   # y = 0
    verts = np.vstack([back, front])

    # Cap triangulation of the L polygon (fixed fan-free split).
    cap = np.array([[0, 1, 4], [1, 2, 4], [2, 3, 4], [0, 4, 5]])
    faces = []
    for a, b, c in cap:
        faces.append([a, c, b])              # back cap, -y out (xz ccw seen from +y)
        faces.append([n + a, n + b, n + c])  # front cap, +y out
    for i in range(n):
        j = (i + 1) % n
        faces.append([i, j, n + j])
        faces.append([i, n + j, n + i])
    v = verts * scale + np.asarray(center, dtype=float)
    return build_mesh(v, np.asarray(faces))
