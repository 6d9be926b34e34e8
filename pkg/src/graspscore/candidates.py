"""Grasp candidate enumeration over a seed/view/rotation/depth grid.

Seeds come from farthest-point sampling of the densified surface, views
from a Fibonacci spiral on the unit sphere. Each (seed, view, rotation,
depth) cell becomes a pose whose approach axis points against the view;
cells whose finger rays miss the object are skipped and counted.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterator

import numpy as np

from . import geometry
from .gripper import ContactFrame, GraspPose, GripperModel, resolve_contacts_batch
from .mesh import TriangleMesh

_GOLDEN_INCREMENT = np.pi * (3.0 - np.sqrt(5.0))


def generate_views(count: int) -> np.ndarray:
    """Approximately uniform unit vectors from a Fibonacci spiral.

    Views point outward (from the object toward the observer). A single
    view degenerates to +z.

    Returns:
        (count, 3) array of unit vectors.
    """
    if count < 1:
        raise ValueError("view count must be >= 1")
    if count == 1:
        return np.array([[0.0, 0.0, 1.0]])
    i = np.arange(count)
    z = 1.0 - (2.0 * i + 1.0) / count
    r = np.sqrt(np.maximum(0.0, 1.0 - z * z))
    phi = i * _GOLDEN_INCREMENT
    return np.column_stack([r * np.cos(phi), r * np.sin(phi), z])


def farthest_point_sampling(points: np.ndarray, count: int, start: int = 0) -> np.ndarray:
    """Indices of a farthest-point subset, deterministic for a fixed start.

    Greedy max-min selection beginning at ``start``; distance ties resolve
    to the lowest index via argmax.
    """
    points = np.asarray(points, dtype=float)
    n = len(points)
    if count > n:
        raise ValueError(f"cannot pick {count} seeds from {n} points")
    chosen = np.empty(count, dtype=np.int64)
    chosen[0] = start
    d2 = np.einsum("ij,ij->i", points - points[start], points - points[start])
    for i in range(1, count):
        nxt = int(np.argmax(d2))
        chosen[i] = nxt
        cand = np.einsum("ij,ij->i", points - points[nxt], points - points[nxt])
        np.minimum(d2, cand, out=d2)
    return chosen


@dataclass(frozen=True, eq=False)
class CandidateGrid:
    """The enumeration grid: seeds x views x in-plane rotations x depths."""

    seed_points: np.ndarray
    seed_normals: np.ndarray
    views: np.ndarray
    rotations: np.ndarray
    depths: np.ndarray

    def __post_init__(self):
        if len(self.seed_points) == 0 or len(self.views) == 0:
            raise ValueError("grid needs at least one seed and one view")
        if len(self.rotations) == 0 or len(self.depths) == 0:
            raise ValueError("grid needs at least one rotation and one depth")

    @property
    def size(self) -> int:
        return len(self.seed_points) * len(self.views) * len(self.rotations) * len(self.depths)

    @classmethod
    def build(
        cls,
        mesh: TriangleMesh,
        n_seeds: int = 256,
        n_views: int = 300,
        n_rotations: int = 12,
        depths: tuple[float, ...] = (0.01, 0.02, 0.03, 0.04),
    ) -> "CandidateGrid":
        """Standard grid over a mesh that carries surface samples."""
        if mesh.surface_points is None:
            raise ValueError("mesh has no surface samples; call with_surface_samples first")
        n_seeds = min(n_seeds, len(mesh.surface_points))
        idx = farthest_point_sampling(mesh.surface_points, n_seeds)
        angles = np.pi * np.arange(n_rotations) / n_rotations
        return cls(
            seed_points=mesh.surface_points[idx],
            seed_normals=mesh.surface_normals[idx],
            views=generate_views(n_views),
            rotations=angles,
            depths=np.asarray(depths, dtype=float),
        )


class CandidateEnumerator:
    """Iterator over valid (GraspPose, ContactFrame) pairs of a grid.

    Grid cells are resolved in vectorized batches; cells whose rays miss
    the mesh (or would start inside it) are skipped and tallied in
    ``n_skipped``. Width is set to the contact separation plus
    ``clearance``, clamped to the gripper's maximum.
    """

    def __init__(
        self,
        mesh: TriangleMesh,
        grid: CandidateGrid,
        gripper: GripperModel,
        clearance: float = 0.01,
    ):
        self.mesh = mesh
        self.grid = grid
        self.gripper = gripper
        self.clearance = clearance
        self.n_skipped = 0
        self.n_enumerated = 0

    def __iter__(self) -> Iterator[tuple[GraspPose, ContactFrame]]:
        grid = self.grid
        n_cells_per_seed = len(grid.views) * len(grid.rotations) * len(grid.depths)

        # Precompute one rotation matrix per (view, rotation) pair.
        vr_rots = np.empty((len(grid.views), len(grid.rotations), 3, 3))
        for vi, view in enumerate(grid.views):
            for ai, theta in enumerate(grid.rotations):
                vr_rots[vi, ai] = geometry.frame_from_approach(-view, theta)

        flat_rots = vr_rots.reshape(-1, 3, 3)
        depths = grid.depths
        n_vr = len(flat_rots)
        rotations = np.repeat(flat_rots, len(depths), axis=0)
        cell_depths = np.tile(depths, n_vr)
        search_width = np.full(len(rotations), self.gripper.max_width)

        for si in range(len(grid.seed_points)):
            seed = grid.seed_points[si]
            translations = np.broadcast_to(seed, (len(rotations), 3))

            frames = resolve_contacts_batch(self.mesh, rotations, translations, search_width, cell_depths)
            self.n_enumerated += n_cells_per_seed
            for ci, frame in enumerate(frames):
                if not frame.valid:
                    self.n_skipped += 1
                    continue
                separation = float(np.linalg.norm(frame.p_cr - frame.p_cl))
                width = min(separation + self.clearance, self.gripper.max_width)
                pose = GraspPose(
                    rotation=rotations[ci],
                    translation=np.array(seed),
                    width=width,
                    depth=float(cell_depths[ci]),
                )
                # Endpoints follow the final commanded width, not the
                # search width used for the ray origins.
                center = pose.center
                half = width / 2.0
                yield pose, ContactFrame(
                    p_cl=frame.p_cl,
                    p_cr=frame.p_cr,
                    v_ql=frame.v_ql,
                    v_qr=frame.v_qr,
                    v_a=frame.v_a,
                    p_el=center - half * pose.closing_axis,
                    p_er=center + half * pose.closing_axis,
                )


def enumerate_candidates(
    mesh: TriangleMesh,
    grid: CandidateGrid,
    gripper: GripperModel,
    clearance: float = 0.01,
) -> CandidateEnumerator:
    """Lazy stream of valid grasp candidates over the grid."""
    return CandidateEnumerator(mesh, grid, gripper, clearance)
