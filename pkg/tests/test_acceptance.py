"""Acceptance suite: one test per shipped guarantee.

Each test prints a single [PASS]/[FAIL] line (visible with ``pytest -s``)
and then asserts, so a red run names the broken guarantee directly:

1. score-domain suite over >= 10,000 candidates on five desk meshes
2. rigid invariance of every score field under mesh + grasp transforms
3. oracle equivalence: kNN, gravity distance, force closure, centroid
4. closure discreteness vs hybrid refinement on the sphere candidates
5. flatness sanity on a plate interior and sphere diametral grasps
6. force-closure monotonicity across the friction ladder
7. AP protocol on the perfect / zero / 25-good scenes, NMS pair scan
8. byte-identical CLI labeling runs
"""

import itertools
import math
import subprocess
import sys
import time

import numpy as np
import pytest
from scipy.spatial.transform import Rotation

from graspscore import (
    CandidateGrid,
    ContactFrame,
    FrictionBins,
    GraspPose,
    GripperModel,
    MetricWeights,
    PipelineConfig,
    SpatialIndex,
    antipodal_force_closure,
    enumerate_candidates,
    evaluate_ap,
    flatness_score,
    grasp_nms,
    gravity_score,
    label_mesh,
    mass_properties,
    neighborhood_normal_consistency,
    normalize_and_combine,
    resolve_contacts,
    save_obj,
    score_frames,
    transform_mesh,
)
from graspscore.candidates import generate_views
from graspscore.gripper import resolve_contacts_batch
from graspscore.scene import DEFAULT_ROT_THRESH, DEFAULT_TRANS_THRESH

import _scenes
from conftest import random_rotation

# Breakdown tuple layout: (s_t, s_f1, s_f2, s_f, s_g_raw, s_g, s_c_raw,
# s_c, s_hybrid).
_T, _F1, _F2, _F, _G, _C, _H = 0, 1, 2, 3, 5, 7, 8


def _report(num: int, name: str, failures: list[str], detail: str = ""):
    status = "FAIL" if failures else "PASS"
    tail = "; ".join(failures) if failures else detail
    line = f"[{status}] {num}/8 {name}" + (f": {tail}" if tail else "")
    print(line)
    assert not failures, line


@pytest.fixture(scope="module")
def labeled_desk(desk_meshes):
    """Full labeling runs over the five desk meshes, with wall time."""
    config = PipelineConfig(n_seeds=48, n_views=36, n_rotations=6)
    t0 = time.perf_counter()
    records = {name: label_mesh(mesh, name, config)[0] for name, mesh in desk_meshes.items()}
    elapsed = time.perf_counter() - t0
    return records, elapsed


@pytest.fixture(scope="module")
def desk_breakdowns(labeled_desk):
    records, _ = labeled_desk
    return {
        name: np.array([r.breakdown.as_tuple() for r in recs])
        for name, recs in records.items()
    }


def test_criterion_1_score_domain_suite(labeled_desk, desk_breakdowns):
    records, elapsed = labeled_desk
    vals = np.vstack(list(desk_breakdowns.values()))
    n = len(vals)

    weights = MetricWeights()
    lam = np.array([weights.lambda_t, weights.lambda_f, weights.lambda_g, weights.lambda_c])
    unit_cols = vals[:, [_T, _F1, _F2, _F, _G, _C, _H]]
    product_dev = float(np.max(np.abs(vals[:, _F] - vals[:, _F1] * vals[:, _F2])))
    dot_dev = float(np.max(np.abs(vals[:, _H] - vals[:, [_T, _F, _G, _C]] @ lam)))

    failures = []
    if n < 10_000:
        failures.append(f"only {n} candidates")
    if not (np.all(unit_cols >= 0.0) and np.all(unit_cols <= 1.0)):
        failures.append("score outside [0, 1]")
    if product_dev > 1e-12:
        failures.append(f"s_f deviates from s_f1*s_f2 by {product_dev:.2e}")
    if dot_dev > 1e-12:
        failures.append(f"weighted sum deviates by {dot_dev:.2e}")
    if elapsed >= 60.0:
        failures.append(f"labeling took {elapsed:.1f}s")
    _report(1, "score-domain suite", failures,
            f"{n} candidates over {len(records)} meshes in {elapsed:.1f}s")


def test_criterion_2_rigid_invariance(icosphere):
    """Scores depend only on relative geometry, not the world frame."""
    config = PipelineConfig()
    gripper = config.gripper()
    grid = CandidateGrid.build(icosphere, n_seeds=6, n_views=8, n_rotations=2)
    poses = [pose for pose, _ in enumerate_candidates(icosphere, grid, gripper)]
    rotations = np.stack([p.rotation for p in poses])
    translations = np.stack([p.translation for p in poses])
    widths = np.array([p.width for p in poses])
    depths = np.array([p.depth for p in poses])

    search = np.full(len(poses), gripper.max_width)

    def field_matrix(mesh, rots, trans):
        # Contacts are searched at full jaw opening, as during enumeration;
        # fingertip endpoints then follow the commanded width.
        hits = resolve_contacts_batch(mesh, rots, trans, search, depths)
        if not all(f.valid for f in hits):
            return None
        frames = []
        for i, f in enumerate(hits):
            center = trans[i] + depths[i] * rots[i][:, 2]
            half_jaw = (widths[i] / 2.0) * rots[i][:, 0]
            frames.append(ContactFrame(
                p_cl=f.p_cl, p_cr=f.p_cr, v_ql=f.v_ql, v_qr=f.v_qr, v_a=f.v_a,
                p_el=center - half_jaw, p_er=center + half_jaw,
            ))
        breakdowns = normalize_and_combine(
            score_frames(frames, SpatialIndex.from_mesh(mesh),
                         mass_properties(mesh).gravity_center, config))
        return np.array([b.as_tuple() for b in breakdowns])

    base = field_matrix(icosphere, rotations, translations)
    assert base is not None and len(base) > 50

    rng = np.random.default_rng(11)
    worst = 0.0
    dropped = 0
    for _ in range(100):
        rot = random_rotation(rng)
        shift = rng.uniform(-0.5, 0.5, size=3)
        moved = transform_mesh(icosphere, rot, shift)
        vals = field_matrix(moved, rot[None] @ rotations, translations @ rot.T + shift)
        if vals is None:
            dropped += 1
            continue
        worst = max(worst, float(np.max(np.abs(vals - base))))

    failures = []
    if dropped:
        failures.append(f"{dropped} transforms lost a contact frame")
    if worst > 1e-9:
        failures.append(f"worst field deviation {worst:.2e}")
    _report(2, "rigid invariance", failures,
            f"{len(base)} grasps x 100 transforms, worst deviation {worst:.2e}")


def _linear_scan_knn(points: np.ndarray, query: np.ndarray, k: int) -> np.ndarray:
    d = np.linalg.norm(points - query, axis=1)
    return np.lexsort((np.arange(len(points)), d))[:k]


def _dense_line_min(p_cl, p_cr, gc) -> float:
    """Distance from gc to the contact line by brute parameter refinement."""
    lo, hi = -5.0, 6.0
    best = math.inf
    for _ in range(4):
        ts = np.linspace(lo, hi, 10001)
        pts = p_cl + ts[:, None] * (p_cr - p_cl)
        d = np.linalg.norm(pts - gc, axis=1)
        j = int(np.argmin(d))
        best = float(d[j])
        lo, hi = ts[max(j - 1, 0)], ts[min(j + 1, len(ts) - 1)]
    return best


def _rim_cone_contains(ray: np.ndarray, axis: np.ndarray, mu: float) -> bool:
    # The threshold alignment comes from explicitly constructed boundary
    # rays of the friction cone, not from a closed-form cosine.
    half = math.atan(mu)
    helper = np.eye(3)[int(np.argmin(np.abs(axis)))]
    u0 = np.cross(axis, helper)
    u0 /= np.linalg.norm(u0)
    u1 = np.cross(axis, u0)
    phis = np.linspace(0.0, 2.0 * np.pi, 720, endpoint=False)
    rim = (math.cos(half) * axis
           + math.sin(half) * (np.cos(phis)[:, None] * u0 + np.sin(phis)[:, None] * u1))
    return float(np.dot(ray, axis)) >= float(np.max(rim @ axis))


def _random_closure_frame(rng) -> ContactFrame:
    def unit(v):
        return v / np.linalg.norm(v)

    v_a = unit(rng.normal(size=3))
    p_cl = rng.uniform(-0.05, 0.05, size=3)
    p_cr = p_cl + rng.uniform(0.01, 0.08) * v_a
    return ContactFrame(
        p_cl=p_cl, p_cr=p_cr,
        v_ql=unit(rng.normal(size=3)), v_qr=unit(rng.normal(size=3)),
        v_a=v_a, p_el=p_cl - 0.005 * v_a, p_er=p_cr + 0.005 * v_a,
    )


def test_criterion_3_oracle_equivalence(desk_meshes, cube, icosphere, l_prism):
    failures = []
    gripper = GripperModel()

    # Exact kNN against a lexsorted linear scan, 100 queries per mesh.
    rng = np.random.default_rng(5)
    knn_bad = 0
    for mesh in desk_meshes.values():
        index = SpatialIndex.from_mesh(mesh)
        lo = mesh.vertices.min(axis=0) - 0.01
        hi = mesh.vertices.max(axis=0) + 0.01
        queries = rng.uniform(lo, hi, size=(100, 3))
        idx, _ = index.knn_batch(queries, 10)
        for q, row in zip(queries, idx):
            if not np.array_equal(row, _linear_scan_knn(index.points, q, 10)):
                knn_bad += 1
    if knn_bad:
        failures.append(f"{knn_bad} kNN queries disagree with the linear scan")

    # Gravity term against dense minimization along the contact line.
    frames = []
    gcs = []
    for mesh in (cube, icosphere):
        grid = CandidateGrid.build(mesh, n_seeds=8, n_views=6, n_rotations=2)
        gc = mass_properties(mesh).gravity_center
        for _, frame in itertools.islice(enumerate_candidates(mesh, grid, gripper), 75):
            frames.append(frame)
            gcs.append(gc)
    gravity_dev = max(
        abs(gravity_score(f, gc) - _dense_line_min(f.p_cl, f.p_cr, gc))
        for f, gc in zip(frames, gcs)
    )
    if gravity_dev > 1e-6:
        failures.append(f"gravity distance off by {gravity_dev:.2e}")

    # Force-closure decisions against cone-boundary sampling, 500 frames
    # across the whole friction ladder.
    rng = np.random.default_rng(13)
    closure_bad = 0
    for _ in range(500):
        frame = _random_closure_frame(rng)
        for mu in FrictionBins().mus:
            want = (_rim_cone_contains(frame.v_a, -frame.v_ql, mu)
                    and _rim_cone_contains(-frame.v_a, -frame.v_qr, mu))
            if antipodal_force_closure(frame, mu) != want:
                closure_bad += 1
    if closure_bad:
        failures.append(f"{closure_bad} closure decisions disagree")

    # Volume centroid against voxel integration on the L prism. The prism
    # is constant along y, so the 200^3 sums collapse to one xz sheet of
    # cell centers times a full y column.
    scale = 0.02
    n_cells = 200
    xs = (np.arange(n_cells) + 0.5) * (2.0 * scale / n_cells)
    ys = (np.arange(n_cells) + 0.5) * (scale / n_cells)
    zs = (np.arange(n_cells) + 0.5) * (2.0 * scale / n_cells)
    sheet = ~((xs[:, None] < scale) & (zs[None, :] > scale))
    gc_voxel = np.array([
        float((sheet * xs[:, None]).sum() / sheet.sum()),
        float(ys.mean()),
        float((sheet * zs[None, :]).sum() / sheet.sum()),
    ])
    vol_voxel = float(sheet.sum()) * n_cells * (2.0 * scale / n_cells) * (scale / n_cells) * (2.0 * scale / n_cells)
    props = mass_properties(l_prism)
    centroid_dev = float(np.max(np.abs(props.gravity_center - gc_voxel)))
    if centroid_dev > 1e-3:
        failures.append(f"centroid off voxel oracle by {centroid_dev:.2e} m")
    if abs(props.volume - vol_voxel) > 1e-12:
        failures.append(f"volume off voxel oracle by {abs(props.volume - vol_voxel):.2e}")

    _report(3, "oracle equivalence", failures,
            f"gravity dev {gravity_dev:.2e}, centroid dev {centroid_dev:.2e}")


def test_criterion_4_discreteness_vs_refinement(desk_breakdowns):
    """The hybrid score separates candidates the closure grid lumps together."""
    vals = desk_breakdowns["icosphere"]
    closure_levels = set(vals[:, _T].tolist())
    hybrids = set(vals[:, _H].tolist())

    # Within a closure level, distinct (s_f, s_g, s_c) triples must map to
    # distinct hybrids.
    collisions = 0
    for level in closure_levels:
        rows = vals[vals[:, _T] == level]
        triples = {(r[_F], r[_G], r[_C]): r[_H] for r in rows}
        if len(set(triples.values())) != len(triples):
            collisions += 1

    failures = []
    if len(closure_levels) > 11:
        failures.append(f"{len(closure_levels)} closure levels")
    if len(hybrids) < 10 * len(closure_levels):
        failures.append(f"only {len(hybrids)} hybrid values for {len(closure_levels)} levels")
    if collisions:
        failures.append(f"{collisions} closure levels collapse distinct triples")
    _report(4, "discreteness vs refinement", failures,
            f"{len(closure_levels)} closure levels refine to {len(hybrids)} hybrid values")


def test_criterion_5_flatness_sanity(plate, icosphere):
    index = SpatialIndex.from_mesh(plate)
    # Probes on the plate's top face: three interior, two near an edge,
    # one near a corner. The flattest probe must be interior.
    probes = np.array([
        [0.0, 0.0, 0.002],
        [0.01, 0.005, 0.002],
        [-0.012, 0.008, 0.002],
        [0.029, 0.0, 0.002],
        [0.0, 0.0195, 0.002],
        [0.0295, 0.0195, 0.002],
    ])
    interior = np.array([True, True, True, False, False, False])
    normals = np.tile([0.0, 0.0, 1.0], (len(probes), 1))
    flatness = neighborhood_normal_consistency(probes, normals, index, k=10)
    top = int(np.argmax(flatness))

    failures = []
    if not interior[top]:
        failures.append(f"flattest probe is {probes[top].tolist()}")
    if flatness[top] < 0.99:
        failures.append(f"best flatness only {flatness[top]:.4f}")

    sphere_index = SpatialIndex.from_mesh(icosphere)
    gripper = GripperModel()
    worst_alignment = 1.0
    for view in generate_views(8):
        pose = _scenes.diametral_grasp(np.zeros(3), view)
        frame = resolve_contacts(icosphere, pose, gripper)
        _, s_f2, _ = flatness_score(frame, sphere_index)
        worst_alignment = min(worst_alignment, s_f2)
    if worst_alignment < 0.99:
        failures.append(f"diametral alignment only {worst_alignment:.4f}")

    _report(5, "flatness sanity", failures,
            f"plate interior {flatness[top]:.4f}, sphere alignment >= {worst_alignment:.4f}")


def test_criterion_6_closure_monotonicity(desk_breakdowns):
    rng = np.random.default_rng(17)
    mus = FrictionBins().mus
    non_monotone = 0
    for _ in range(500):
        frame = _random_closure_frame(rng)
        passes = [antipodal_force_closure(frame, mu) for mu in mus]
        if any(a and not b for a, b in zip(passes, passes[1:])):
            non_monotone += 1

    allowed = {0.0} | {round(1.1 - mu, 10) for mu in mus}
    observed = set(np.vstack(list(desk_breakdowns.values()))[:, _T].tolist())
    off_grid = observed - allowed

    failures = []
    if non_monotone:
        failures.append(f"{non_monotone} frames lose closure as friction grows")
    if off_grid:
        failures.append(f"closure scores off the decimal grid: {sorted(off_grid)[:3]}")
    _report(6, "closure monotonicity", failures,
            f"500 frames monotone, {len(observed)} grid values")


def test_criterion_7_ap_protocol():
    library = _scenes.sphere_library()
    layout = _scenes.sphere_scene(library)

    perfect = evaluate_ap(_scenes.perfect_predictions(), layout, library, _scenes.CLOSURE_ONLY)
    zero = evaluate_ap(_scenes.zero_predictions(), layout, library, _scenes.CLOSURE_ONLY)
    good25 = evaluate_ap(_scenes.good25_predictions(), layout, library, _scenes.CLOSURE_ONLY)
    zero_dev = abs(zero.map_value - 1.0 / 6.0)
    good_dev = abs(good25.map_value - _scenes.good25_oracle_map())

    failures = []
    if perfect.map_value != 1.0:
        failures.append(f"perfect scene mAP {perfect.map_value!r}")
    if zero_dev > 1e-9:
        failures.append(f"zero scene mAP off by {zero_dev:.2e}")
    if good_dev > 1e-9:
        failures.append(f"25-good scene mAP off by {good_dev:.2e}")

    # Survivors of greedy NMS on clustered random poses must differ by the
    # translation threshold or the rotation threshold, pairwise.
    rng = np.random.default_rng(3)
    scan_bad = 0
    dropped_best = 0
    for _ in range(5):
        grasps = [
            GraspPose(rotation=random_rotation(rng),
                      translation=rng.uniform(0.0, 0.04, size=3),
                      width=0.05, depth=0.02)
            for _ in range(100)
        ]
        scores = rng.uniform(size=100)
        kept = grasp_nms(grasps, scores)
        if int(np.argmax(scores)) not in kept.tolist():
            dropped_best += 1
        for a, b in itertools.combinations(kept.tolist(), 2):
            d_t = float(np.linalg.norm(grasps[a].translation - grasps[b].translation))
            rel = Rotation.from_matrix(grasps[a].rotation).inv() * Rotation.from_matrix(grasps[b].rotation)
            if d_t < DEFAULT_TRANS_THRESH and float(rel.magnitude()) < DEFAULT_ROT_THRESH:
                scan_bad += 1
    if scan_bad:
        failures.append(f"{scan_bad} surviving NMS pairs are mutually close")
    if dropped_best:
        failures.append(f"{dropped_best} batches dropped the top-scored grasp")

    _report(7, "AP protocol", failures,
            f"mAP 1.000 / {zero.map_value:.4f} / {good25.map_value:.4f}")


def test_criterion_8_labeling_determinism(tmp_path, cube):
    mesh_path = tmp_path / "cube.obj"
    save_obj(str(mesh_path), cube.vertices, cube.faces)
    config_path = tmp_path / "tiny.cfg"
    config_path.write_text("n_seeds = 12\nn_views = 10\nn_rotations = 4\n")

    outputs = []
    for name in ("a.csv", "b.csv"):
        out = tmp_path / name
        run = subprocess.run(
            [sys.executable, "-m", "graspscore.cli", "label", str(mesh_path),
             "--object-id", "cube", "--out", str(out), "--config", str(config_path)],
            capture_output=True, text=True, cwd=tmp_path,
        )
        assert run.returncode == 0, run.stderr
        outputs.append(out.read_bytes())

    failures = []
    if len(outputs[0]) < 100:
        failures.append("labeling produced no rows")
    if outputs[0] != outputs[1]:
        failures.append("repeated runs differ")
    _report(8, "labeling determinism", failures,
            f"two runs, {len(outputs[0])} bytes each, byte-identical")
