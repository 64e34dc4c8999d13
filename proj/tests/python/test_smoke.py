# Copyright (c) 2026 The voxelray authors
# SPDX-License-Identifier: Apache-2.0
"""End-to-end smoke test for the python bindings.

Runs with plain asserts so it needs nothing beyond numpy and the built
module; registered with ctest as `python_smoke`.
"""

import math
import os
import sys
import tempfile

import numpy as np

import voxelray as vr


def forward_mount_extrinsic():
    """Camera looks along ego +x: cam x = -ego y, cam y = -ego z, cam z = ego x."""
    extrinsic = np.eye(4)
    extrinsic[:3, :3] = np.array([[0.0, -1.0, 0.0], [0.0, 0.0, -1.0], [1.0, 0.0, 0.0]])
    return extrinsic


def intrinsic(focal, cu, cv):
    p = np.zeros((3, 4))
    p[0, 0] = focal
    p[1, 1] = focal
    p[0, 2] = cu
    p[1, 2] = cv
    p[2, 2] = 1.0
    return p


def check_encoding():
    encoder = vr.GaussianEncoder(64, 0.0, 64.8, 1.0)
    assert encoder.size == 64
    # Normalized density at one sigma: exp(-1) / sqrt(pi).
    got = encoder.density(21.0, 20.0)
    assert abs(got - 0.20755374871029736) <= 1e-15, got
    # Dot products follow the Gaussian similarity, exp(-1/2) at distance 1,
    # but only when the sample spacing is at most sigma / 2; the 64-channel
    # encoder above spaces samples wider than sigma, so use a denser one.
    dense = vr.GaussianEncoder(81, 0.0, 40.0, 1.0)
    assert dense.delta_x <= dense.sigma / 2.0
    sim = vr.similarity(dense.encode(20.0), dense.encode(21.0))
    assert abs(sim - 0.6065306597126334) <= 2e-3, sim
    assert abs(vr.similarity(dense.encode(30.0), dense.encode(30.0)) - 1.0) <= 2e-3
    # similarity is the plain dot product.
    a = np.asarray(dense.encode(18.0))
    b = np.asarray(dense.encode(22.5))
    assert abs(vr.similarity(list(a), list(b)) - float(a @ b)) <= 1e-15
    assert len(vr.sinusoidal_encode(16, 3.0)) == 16


def check_geometry():
    assert abs(vr.wrap_angle(2.0 * math.pi + 0.3) - 0.3) <= 1e-12
    rig = vr.CameraRig(intrinsic(720.0, 609.5, 172.8), forward_mount_extrinsic())
    assert rig.handedness == 1
    assert abs(vr.orientation_delta(rig).radians) <= 1e-12

    point = np.array([15.0, 1.0, 0.5])
    cam = vr.ego_to_camera(rig, point)
    assert abs(cam[2] - 15.0) <= 1e-12  # depth is ego x for this mount
    projection = vr.project_to_image(rig, cam, vr.ImageSize(1248, 352))
    assert projection.valid
    restored = vr.back_project(rig, projection.u, projection.v, projection.depth)
    assert np.allclose(restored, point, atol=1e-9)

    # World flip is an involution and keeps the flip marker set.
    box = vr.Box3D(np.array([10.0, 2.0, 0.0]), 4.0, 2.0, 1.5, 0.3)
    cloud = vr.PointCloud(np.array([[5.0, 1.0, 0.2], [8.0, -2.0, 0.4]]))
    flipped = vr.apply_world_flip(rig, [box], cloud)
    assert flipped.image_flip_required
    assert flipped.rig.handedness == -1
    assert abs(flipped.boxes[0].yaw + 0.3) <= 1e-15
    restored = vr.apply_world_flip(flipped.rig, flipped.boxes, flipped.cloud)
    assert np.array_equal(restored.cloud.points, cloud.points)
    assert np.array_equal(restored.boxes[0].center, box.center)
    assert restored.boxes[0].yaw == box.yaw

    # Rotation shifts the orientation delta by exactly theta.
    rotated = vr.apply_world_rotation(rig, [box], cloud, 0.25)
    assert abs(vr.orientation_delta(rotated.rig).radians - 0.25) <= 1e-12
    assert np.allclose(
        vr.ego_to_camera(rotated.rig, rotated.cloud.points[0]),
        vr.ego_to_camera(rig, cloud.points[0]),
        atol=1e-12,
    )


def check_voxels_and_traversal():
    grid = vr.VoxelGrid(
        np.zeros(3), np.ones(3), np.array([4, 1, 1], dtype=np.int32)
    )
    assert grid.voxel_count() == 4
    assert np.allclose(grid.center(1, 0, 0), [1.5, 0.5, 0.5])
    # Axis-aligned ray: start voxel included, endpoint voxel excluded.
    walked = vr.traverse_ray(grid, np.array([0.1, 0.5, 0.5]), np.array([3.5, 0.5, 0.5]))
    assert list(walked) == [0, 1, 2], walked

    values, valid = vr.bilinear_sample(np.arange(12.0).reshape(2, 3, 2), 0.5, 0.5)
    assert valid
    assert abs(values[0] - 4.0) <= 1e-12  # mean of 0, 2, 6, 8


def check_occupancy():
    # One return in a straight corridor: space behind it must stay unknown.
    grid = vr.VoxelGrid(
        np.array([0.0, -0.5, -0.5]), np.ones(3), np.array([6, 1, 1], dtype=np.int32)
    )
    cloud = vr.PointCloud(np.array([[2.5, 0.0, 0.0]]))
    sighted = vr.label_occupancy(grid, cloud, np.array([0.5, 0.0, 0.0]))
    assert list(sighted.labels) == [0, 0, 1, 255, 255, 255], sighted.labels
    assert sighted.count(255) == 3
    naive = vr.label_occupancy_naive(grid, cloud)
    assert list(naive.labels) == [0, 0, 1, 0, 0, 0], naive.labels
    # Thread count never changes the labels.
    threaded = vr.label_occupancy(grid, cloud, np.array([0.5, 0.0, 0.0]), threads=4)
    assert np.array_equal(threaded.labels, sighted.labels)


def check_attention():
    rig = vr.CameraRig(intrinsic(16.0, 15.5, 11.5), forward_mount_extrinsic())
    encoder = vr.GaussianEncoder(81, 0.0, 40.0, 1.0)
    z_star = 20.0
    keys = np.tile(np.asarray(encoder.encode(z_star)), (24, 32, 1))
    values = np.ones((24, 32, 1))
    grid = vr.VoxelGrid(
        np.array([14.0, -2.0, -1.0]), np.ones(3), np.array([12, 4, 2], dtype=np.int32)
    )
    result = vr.local_ray_attention(keys, values, grid, rig, encoder)
    assert result.channels == 1
    assert result.values.shape == (grid.voxel_count(), 1)
    checked = 0
    for index, record in enumerate(result.records):
        if not record.valid:
            continue
        expected = math.exp(-((record.depth - z_star) ** 2) / 2.0)
        assert abs(record.weight - expected) <= 2e-3
        # Unit values make the feature the weight itself, up to the rounding
        # of the bilinear sample of an all-ones map.
        assert abs(result.values[index, 0] - record.weight) <= 1e-12 * max(record.weight, 1e-300)
        checked += 1
    assert checked > 50

    extended = vr.append_orientation_encoding(
        np.zeros((2, 3, 4)), 0.37, vr.GaussianEncoder(16, -0.9, 0.9, 0.1)
    )
    assert extended.shape == (2, 3, 20)


def check_eval():
    unit = vr.Box3D(np.zeros(3), 1.0, 1.0, 1.0, 0.0)
    spun = vr.Box3D(np.zeros(3), 1.0, 1.0, 1.0, math.pi / 4.0)
    assert abs(vr.iou_bev_rotated(unit, unit) - 1.0) <= 1e-12
    # Eighth turn: the octagon overlap, 1/sqrt(2).
    assert abs(vr.iou_bev_rotated(unit, spun) - 0.7071067811865476) <= 1e-9
    lifted = vr.Box3D(np.array([0.0, 0.0, 0.5]), 1.0, 1.0, 1.0, 0.0)
    assert abs(vr.iou_3d(unit, lifted) - 1.0 / 3.0) <= 1e-12

    anchors = [
        vr.Box3D(np.zeros(3), 4.0, 2.0, 1.5, 0.0),
        vr.Box3D(np.array([30.0, 0.0, 0.0]), 4.0, 2.0, 1.5, 0.0),
    ]
    truths = [vr.Box3D(np.zeros(3), 4.0, 2.0, 1.5, 0.0)]
    kinds = [a.kind for a in vr.assign_anchors(anchors, truths)]
    assert kinds == [vr.AnchorAssignmentKind.POSITIVE, vr.AnchorAssignmentKind.NEGATIVE]

    assert vr.within_difficulty(50.0, 0, 0.1, vr.Difficulty.EASY)
    assert not vr.within_difficulty(10.0, 0, 0.0, vr.Difficulty.HARD)

    def car(x, y):
        return vr.Box3D(np.array([x, y, 0.0]), 4.0, 2.0, 1.5, 0.0)

    def det(box, score):
        return vr.Detection(box, score, "Car")

    def gt(box):
        return vr.GroundTruth(box, "Car")

    perfect = [[det(car(5.0, 1.0), 0.4), det(car(12.0, -2.0), 0.8)]]
    assert vr.average_precision(perfect, [[gt(car(5.0, 1.0)), gt(car(12.0, -2.0))]]) == 100.0

    # Five detections against three targets, ranked TP FP TP TP FP:
    # 100 * (13 + 27 * 0.75) / 40.
    g1, g2, g3 = car(5.0, 0.0), car(15.0, 0.0), car(25.0, 0.0)
    detections = [[
        det(g1, 0.95),
        det(car(40.0, 10.0), 0.90),
        det(g2, 0.85),
        det(g3, 0.80),
        det(car(50.0, -10.0), 0.70),
    ]]
    ap = vr.average_precision(detections, [[gt(g1), gt(g2), gt(g3)]])
    assert ap == 83.125, ap


def check_kitti_io():
    calib = vr.KittiCalibration()
    calib.p2 = intrinsic(720.0, 609.5, 172.8)
    p3 = intrinsic(720.0, 609.5, 172.8)
    p3[0, 3] = -330.0  # matrix properties come back as read-only views
    calib.p3 = p3
    calib.r0_rect = np.eye(3)
    tr = np.zeros((3, 4))
    tr[:3, :3] = forward_mount_extrinsic()[:3, :3]
    tr[:, 3] = [0.06, -0.08, -0.27]
    calib.tr_velo_to_cam = tr
    parsed = vr.parse_calibration(vr.write_calibration(calib))
    assert np.array_equal(parsed.p2, calib.p2)
    assert np.array_equal(parsed.tr_velo_to_cam, calib.tr_velo_to_cam)
    rig = vr.rig_from_calibration(parsed, vr.CameraSide.LEFT)
    assert rig.handedness == 1
    assert np.allclose(rig.extrinsic[:3, :3], tr[:3, :3])

    label = vr.KittiLabel()
    label.type = "Car"
    label.alpha = -0.2
    label.left, label.top, label.right, label.bottom = 300.0, 100.0, 420.0, 160.0
    label.height, label.width, label.length = 1.5, 1.6, 4.0
    label.location = np.array([2.0, 1.6, 15.0])
    label.rotation_y = 0.1
    parsed_labels = vr.parse_labels(vr.write_labels([label]))
    assert len(parsed_labels) == 1
    assert parsed_labels[0].type == "Car"
    assert np.array_equal(parsed_labels[0].location, label.location)
    assert parsed_labels[0].score is None

    # Camera-frame label -> ego box -> label round trip.
    box = vr.box_from_label(label, rig.extrinsic)
    back = vr.label_from_box(box, rig.extrinsic, label)
    assert np.allclose(back.location, label.location, atol=1e-9)
    assert abs(vr.wrap_angle(back.rotation_y - label.rotation_y)) <= 1e-9
    assert abs(back.height - label.height) <= 1e-12

    cloud = vr.PointCloud(np.array([[1.0, 2.0, 3.0], [4.0, 5.0, 6.0]]), np.array([0.5, 1.0]))
    data = vr.write_point_cloud(cloud)
    assert len(data) == 32
    parsed_cloud = vr.parse_point_cloud(data)
    assert np.array_equal(parsed_cloud.points, cloud.points)  # float32-exact inputs
    assert parsed_cloud.intensity == [0.5, 1.0]


def check_config_and_selfcheck():
    with tempfile.TemporaryDirectory() as scratch:
        path = os.path.join(scratch, "run.cfg")
        with open(path, "w", encoding="utf-8") as handle:
            handle.write("grid_dims = 32 32 8\nquery_encoder_size = 48\nseed = 7\n")
        config = vr.load_run_config(path)
        assert isinstance(config, vr.RunConfig)

    results = vr.run_selfcheck(threads=2)
    assert len(results) > 0
    failed = [r.name for r in results if not r.passed]
    assert not failed, failed


def main():
    checks = [
        check_encoding,
        check_geometry,
        check_voxels_and_traversal,
        check_occupancy,
        check_attention,
        check_eval,
        check_kitti_io,
        check_config_and_selfcheck,
    ]
    for check in checks:
        check()
        print(f"ok {check.__name__}")
    print(f"{len(checks)} smoke checks passed")


if __name__ == "__main__":
    sys.exit(main())
