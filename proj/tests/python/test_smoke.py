"""Smoke tests for the lidar_aug python module."""

import math

import numpy as np
import pytest

import lidar_aug as la


@pytest.fixture(scope="module")
def scenes():
    return la.make_synthetic_dataset(scene_count=4, points_per_scene=600, seed=3)


def test_synthetic_dataset(scenes):
    assert len(scenes) == 4
    assert scenes[0].id == "000000"
    assert len(scenes[0].cloud) > 0
    assert len(scenes[0].annotations) >= 2


def test_numpy_round_trip(scenes):
    arr = scenes[0].cloud.to_numpy()
    assert arr.shape[1] == 4
    back = la.PointCloud.from_numpy(arr)
    assert np.array_equal(back.to_numpy(), arr)


def test_geometry_ops(scenes):
    scene = scenes[0].copy()
    before = scene.cloud.to_numpy()
    la.rotate_z(scene, math.pi / 2)
    after = scene.cloud.to_numpy()
    assert np.allclose(after[:, 0], -before[:, 1])
    assert np.allclose(after[:, 1], before[:, 0])

    a = scene.annotations[0]
    assert la.bev_iou(a, a) == pytest.approx(1.0)
    assert la.iou_3d(a, a) == pytest.approx(1.0)
    assert la.box_corners(a).shape == (8, 3)

    mask = la.points_in_box(scene.cloud, a)
    assert mask.dtype == bool
    assert mask.sum() == len(la.points_in_box(scene.cloud, a).nonzero()[0])


def test_presets_and_policy(scenes):
    presets = la.list_presets()
    assert len(presets) == 43
    assert presets[41].name == "policy41"
    policy = la.load_policy("policy41")
    reloaded = la.load_policy(policy.to_json())
    assert reloaded.to_json() == policy.to_json()

    db = la.build_database(scenes, min_points=1)
    assert len(db) > 0

    out1 = scenes[0].copy()
    out2 = scenes[0].copy()
    la.apply_policy(out1, policy, db=db, mode="train")
    la.apply_policy(out2, policy, db=db, mode="train")
    assert np.array_equal(out1.cloud.to_numpy(), out2.cloud.to_numpy())


def test_policy0_is_identity(scenes):
    scene = scenes[1].copy()
    before = scene.cloud.to_numpy()
    la.apply_policy(scene, la.load_policy("policy0"), mode="train")
    assert np.array_equal(scene.cloud.to_numpy(), before)


def test_bad_policy_rejected():
    with pytest.raises(ValueError):
        la.load_policy('{"steps": {"global_rotate": {"beta": 9.0}}}')


def test_stats(scenes):
    stats = la.dataset_stats(scenes)
    assert stats.scene_count == 4
    assert stats.mean_points > 0
    single = la.scene_stats(scenes[0])
    assert single.total_points <= len(scenes[0].cloud)  # FOV-filtered


def test_evaluate_ground_truth_against_itself(scenes):
    dets = {}
    gts = {}
    for scene in scenes:
        gts[scene.id] = list(scene.annotations)
        dets[scene.id] = [la.Detection(a, 1.0) for a in scene.annotations]
    table = la.evaluate(dets, gts)
    assert table["moderate"] == pytest.approx(1.0)
    assert table["ap40"]["hard"] == pytest.approx(1.0)


def test_scene_io(tmp_path, scenes):
    la.write_scene(scenes[0], tmp_path)
    back = la.read_scene(tmp_path, scenes[0].id)
    assert len(back.cloud) == len(scenes[0].cloud)
    assert len(back.annotations) == len(scenes[0].annotations)
    a = back.annotations[0]
    b = scenes[0].annotations[0]
    assert a.center.x == pytest.approx(b.center.x, abs=1e-4)
    assert a.difficulty == b.difficulty


def test_database_persistence(tmp_path, scenes):
    db = la.build_database(scenes, min_points=1)
    la.save_database(db, tmp_path / "db")
    loaded = la.load_database(tmp_path / "db")
    assert len(loaded) == len(db)
    assert loaded.provenance == db.provenance
