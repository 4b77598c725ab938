"""Deterministic, seedable LiDAR scene augmentation toolkit."""

from ._core import (
    Annotation,
    ConfigError,
    DataError,
    DatasetStats,
    Detection,
    Difficulty,
    Policy,
    PointCloud,
    SampleDatabase,
    Scene,
    SceneStats,
    Vec3,
    __version__,
    apply_policy,
    bev_iou,
    box_corners,
    build_database,
    dataset_stats,
    evaluate,
    flip_y,
    iou_3d,
    list_presets,
    load_database,
    load_policy,
    make_synthetic_dataset,
    points_in_box,
    read_scene,
    read_split,
    rotate_z,
    save_database,
    scale,
    scene_stats,
    translate,
    write_scene,
)

__all__ = [
    "Annotation",
    "ConfigError",
    "DataError",
    "DatasetStats",
    "Detection",
    "Difficulty",
    "Policy",
    "PointCloud",
    "SampleDatabase",
    "Scene",
    "SceneStats",
    "Vec3",
    "apply_policy",
    "bev_iou",
    "box_corners",
    "build_database",
    "dataset_stats",
    "evaluate",
    "flip_y",
    "iou_3d",
    "list_presets",
    "load_database",
    "load_policy",
    "make_synthetic_dataset",
    "points_in_box",
    "read_scene",
    "read_split",
    "rotate_z",
    "save_database",
    "scale",
    "scene_stats",
    "translate",
    "write_scene",
]
