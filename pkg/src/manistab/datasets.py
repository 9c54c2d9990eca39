"""Synthetic sphere-versus-torus point-cloud classification data."""

from __future__ import annotations

from typing import List, NamedTuple

import numpy as np
from scipy.spatial.transform import Rotation

from .geometry import PointCloud, sample_manifold
from .graph import DenseOperator, build_graph, laplacian
from .mnn import Sample
from .spectral import SpectralDecomposition, eigendecompose

SPHERE_LABEL = 1
TORUS_LABEL = 0


class ShapeItem(NamedTuple):
    cloud: PointCloud
    op: DenseOperator
    dec: SpectralDecomposition
    label: int

    @property
    def sample(self) -> Sample:
        return Sample(self.dec, self.cloud.points, self.label)


def graph_of(cloud: PointCloud, alpha_kernel: float = 1.0):
    """Laplacian of the dense kernel graph and its decomposition."""
    op = laplacian(build_graph(cloud, alpha_kernel))
    return op, eigendecompose(op)


def make_shape_dataset(count: int, n: int = 300, seed: int = 0, alpha_kernel: float = 1.0) -> List[ShapeItem]:
    """Alternating spheres (label 1) and tori (label 0).

    Every cloud is rotated by a uniformly random rotation and scaled by a
    factor drawn from [0.9, 1.1]; the result is tagged ``external`` with
    intrinsic dimension 2.
    """
    ss = np.random.SeedSequence(int(seed))
    items = []
    for j, child in enumerate(ss.spawn(int(count))):
        s_sample, s_rot = child.generate_state(2, dtype=np.uint64)
        kind = "sphere2" if j % 2 == 0 else "torus2"
        base = sample_manifold(kind, n, int(s_sample))
        rng = np.random.default_rng(int(s_rot))
        rot = Rotation.random(random_state=rng)
        scale = rng.uniform(0.9, 1.1)
        pts = scale * rot.apply(base.points)
        cloud = PointCloud(pts, "external", 2, int(s_sample))
        op, dec = graph_of(cloud, alpha_kernel)
        items.append(ShapeItem(cloud, op, dec, SPHERE_LABEL if kind == "sphere2" else TORUS_LABEL))
    return items
