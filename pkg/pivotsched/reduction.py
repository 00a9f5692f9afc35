# encoding: utf-8
# This file is part of pivotsched.
#
# Copyright 2026 The pivotsched developers.
#
# pivotsched is free software: you can redistribute it and/or modify
# it under the terms of the GNU Lesser General Public License version 3,
# as published by the Free Software Foundation.
#
# pivotsched is distributed in the hope that it will be useful,
# but WITHOUT ANY WARRANTY; without even the implied warranty of
# MERCHANTABILITY or FITNESS FOR A PARTICULAR PURPOSE.  See the
# GNU Lesser General Public License for more details.
#
# You should have received a copy of the GNU Lesser General Public License
# along with pivotsched.  If not, see <http://www.gnu.org/licenses/>.

"""
Structure-preserving model reduction.

Nodes whose simulated head trajectories are close to each other are grouped
by agglomerative clustering. Every cluster becomes one reduced state, the
projection matrix maps a reduced state to the same head on every node of its
cluster (up to a normalizing weight), so bounds on physical nodes remain
bounds on reduced states.

The reduced model evaluates the full right-hand side on the lifted state and
projects it back, ``d xi / dt = U^T f(U xi, u, d)``.
"""

import collections
import logging

import numpy as np
import pandas as pd
from scipy.spatial.distance import pdist
from scipy.spatial.distance import squareform

from pivotsched import storage
from pivotsched.errors import ConsistencyError
from pivotsched.errors import ParameterError
from pivotsched.errors import ShapeError
from pivotsched.errors import ValidationError
from pivotsched.field import Evaluation
from pivotsched.field import ExplicitModel
from pivotsched.field import Trajectory
from pivotsched.field import check_finite

__all__ = (
    'Clustering',
    'ProjectionMatrix',
    'ReducedModel',
    'SnapshotMatrix',
    'build_projection',
    'cluster_states',
    'collect_snapshots',
    'compare_models',
    'load_projection',
    'model_mse',
    'save_projection',
    'sweep_thresholds',
)


_logger = logging.getLogger("pivotsched.reduction")


class SnapshotMatrix(collections.namedtuple('SnapshotMatrix', 'matrix times')):

    """
    State trajectories, one row per node and one column per sample.

    :attr matrix: array of shape ``(n, N)``
    :attr times: sample times [s], length N
    """

    __slots__ = ()

    def __new__(cls, matrix, times):
        matrix = np.array(matrix, dtype=float)
        times = np.array(times, dtype=float).ravel()
        if matrix.ndim != 2 or matrix.shape[1] < 2:
            raise ShapeError("snapshot matrix needs at least two samples")
        if times.size != matrix.shape[1]:
            raise ShapeError("{} sample times for {} columns".format(
                times.size, matrix.shape[1]))
        check_finite(matrix)
        return super(SnapshotMatrix, cls).__new__(cls, matrix, times)


def collect_snapshots(model, x0, schedule, weather, horizon, dt_sample):
    """
    Simulate a model and collect its sampled states.

    :returns:
        :class:`SnapshotMatrix` with ``horizon / dt_sample + 1`` columns
    """
    trajectory = model.simulate(x0, schedule, weather, horizon, dt_sample)
    _logger.info("Collected %d snapshot(s) of %d states",
                 len(trajectory.times), trajectory.states.shape[1])
    return SnapshotMatrix(trajectory.states.T, trajectory.times)


class Clustering(object):

    """
    Partition of the node ids into clusters.

    Clusters are kept as sorted tuples of node ids and are ordered by their
    smallest node id.

    :attr clusters: tuple of clusters
    :attr threshold: linkage threshold that produced the partition, or None
    """

    def __init__(self, clusters, threshold=None):
        clusters = [tuple(sorted(int(node) for node in cluster))
                    for cluster in clusters]
        if any(not cluster for cluster in clusters):
            raise ConsistencyError("clusters must not be empty")
        self.clusters = tuple(sorted(clusters))
        self.threshold = threshold

    @classmethod
    def from_labels(cls, labels, threshold=None):
        """Create a clustering from a cluster label per node."""
        groups = collections.OrderedDict()
        for node, label in enumerate(labels):
            groups.setdefault(label, []).append(node)
        return cls(groups.values(), threshold)

    def __len__(self):
        return len(self.clusters)

    def __iter__(self):
        return iter(self.clusters)

    def __repr__(self):
        return "<Clustering r={} threshold={!r}>".format(
            len(self), self.threshold)

    @property
    def r(self):
        """Number of clusters."""
        return len(self.clusters)

    def labels(self, n):
        """
        Get the cluster index of every node.

        :raises ConsistencyError:
            If the clusters are not a partition of ``0 .. n-1``.
        """
        labels = np.full(n, -1)
        for index, cluster in enumerate(self.clusters):
            for node in cluster:
                if not 0 <= node < n:
                    raise ConsistencyError(
                        "node {} outside of 0..{}".format(node, n - 1))
                if labels[node] != -1:
                    raise ConsistencyError(
                        "node {} is in more than one cluster".format(node))
                labels[node] = index
        missing = np.flatnonzero(labels < 0)
        if missing.size:
            raise ConsistencyError("node {} is in no cluster".format(
                missing[0]))
        return labels


def cluster_states(snapshots, threshold, standardize=False):
    """
    Group state trajectories with average-linkage agglomeration.

    Rows are compared with the Euclidean distance. The two closest clusters
    are merged as long as their average distance does not exceed
    ``threshold``. Equal distances are resolved in favour of the pair with
    the smallest node ids.

    :param snapshots:
        :class:`SnapshotMatrix` or array with one row per state
    :param threshold:
        Largest linkage distance that still merges
    :param standardize:
        If True, every row is centered and scaled to unit variance first
    :returns:
        :class:`Clustering`
    """
    matrix = getattr(snapshots, 'matrix', snapshots)
    matrix = np.asarray(matrix, dtype=float)
    if matrix.ndim != 2 or matrix.shape[1] < 1 or matrix.shape[0] < 1:
        raise ShapeError("need a matrix with at least one sample per row")
    if not threshold > 0:
        raise ParameterError("threshold must be positive")
    if standardize:
        spread = matrix.std(axis=1, keepdims=True)
        matrix = (matrix - matrix.mean(axis=1, keepdims=True)) / np.where(
            spread > 0, spread, 1.0)
    n = matrix.shape[0]
    members = [[node] for node in range(n)]
    if n == 1:
        return Clustering(members, threshold)
    # Slot a holds the cluster whose smallest node id is a
    distance = squareform(pdist(matrix, 'euclidean'))
    np.fill_diagonal(distance, np.inf)
    sizes = np.ones(n)
    merges = 0
    while merges < n - 1:
        a, b = np.unravel_index(np.argmin(distance), distance.shape)
        if distance[a, b] > threshold:
            break
        a, b = min(a, b), max(a, b)
        merged = (sizes[a] * distance[a] + sizes[b] * distance[b]) / (
            sizes[a] + sizes[b])
        distance[a, :] = merged
        distance[:, a] = merged
        distance[b, :] = np.inf
        distance[:, b] = np.inf
        distance[a, a] = np.inf
        sizes[a] += sizes[b]
        members[a].extend(members[b])
        members[b] = []
        merges += 1
    clustering = Clustering([m for m in members if m], threshold)
    _logger.debug("Clustered %d states into %d at threshold %g",
                  n, clustering.r, threshold)
    return clustering


def sweep_thresholds(snapshots, thresholds, standardize=False):
    """Get the clustering of every threshold of a sweep."""
    return [cluster_states(snapshots, threshold, standardize)
            for threshold in thresholds]


class ProjectionMatrix(object):

    """
    Projection of full states onto cluster states.

    ``matrix[i, j]`` is ``1 / sqrt(|C_j|)`` when node ``i`` is in cluster
    ``j`` and zero otherwise, so the columns are orthonormal.

    :attr matrix: array of shape ``(n, r)``
    :attr labels: cluster index of every node
    """

    def __init__(self, matrix, labels):
        self.matrix = matrix
        self.labels = labels

    def __repr__(self):
        return "<ProjectionMatrix n={} r={}>".format(self.n, self.r)

    @property
    def n(self):
        """Number of full states."""
        return self.matrix.shape[0]

    @property
    def r(self):
        """Number of reduced states."""
        return self.matrix.shape[1]

    def clustering(self, threshold=None):
        """Get the :class:`Clustering` behind the projection."""
        return Clustering.from_labels(self.labels, threshold)

    def reduce_state(self, x):
        """Get ``xi = U^T x`` (or one reduced state per row of ``x``)."""
        x = np.asarray(x, dtype=float)
        if x.shape[-1] != self.n:
            raise ShapeError("state has {} entries, expected {}".format(
                x.shape[-1], self.n))
        return x.dot(self.matrix)

    def lift_state(self, xi):
        """Get ``x = U xi`` (or one lifted state per row of ``xi``)."""
        xi = np.asarray(xi, dtype=float)
        if xi.shape[-1] != self.r:
            raise ShapeError("reduced state has {} entries, expected {}"
                             .format(xi.shape[-1], self.r))
        return xi.dot(self.matrix.T)


def build_projection(clustering, n):
    """
    Build the projection matrix of a clustering of ``n`` states.

    :raises ConsistencyError:
        If the clustering is not a partition of ``0 .. n-1``.
    """
    labels = clustering.labels(n)
    sizes = np.bincount(labels, minlength=clustering.r)
    matrix = np.zeros((n, clustering.r))
    matrix[np.arange(n), labels] = 1.0 / np.sqrt(sizes[labels])
    return ProjectionMatrix(matrix, labels)


class ReducedModel(ExplicitModel):

    """
    Reduced-order model obtained by projecting a full model.

    The sub-step control of the full model is applied to the lifted state.

    :param full:
        :class:`~pivotsched.field.FieldModel`
    :param projection:
        :class:`ProjectionMatrix`
    """

    def __init__(self, full, projection):
        super(ReducedModel, self).__init__(full.dh_max, full.dt_min)
        if projection.n != full.n:
            raise ShapeError("projection has {} rows, model has {} states"
                             .format(projection.n, full.n))
        self.full = full
        self.projection = projection

    def __repr__(self):
        return "<ReducedModel r={} of {!r}>".format(self.r, self.full)

    @property
    def n(self):
        """Number of reduced states."""
        return self.projection.r

    r = n

    def lift(self, xi):
        """Get the lifted heads of a reduced state."""
        return self.projection.lift_state(xi)

    def reduce(self, x):
        """Get the reduced state of full heads."""
        return self.projection.reduce_state(x)

    def next_break(self, t, u):
        return self.full.next_break(t, u)

    def evaluate(self, xi, t, u, d):
        evaluation = self.full.evaluate(self.lift(xi), t, u, d)
        rate = self.projection.reduce_state(evaluation.rate)
        return Evaluation(rate, self.lift(rate), evaluation.storage_rate,
                          evaluation.dt_stable, evaluation.budget)

    def increment(self, xi, evaluation, dt):
        return self.reduce(self.full.increment(self.lift(xi), evaluation, dt))

    def reduced_rhs(self, xi, u, d, t):
        """Get ``U^T f(U xi, u, d)``."""
        return self.rhs(xi, u, d, t)

    def reduced_step(self, xi, u, d, t, dt):
        """Advance a reduced state with fixed rates and weather."""
        return self.step(xi, u, d, t, dt)

    def lift_trajectory(self, trajectory):
        """Get a copy of a reduced trajectory with lifted states."""
        return Trajectory(trajectory.times, self.lift(trajectory.states),
                          trajectory.balance)


def model_mse(full, lifted):
    """
    Get the mean squared head difference of two trajectories [m2].

    :param full, lifted:
        Arrays of the same shape, or :class:`~pivotsched.field.Trajectory`
    """
    full = np.asarray(getattr(full, 'states', full), dtype=float)
    lifted = np.asarray(getattr(lifted, 'states', lifted), dtype=float)
    if full.shape != lifted.shape:
        raise ShapeError("trajectories have shapes {} and {}".format(
            full.shape, lifted.shape))
    return float(np.mean((full - lifted) ** 2))


def compare_models(full, projection, x0, schedule, weather, horizon, dt_out):
    """
    Simulate the full and the reduced model from the same initial state.

    :returns:
        Triplet of the full trajectory, the lifted reduced trajectory and
        their :func:`model_mse`
    """
    reduced = ReducedModel(full, projection)
    reference = full.simulate(x0, schedule, weather, horizon, dt_out)
    approximation = reduced.lift_trajectory(reduced.simulate(
        projection.reduce_state(x0), schedule, weather, horizon, dt_out))
    return reference, approximation, model_mse(reference, approximation)


def save_projection(path, projection, threshold=None, provenance=()):
    """Save the cluster of every node as ``node_id, cluster_id``."""
    frame = pd.DataFrame({
        'node_id': np.arange(projection.n),
        'cluster_id': projection.labels,
    })
    meta = [('threshold', repr(threshold))] if threshold is not None else []
    storage.write_table(path, frame, list(provenance) + meta)


def load_projection(path):
    """
    Load a projection saved by :func:`save_projection`.

    :raises ValidationError:
        If node ids are not ``0 .. n-1`` in order.
    """
    frame = storage.read_table(path, required=('node_id', 'cluster_id'))
    nodes = storage.numeric_column(frame, 'node_id', path)
    labels = storage.numeric_column(frame, 'cluster_id', path)
    if not np.array_equal(nodes, np.arange(len(frame))):
        raise ValidationError("node ids must be 0..n-1 in order", path)
    clustering = Clustering.from_labels(labels.astype(int))
    return build_projection(clustering, len(frame))
