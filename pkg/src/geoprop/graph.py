"""Distance-decayed weighted interaction graph over zones.

Edge weight is flow divided by centroid distance in meters, so nearby
high-flow zone pairs interact strongly. The graph is directed and carries
no self edges; node order is the zone ids sorted ascending, which makes
construction fully deterministic.
"""

from __future__ import annotations

import csv
from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterable, Sequence

import numpy as np

from .errors import DegenerateDistanceError, InputError
from .flows import FlowMatrix
from .zones import Zone, point_distance, zones_by_id


@dataclass(frozen=True)
class SpatialGraph:
    """Immutable directed weighted graph; treat all fields as read-only.

    zone_ids gives the node order (index -> id). zones carries the full
    Zone objects when the graph was built from them; graphs loaded from an
    edge-list file have zone_ids only. flow and distance_m are kept per
    edge for export and audit.
    """

    zone_ids: tuple[str, ...]
    edges: dict[tuple[int, int], float]
    zones: tuple[Zone, ...] | None = None
    flow: dict[tuple[int, int], int] = field(default_factory=dict)
    distance_m: dict[tuple[int, int], float] = field(default_factory=dict)

    @property
    def n_nodes(self) -> int:
        return len(self.zone_ids)

    def index_of(self, zone_id: str) -> int:
        try:
            return self.zone_ids.index(zone_id)
        except ValueError:
            raise KeyError(zone_id) from None

    def total_weight(self) -> float:
        return float(sum(self.edges.values()))


def build_graph(flows: FlowMatrix, zones: Sequence[Zone]) -> SpatialGraph:
    """Construct the graph with w(i, j) = flow(i, j) / distance(i, j).

    Every zone becomes a node (zones without flows are isolated). Distinct
    zones with coincident centroids on a flow pair are a hard error rather
    than a silent distance floor.
    """
    by_id = zones_by_id(zones)
    ordered = sorted(zones, key=lambda z: z.id)
    index = {z.id: k for k, z in enumerate(ordered)}
    edges: dict[tuple[int, int], float] = {}
    flow: dict[tuple[int, int], int] = {}
    dist: dict[tuple[int, int], float] = {}
    for (o, d), count in sorted(flows.flows.items()):
        if o not in by_id:
            raise InputError(f"flow references unknown zone id {o!r}")
        if d not in by_id:
            raise InputError(f"flow references unknown zone id {d!r}")
        if count <= 0:
            raise InputError(f"non-positive flow count for pair ({o!r}, {d!r})")
        d_ij = point_distance(by_id[o].centroid, by_id[d].centroid)
        if d_ij == 0.0:
            raise DegenerateDistanceError(f"zones {o!r} and {d!r} have coincident centroids")
        i, j = index[o], index[d]
        edges[(i, j)] = count / d_ij
        flow[(i, j)] = count
        dist[(i, j)] = d_ij
    return SpatialGraph(
        zone_ids=tuple(z.id for z in ordered),
        edges=edges,
        zones=tuple(ordered),
        flow=flow,
        distance_m=dist,
    )


EDGE_CSV_HEADER = ["i", "j", "flow", "distance_m", "weight"]


def save_edge_csv(graph: SpatialGraph, path: str | Path) -> None:
    """Write the edge list as i,j,flow,distance_m,weight with 12 significant digits."""
    if graph.flow.keys() != graph.edges.keys() or graph.distance_m.keys() != graph.edges.keys():
        raise InputError("graph lacks per-edge flow/distance data; cannot export")
    path = Path(path)
    with path.open("w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(EDGE_CSV_HEADER)
        for (i, j) in sorted(graph.edges):
            writer.writerow(
                [
                    graph.zone_ids[i],
                    graph.zone_ids[j],
                    graph.flow[(i, j)],
                    format(graph.distance_m[(i, j)], ".12g"),
                    format(graph.edges[(i, j)], ".12g"),
                ]
            )


def load_graph_csv(path: str | Path, zones: Sequence[Zone] | None = None) -> SpatialGraph:
    """Read an edge list written by save_edge_csv.

    The node set is the ids appearing in the file, extended with any extra
    zones passed in (those become isolated nodes, matching a build from the
    full zone set).
    """
    path = Path(path)
    rows: list[tuple[str, str, int, float, float]] = []
    with path.open(newline="") as fh:
        reader = csv.reader(fh)
        try:
            header = next(reader)
        except StopIteration:
            raise InputError(f"{path}: empty graph file") from None
        if header != EDGE_CSV_HEADER:
            raise InputError(f"{path}: expected header {','.join(EDGE_CSV_HEADER)}")
        for lineno, row in enumerate(reader, start=2):
            if not row:
                continue
            try:
                rows.append((row[0], row[1], int(row[2]), float(row[3]), float(row[4])))
            except (ValueError, IndexError):
                raise InputError(f"{path}:{lineno}: malformed edge row") from None
    ids = {r[0] for r in rows} | {r[1] for r in rows}
    zone_tuple: tuple[Zone, ...] | None = None
    if zones is not None:
        by_id = zones_by_id(zones)
        missing = ids - set(by_id)
        if missing:
            raise InputError(f"graph references zone ids absent from the zone set: {sorted(missing)[:5]}")
        ordered = sorted(zones, key=lambda z: z.id)
        zone_tuple = tuple(ordered)
        zone_ids = tuple(z.id for z in ordered)
    else:
        zone_ids = tuple(sorted(ids))
    index = {zid: k for k, zid in enumerate(zone_ids)}
    edges: dict[tuple[int, int], float] = {}
    flow: dict[tuple[int, int], int] = {}
    dist: dict[tuple[int, int], float] = {}
    for o, d, f, d_m, w in rows:
        if o == d:
            raise InputError(f"{path}: self edge on {o!r}")
        if w <= 0.0 or not np.isfinite(w):
            raise InputError(f"{path}: non-positive or non-finite weight on ({o!r}, {d!r})")
        i, j = index[o], index[d]
        if (i, j) in edges:
            raise InputError(f"{path}: duplicate edge ({o!r}, {d!r})")
        edges[(i, j)] = w
        flow[(i, j)] = f
        dist[(i, j)] = d_m
    return SpatialGraph(zone_ids=zone_ids, edges=edges, zones=zone_tuple, flow=flow, distance_m=dist)


def neighbor_arrays(
    graph: SpatialGraph, mode: str = "symmetrized"
) -> tuple[list[np.ndarray], list[np.ndarray]]:
    """Per-node neighbor index and weight arrays for a propagation run.

    symmetrized: neighbors under either direction, weight w_ij + w_ji.
    in-edges: nodes j with an edge j -> i, weight w_ji.
    out-edges: nodes j with an edge i -> j, weight w_ij.
    Neighbor order is ascending node index, so runs are reproducible.
    """
    n = graph.n_nodes
    acc: list[dict[int, float]] = [dict() for _ in range(n)]
    if mode == "symmetrized":
        for (i, j), w in graph.edges.items():
            acc[i][j] = acc[i].get(j, 0.0) + w
            acc[j][i] = acc[j].get(i, 0.0) + w
    elif mode == "in-edges":
        for (i, j), w in graph.edges.items():
            acc[j][i] = w
    elif mode == "out-edges":
        for (i, j), w in graph.edges.items():
            acc[i][j] = w
    else:
        raise InputError(f"unknown neighbor mode {mode!r}")
    nbrs: list[np.ndarray] = []
    wts: list[np.ndarray] = []
    for i in range(n):
        order = sorted(acc[i])
        nbrs.append(np.asarray(order, dtype=np.int64))
        wts.append(np.asarray([acc[i][j] for j in order], dtype=np.float64))
    return nbrs, wts
