"""Overlapping community covers: assembly, validation, and export."""

from __future__ import annotations

import csv
import json
from dataclasses import dataclass
from pathlib import Path
from typing import Mapping, Sequence

import numpy as np

from .errors import InputError
from .zones import Zone


@dataclass(frozen=True)
class Cover:
    """Mutually inverse community -> zones and zone -> communities mappings.

    A zone is overlapping when it belongs to two or more communities.
    origin_labels records, per dense community id, the propagation label
    (node index) the community came from, when applicable.
    """

    communities: dict[int, frozenset[str]]
    memberships: dict[str, frozenset[int]]
    origin_labels: dict[int, int] | None = None

    @property
    def n_communities(self) -> int:
        return len(self.communities)

    @property
    def zone_ids(self) -> tuple[str, ...]:
        return tuple(sorted(self.memberships))

    @property
    def overlapping(self) -> tuple[str, ...]:
        return tuple(sorted(z for z, cs in self.memberships.items() if len(cs) >= 2))

    def validate(self) -> None:
        for c, members in self.communities.items():
            if not members:
                raise ValueError(f"community {c} is empty")
            for z in members:
                if c not in self.memberships.get(z, frozenset()):
                    raise ValueError(f"mappings are not mutual inverses at ({c}, {z!r})")
        for z, cs in self.memberships.items():
            if not cs:
                raise ValueError(f"zone {z!r} has no membership")
            for c in cs:
                if z not in self.communities.get(c, frozenset()):
                    raise ValueError(f"mappings are not mutual inverses at ({c}, {z!r})")


def build_cover(retained: Sequence[set[int]], zone_ids: Sequence[str]) -> Cover:
    """Assemble the cover from per-node retained label sets.

    Community ids are renumbered densely, largest community first and ties
    by ascending original label; the original labels are preserved in
    origin_labels.
    """
    if len(retained) != len(zone_ids):
        raise ValueError("retained sets and zone ids differ in length")
    by_label: dict[int, set[str]] = {}
    for node, labels in enumerate(retained):
        if not labels:
            raise ValueError(f"node {node} has no retained label")
        for l in labels:
            by_label.setdefault(int(l), set()).add(zone_ids[node])
    order = sorted(by_label, key=lambda l: (-len(by_label[l]), l))
    communities = {dense: frozenset(by_label[l]) for dense, l in enumerate(order)}
    origin_labels = {dense: l for dense, l in enumerate(order)}
    memberships: dict[str, set[int]] = {z: set() for z in zone_ids}
    for dense, members in communities.items():
        for z in members:
            memberships[z].add(dense)
    return Cover(
        communities=communities,
        memberships={z: frozenset(cs) for z, cs in memberships.items()},
        origin_labels=origin_labels,
    )


def cover_from_memberships(memberships: Mapping[str, set[int] | frozenset[int]]) -> Cover:
    """Build a cover from zone -> community-ids, keeping the given ids."""
    communities: dict[int, set[str]] = {}
    for z, cs in memberships.items():
        if not cs:
            raise ValueError(f"zone {z!r} has no membership")
        for c in cs:
            communities.setdefault(int(c), set()).add(z)
    return Cover(
        communities={c: frozenset(m) for c, m in communities.items()},
        memberships={z: frozenset(int(c) for c in cs) for z, cs in memberships.items()},
    )


def shuffled_cover(cover: Cover, rng: np.random.Generator) -> Cover:
    """Random permutation of zone identities; preserves every size statistic."""
    ids = sorted(cover.memberships)
    perm = rng.permutation(len(ids))
    relabel = {ids[k]: ids[int(perm[k])] for k in range(len(ids))}
    return Cover(
        communities={c: frozenset(relabel[z] for z in m) for c, m in cover.communities.items()},
        memberships={relabel[z]: cs for z, cs in cover.memberships.items()},
        origin_labels=cover.origin_labels,
    )


def cover_to_csv(cover: Cover, path: str | Path) -> None:
    """One row per membership: zone_id,community_id, sorted for reproducibility."""
    with Path(path).open("w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["zone_id", "community_id"])
        for z in sorted(cover.memberships):
            for c in sorted(cover.memberships[z]):
                writer.writerow([z, c])


def load_cover_csv(path: str | Path) -> Cover:
    memberships: dict[str, set[int]] = {}
    with Path(path).open(newline="") as fh:
        reader = csv.reader(fh)
        header = next(reader, None)
        if header != ["zone_id", "community_id"]:
            raise InputError(f"{path}: expected header zone_id,community_id")
        for row in reader:
            if not row:
                continue
            memberships.setdefault(row[0], set()).add(int(row[1]))
    if not memberships:
        raise InputError(f"{path}: empty cover file")
    return cover_from_memberships(memberships)


def cover_to_json_dict(cover: Cover) -> dict:
    out = {
        "communities": {str(c): sorted(m) for c, m in cover.communities.items()},
        "overlapping": list(cover.overlapping),
    }
    if cover.origin_labels is not None:
        out["origin_labels"] = {str(c): l for c, l in cover.origin_labels.items()}
    return out


def cover_to_json(cover: Cover, path: str | Path) -> None:
    Path(path).write_text(json.dumps(cover_to_json_dict(cover), indent=2, sort_keys=True) + "\n")


def load_cover_json(path: str | Path) -> Cover:
    data = json.loads(Path(path).read_text())
    memberships: dict[str, set[int]] = {}
    for c, members in data.get("communities", {}).items():
        for z in members:
            memberships.setdefault(str(z), set()).add(int(c))
    if not memberships:
        raise InputError(f"{path}: empty cover file")
    return cover_from_memberships(memberships)


def cover_to_geojson(cover: Cover, zones: Sequence[Zone], path: str | Path) -> None:
    """Polygon features with `communities` and `is_overlap` properties.

    Requires every zone in the cover to carry a polygon.
    """
    by_id = {z.id: z for z in zones}
    overlap = set(cover.overlapping)
    features = []
    for zid in sorted(cover.memberships):
        zone = by_id.get(zid)
        if zone is None or zone.polygon is None:
            raise InputError(f"zone {zid!r} has no polygon; GeoJSON export needs polygon zones")
        ring = [list(p.xy) for p in zone.polygon]
        ring.append(list(zone.polygon[0].xy))
        features.append(
            {
                "type": "Feature",
                "geometry": {"type": "Polygon", "coordinates": [ring]},
                "properties": {
                    "id": zid,
                    "communities": sorted(cover.memberships[zid]),
                    "is_overlap": zid in overlap,
                },
            }
        )
    payload = {"type": "FeatureCollection", "features": features}
    Path(path).write_text(json.dumps(payload, indent=2, sort_keys=True) + "\n")
