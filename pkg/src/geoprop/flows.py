"""Trip ingestion and aggregation into zone-level origin-destination flows."""

from __future__ import annotations

import csv
from dataclasses import dataclass, field
from pathlib import Path
from typing import Sequence

from .errors import EmptyFlowMatrixError, InputError
from .geo import GeoPoint, PlanarPoint, Point
from .zones import Zone, assign_zone, zones_by_id


@dataclass(frozen=True)
class TripRecord:
    """One trip; endpoints are coordinates or zone ids."""

    origin: Point | str
    destination: Point | str
    timestamp: str | None = None


@dataclass
class FlowDiagnostics:
    total_trips: int = 0
    unresolved_trips: int = 0
    self_loop_trips: int = 0
    below_min_flow_pairs: int = 0
    kept_trips: int = 0


@dataclass(frozen=True)
class FlowMatrix:
    """Sparse OD counts keyed by (origin zone id, destination zone id).

    Invariants: no self pairs, every count >= the min_flow used to build it.
    """

    flows: dict[tuple[str, str], int]
    diagnostics: FlowDiagnostics = field(default_factory=FlowDiagnostics)

    def total(self) -> int:
        return sum(self.flows.values())


def _resolve(endpoint: Point | str, zones: Sequence[Zone], by_id: dict[str, Zone]) -> str | None:
    if isinstance(endpoint, str):
        return endpoint if endpoint in by_id else None
    return assign_zone(endpoint, zones)


def aggregate_flows(trips: Sequence[TripRecord], zones: Sequence[Zone], min_flow: int = 1) -> FlowMatrix:
    """Tally trips into ordered zone-pair counts.

    Self loops are removed, pairs with fewer than min_flow trips are
    dropped, and trips whose endpoints resolve to no zone are skipped and
    reported in the diagnostics. Raises EmptyFlowMatrixError when nothing
    survives.
    """
    if min_flow < 1:
        raise InputError(f"min_flow must be >= 1, got {min_flow}")
    by_id = zones_by_id(zones)
    diag = FlowDiagnostics(total_trips=len(trips))
    counts: dict[tuple[str, str], int] = {}
    for trip in trips:
        o = _resolve(trip.origin, zones, by_id)
        d = _resolve(trip.destination, zones, by_id)
        if o is None or d is None:
            diag.unresolved_trips += 1
            continue
        if o == d:
            diag.self_loop_trips += 1
            continue
        counts[(o, d)] = counts.get((o, d), 0) + 1
    kept: dict[tuple[str, str], int] = {}
    for pair, count in counts.items():
        if count < min_flow:
            diag.below_min_flow_pairs += 1
        else:
            kept[pair] = count
    diag.kept_trips = sum(kept.values())
    if not kept:
        raise EmptyFlowMatrixError(
            f"empty flow matrix: {len(trips)} trips left no OD pair with count >= {min_flow}"
        )
    return FlowMatrix(flows=kept, diagnostics=diag)


def load_trips_csv(path: str | Path, planar: bool = False) -> list[TripRecord]:
    """Read trips from CSV with header o_lon,o_lat,d_lon,d_lat[,timestamp]."""
    path = Path(path)
    trips: list[TripRecord] = []
    with path.open(newline="") as fh:
        reader = csv.reader(fh)
        try:
            header = next(reader)
        except StopIteration:
            raise InputError(f"{path}: empty trips file") from None
        if header[:4] != ["o_lon", "o_lat", "d_lon", "d_lat"]:
            raise InputError(f"{path}: expected header o_lon,o_lat,d_lon,d_lat[,timestamp]")
        has_ts = len(header) > 4 and header[4] == "timestamp"
        make = PlanarPoint if planar else GeoPoint
        for lineno, row in enumerate(reader, start=2):
            if not row:
                continue
            try:
                origin = make(float(row[0]), float(row[1]))
                destination = make(float(row[2]), float(row[3]))
            except (ValueError, IndexError) as exc:
                raise InputError(f"{path}:{lineno}: {exc}") from None
            ts = row[4] if has_ts and len(row) > 4 and row[4] else None
            trips.append(TripRecord(origin=origin, destination=destination, timestamp=ts))
    return trips


def load_flow_matrix_csv(path: str | Path, min_flow: int = 1) -> FlowMatrix:
    """Read pre-aggregated flows from CSV with header o_id,d_id,count.

    Applies the same cleaning as aggregate_flows: self pairs are dropped
    and counts below min_flow are discarded.
    """
    if min_flow < 1:
        raise InputError(f"min_flow must be >= 1, got {min_flow}")
    path = Path(path)
    raw: dict[tuple[str, str], int] = {}
    diag = FlowDiagnostics()
    with path.open(newline="") as fh:
        reader = csv.reader(fh)
        try:
            header = next(reader)
        except StopIteration:
            raise InputError(f"{path}: empty flows file") from None
        if header[:3] != ["o_id", "d_id", "count"]:
            raise InputError(f"{path}: expected header o_id,d_id,count")
        for lineno, row in enumerate(reader, start=2):
            if not row:
                continue
            try:
                count = int(row[2])
            except (ValueError, IndexError):
                raise InputError(f"{path}:{lineno}: bad count") from None
            if count < 0:
                raise InputError(f"{path}:{lineno}: negative count")
            diag.total_trips += count
            pair = (row[0], row[1])
            if pair[0] == pair[1]:
                diag.self_loop_trips += count
                continue
            raw[pair] = raw.get(pair, 0) + count
    kept: dict[tuple[str, str], int] = {}
    for pair, count in raw.items():
        if count < min_flow:
            diag.below_min_flow_pairs += 1
        else:
            kept[pair] = count
    diag.kept_trips = sum(kept.values())
    if not kept:
        raise EmptyFlowMatrixError(f"empty flow matrix: no OD pair in {path} has count >= {min_flow}")
    return FlowMatrix(flows=kept, diagnostics=diag)
