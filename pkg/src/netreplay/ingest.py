"""Measurement-stream ingestion, normalization and checkpoint scheduling.

Raw traces arrive as text lines ``<time> <src> <dst>`` sorted by time.
Normalization keeps only the first discovery of each undirected link, turns
loops into bare node discoveries, and maps opaque endpoint tokens to dense
integer indices in order of first appearance. The result is an
:class:`ArrivalStream`, the canonical replay input for everything downstream.

A checkpoint is the graph observed "as soon as the k-th node was discovered".
Because a single link can reveal two nodes at once, a checkpoint may overshoot
its target by one; the actual count is recorded. ``replay_to`` locates the
stream position for a target count, and ``checkpoint_sizes`` produces the
standard schedule of target counts (percent-style steps of the final size).
"""

from __future__ import annotations

import gzip
import os
import struct
from dataclasses import dataclass, field
from typing import Iterable, Iterator, Optional

import numpy as np

CACHE_MAGIC = b"NRSTRM01"

# Cached streams store one row per surviving event: links as (u, v, t) with
# u != v, bare node discoveries as (x, x, t).
_CACHE_ROW = np.dtype([("u", "<u4"), ("v", "<u4"), ("t", "<u8")])

_MAX_NODE = 2**31 - 1


class StreamFormatError(ValueError):
    """An input line violates the stream format."""


@dataclass(frozen=True)
class RawEvent:
    """One trace line: a timestamped, possibly redundant link observation."""

    time: int
    src: str
    dst: str


@dataclass(frozen=True)
class FormatOptions:
    """Parse-time switches for nonstandard trace layouts."""

    no_time: bool = False  # lines are `<src> <dst>`; synthesize 0,1,2,...


@dataclass(frozen=True)
class ArrivalStream:
    """Normalized link arrivals plus enough bookkeeping to replay them.

    ``u``, ``v``, ``time`` are parallel arrays, one entry per surviving link
    event. ``node_count_prefix[i]`` is the number of distinct nodes discovered
    once event i and any node-only discoveries that precede event i+1 (or the
    end of the trace) are consumed; it is non-decreasing and ends at
    ``final_n``. Nodes discovered only by loops never appear as endpoints but
    are counted.
    """

    u: np.ndarray
    v: np.ndarray
    time: np.ndarray
    node_count_prefix: np.ndarray
    final_n: int
    final_m: int

    def __post_init__(self):
        for a in (self.u, self.v, self.time, self.node_count_prefix):
            a.setflags(write=False)

    @property
    def n_events(self) -> int:
        return int(self.u.size)

    def events(self) -> Iterator[tuple[int, int, int]]:
        """Yield (u, v, time) per link event."""
        for i in range(self.u.size):
            yield int(self.u[i]), int(self.v[i]), int(self.time[i])

    def to_events(self) -> list[RawEvent]:
        """Render back to a raw event list that normalizes to this stream.

        Links come out as first discoveries; nodes discovered by loops come
        out as loop events placed to preserve discovery order. Indices are
        rendered as decimal tokens.
        """
        ru, rv, rt = rendered_rows(self)
        return [RawEvent(int(t), str(int(a)), str(int(b))) for a, b, t in zip(ru, rv, rt)]


def open_event_file(path: str):
    """Open a trace for reading, transparently decompressing ``.gz``."""
    if path.endswith(".gz"):
        return gzip.open(path, "rt", encoding="utf-8")
    return open(path, "r", encoding="utf-8")


def parse_event_stream(
    reader: Iterable[str], options: FormatOptions = FormatOptions()
) -> Iterator[RawEvent]:
    """Parse trace lines into events, validating order as we go.

    Blank lines and lines starting with ``#`` are skipped. Malformed lines
    and timestamp regressions raise StreamFormatError with the 1-based line
    number. Timestamps must be non-negative integers.
    """
    last_time = None
    synthetic = 0
    for lineno, line in enumerate(reader, start=1):
        stripped = line.strip()
        if not stripped or stripped.startswith("#"):
            continue
        parts = stripped.split()
        if options.no_time:
            if len(parts) != 2:
                raise StreamFormatError(f"malformed line {lineno}: expected '<src> <dst>'")
            t = synthetic
            synthetic += 1
            src, dst = parts
        else:
            if len(parts) != 3:
                raise StreamFormatError(
                    f"malformed line {lineno}: expected '<time> <src> <dst>'"
                )
            try:
                t = int(parts[0])
            except ValueError:
                raise StreamFormatError(
                    f"malformed line {lineno}: bad timestamp {parts[0]!r}"
                ) from None
            if t < 0:
                raise StreamFormatError(f"malformed line {lineno}: negative timestamp")
            src, dst = parts[1], parts[2]
        if last_time is not None and t < last_time:
            raise StreamFormatError(f"timestamp decreases at line {lineno}")
        last_time = t
        yield RawEvent(t, src, dst)


def normalize(events: Iterable[RawEvent]) -> ArrivalStream:
    """Deduplicate links, strip loops, and index nodes by first appearance.

    A link (a, b) survives only on its first observation in either direction.
    A loop (a, a) is dropped as a link but still discovers node a. Every
    distinct endpoint token becomes the next free index the first time it is
    seen in any event.
    """
    index: dict[str, int] = {}
    seen: set[int] = set()  # packed unordered pairs of surviving links
    us: list[int] = []
    vs: list[int] = []
    ts: list[int] = []
    prefix: list[int] = []

    for ev in events:
        count_before = len(index)
        iu = index.setdefault(ev.src, count_before)
        if ev.src == ev.dst:
            continue
        iv = index.setdefault(ev.dst, len(index))
        if iu <= iv:
            key = (iu << 31) | iv
        else:
            key = (iv << 31) | iu
        if key in seen:
            continue
        seen.add(key)
        if us:
            prefix.append(count_before)
        us.append(iu)
        vs.append(iv)
        ts.append(ev.time)

    final_n = len(index)
    if final_n > _MAX_NODE:
        raise ValueError(f"too many nodes for 32-bit indices: {final_n}")
    if us:
        prefix.append(final_n)
    return ArrivalStream(
        u=np.asarray(us, dtype=np.int32),
        v=np.asarray(vs, dtype=np.int32),
        time=np.asarray(ts, dtype=np.uint64),
        node_count_prefix=np.asarray(prefix, dtype=np.int64),
        final_n=final_n,
        final_m=len(us),
    )


def leading_discoveries(stream: ArrivalStream) -> int:
    """Nodes discovered before the first link.

    The first link can introduce at most its own endpoints, and only as
    consecutive indices with the source lower; every other index below its
    top endpoint must have been discovered beforehand. Requires final_m >= 1.
    """
    u0 = int(stream.u[0])
    v0 = int(stream.v[0])
    hi0 = u0 if u0 > v0 else v0
    return hi0 - 1 if v0 == u0 + 1 else hi0


def rendered_rows(stream: ArrivalStream) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Flatten a stream to rows where loop rows (x, x, t) mark node-only
    discoveries, ordered so discovery order equals index order and a linear
    replay reproduces the stream exactly."""
    m = stream.final_m
    n = stream.final_n
    if m == 0:
        idx = np.arange(n, dtype=np.int64)
        return idx, idx.copy(), np.zeros(n, dtype=np.uint64)

    u = stream.u.astype(np.int64)
    v = stream.v.astype(np.int64)
    t = stream.time
    prefix = stream.node_count_prefix
    hi = np.maximum(u, v)
    leading = leading_discoveries(stream)
    prev = np.concatenate(([leading], prefix[:-1]))
    count_after_link = np.maximum(prev, hi + 1)
    posts = prefix - count_after_link  # node-only discoveries after link i
    if posts.size and int(posts.min()) < 0:
        raise ValueError("stream is not in first-appearance order")

    tail_total = int(posts.sum())
    if tail_total:
        ends = np.cumsum(posts)
        tail_vals = (
            np.arange(tail_total, dtype=np.int64)
            - np.repeat(ends - posts, posts)
            + np.repeat(count_after_link, posts)
        )
    else:
        tail_vals = np.empty(0, dtype=np.int64)
    loop_vals = np.concatenate((np.arange(leading, dtype=np.int64), tail_vals))

    total = m + leading + tail_total
    shift = np.concatenate(([0], np.cumsum(posts[:-1])))
    link_pos = leading + np.arange(m, dtype=np.int64) + shift
    ru = np.empty(total, dtype=np.int64)
    rv = np.empty(total, dtype=np.int64)
    rt = np.empty(total, dtype=np.uint64)
    ru[link_pos] = u
    rv[link_pos] = v
    rt[link_pos] = t
    loop_mask = np.ones(total, dtype=bool)
    loop_mask[link_pos] = False
    loop_slots = np.nonzero(loop_mask)[0]
    ru[loop_slots] = loop_vals
    rv[loop_slots] = loop_vals
    loop_times = np.concatenate(
        (np.full(leading, t[0], dtype=np.uint64), np.repeat(t, posts))
    )
    rt[loop_slots] = loop_times
    return ru, rv, rt


def checkpoint_node_count(stream: ArrivalStream, position: int, target_n: int) -> int:
    """Distinct nodes actually present at a checkpoint boundary.

    ``position`` is the replay position returned by :func:`replay_to` for
    ``target_n``. If the boundary link revealed two nodes at once the count
    overshoots the target by one; if the target was reached by a node-only
    discovery between links it is met exactly.
    """
    if position == 0:
        return target_n
    prefix = stream.node_count_prefix
    before = int(prefix[position - 2]) if position >= 2 else 0
    at_link = max(before, int(stream.u[position - 1]) + 1, int(stream.v[position - 1]) + 1)
    return max(at_link, target_n)


def replay_to(stream: ArrivalStream, cursor: int, target_n: int) -> int:
    """Smallest position whose consumed prefix has at least ``target_n`` nodes.

    Positions count link events; ``cursor`` is the already-consumed position
    and the result never moves backwards. Raises ValueError if the stream
    never reaches ``target_n`` nodes.
    """
    if target_n > stream.final_n:
        raise ValueError(f"stream has {stream.final_n} nodes, cannot reach {target_n}")
    if target_n <= 0:
        return cursor
    if stream.final_m == 0:
        return cursor
    if target_n <= leading_discoveries(stream):
        return cursor  # reached by node-only discoveries before any link
    pos = int(np.searchsorted(stream.node_count_prefix, target_n, side="left")) + 1
    return max(pos, cursor)


@dataclass(frozen=True)
class CheckpointSchedule:
    """Target node counts for a replay, deduplicated and ending at final_n."""

    sizes: tuple[int, ...]
    nominal_count: int
    final_n: int


def checkpoint_sizes(final_n: int, nominal_count: int = 100) -> CheckpointSchedule:
    """Evenly spaced target sizes i*final_n/nominal_count, rounded half up.

    Duplicates collapse and zero-size targets drop, so tiny streams get fewer
    checkpoints than nominal. The last target is always final_n.
    """
    if final_n < 1:
        raise ValueError("final_n must be at least 1")
    if nominal_count < 1:
        raise ValueError("nominal_count must be at least 1")
    sizes = []
    for i in range(1, nominal_count + 1):
        s = (2 * i * final_n + nominal_count) // (2 * nominal_count)
        if s > 0 and (not sizes or s != sizes[-1]):
            sizes.append(s)
    if sizes[-1] != final_n:  # guard; the i = nominal term lands exactly
        sizes.append(final_n)
    return CheckpointSchedule(sizes=tuple(sizes), nominal_count=nominal_count, final_n=final_n)


def save_cache(stream: ArrivalStream, path: str) -> None:
    """Write the binary sidecar for a normalized stream.

    Layout: 8-byte magic, three little-endian u64 counts (rows, final_n,
    final_m), then one 16-byte row per event. Written atomically.
    """
    ru, rv, rt = rendered_rows(stream)
    rows = np.empty(ru.size, dtype=_CACHE_ROW)
    rows["u"] = ru
    rows["v"] = rv
    rows["t"] = rt
    tmp = path + ".tmp"
    with open(tmp, "wb") as f:
        f.write(CACHE_MAGIC)
        f.write(struct.pack("<QQQ", rows.size, stream.final_n, stream.final_m))
        f.write(rows.tobytes())
    os.replace(tmp, path)


def load_cache(path: str) -> ArrivalStream:
    """Load a sidecar written by :func:`save_cache`.

    One linear pass reconstructs the node-count prefix; no deduplication is
    repeated. Raises ValueError on any structural mismatch.
    """
    with open(path, "rb") as f:
        magic = f.read(8)
        if magic != CACHE_MAGIC:
            raise ValueError(f"not a stream cache: {path}")
        header = f.read(24)
        if len(header) != 24:
            raise ValueError(f"truncated cache header: {path}")
        n_rows, final_n, final_m = struct.unpack("<QQQ", header)
        payload = f.read()
    if len(payload) != n_rows * _CACHE_ROW.itemsize:
        raise ValueError(f"truncated cache payload: {path}")
    rows = np.frombuffer(payload, dtype=_CACHE_ROW)

    if n_rows == 0:
        if final_n != 0 or final_m != 0:
            raise ValueError("cache header inconsistent with empty payload")
        return ArrivalStream(
            u=np.empty(0, dtype=np.int32),
            v=np.empty(0, dtype=np.int32),
            time=np.empty(0, dtype=np.uint64),
            node_count_prefix=np.empty(0, dtype=np.int64),
            final_n=0,
            final_m=0,
        )

    ru = rows["u"].astype(np.int64)
    rv = rows["v"].astype(np.int64)
    rt = rows["t"]
    if np.any(np.diff(rt.astype(np.int64)) < 0):
        raise ValueError("cache rows out of time order")
    count_at_row = np.maximum.accumulate(np.maximum(ru, rv) + 1)
    if int(count_at_row[-1]) != final_n:
        raise ValueError("cache node count mismatch")
    link_rows = np.nonzero(ru != rv)[0]
    if link_rows.size != final_m:
        raise ValueError("cache link count mismatch")
    if link_rows.size:
        boundary = np.concatenate((link_rows[1:], [len(rows)])) - 1
        prefix = count_at_row[boundary].astype(np.int64)
    else:
        prefix = np.empty(0, dtype=np.int64)
    return ArrivalStream(
        u=ru[link_rows].astype(np.int32),
        v=rv[link_rows].astype(np.int32),
        time=rt[link_rows].astype(np.uint64),
        node_count_prefix=prefix,
        final_n=int(final_n),
        final_m=int(final_m),
    )
