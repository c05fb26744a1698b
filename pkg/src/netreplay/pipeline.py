"""Replay orchestration: one pass over the stream, statistics per checkpoint.

``run_evolution`` replays a normalized stream through a growing graph,
pausing at each scheduled node-count checkpoint to freeze a snapshot and
compute the enabled statistic groups. Connectivity is maintained
incrementally (links only ever merge components); everything else runs on the
frozen snapshot. Results come back as one EvolutionSeries per statistic and,
when an output directory is configured, land on disk as CSV files plus a
manifest, a gnuplot script, and a separate timing file.

Determinism: all sampling derives from the global seed and the checkpoint
index, never from global state, so a rerun with the same input and
configuration produces byte-identical outputs. Wall-clock timings, the one
legitimately nondeterministic product, are quarantined in timings.json.
"""

from __future__ import annotations

import dataclasses
import json
import os
import time as _time
from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from netreplay.connectivity import IncrementalComponents
from netreplay.degrees import (
    BasicStats,
    cumulative,
    degree_distribution,
    ks_statistic,
    stats_from_counts,
)
from netreplay.distances import (
    BoundConfig,
    DistanceReport,
    EstimatorConfig,
    diameter_bounds,
    estimate_average_distance,
)
from netreplay.graph import GrowingGraph, finalize_snapshot
from netreplay.ingest import (
    ArrivalStream,
    FormatOptions,
    checkpoint_node_count,
    checkpoint_sizes,
    load_cache,
    normalize,
    open_event_file,
    parse_event_stream,
    replay_to,
    save_cache,
)
from netreplay.triangles import analyze_triangles

STAT_GROUPS = ("conn", "deg", "dist", "tri")


@dataclass(frozen=True)
class RunConfig:
    """Everything a replay run depends on."""

    input_path: str
    nominal_checkpoints: int = 100
    stats: frozenset = frozenset(STAT_GROUPS)
    estimator: EstimatorConfig = EstimatorConfig()
    bounds: BoundConfig = BoundConfig()
    seed: int = 0
    out_dir: Optional[str] = None
    dump_distributions: bool = False
    use_cache: bool = True
    format_options: FormatOptions = FormatOptions()

    def __post_init__(self):
        groups = frozenset(self.stats)
        if not groups:
            raise ValueError("at least one statistic group must be enabled")
        unknown = groups - set(STAT_GROUPS)
        if unknown:
            raise ValueError(f"unknown statistic groups: {sorted(unknown)}")
        object.__setattr__(self, "stats", groups)
        if self.nominal_checkpoints < 1:
            raise ValueError("nominal_checkpoints must be at least 1")


@dataclass(frozen=True)
class CheckpointRecord:
    """Where one checkpoint landed in the stream."""

    index: int  # position in the checkpoint schedule, seeds derive from this
    target_n: int
    position: int  # link events consumed
    n: int
    m: int
    time: int


@dataclass
class EvolutionSeries:
    """One statistic across checkpoints; value None where undefined."""

    name: str
    checkpoint_indices: list[int] = field(default_factory=list)
    ns: list[int] = field(default_factory=list)
    ms: list[int] = field(default_factory=list)
    times: list[int] = field(default_factory=list)
    values: list = field(default_factory=list)

    def append(self, record: CheckpointRecord, value) -> None:
        self.checkpoint_indices.append(record.index)
        self.ns.append(record.n)
        self.ms.append(record.m)
        self.times.append(record.time)
        self.values.append(value)

    def rows(self):
        return zip(self.checkpoint_indices, self.ns, self.ms, self.times, self.values)

    def write_csv(self, path: str) -> None:
        with open(path, "w", encoding="utf-8", newline="\n") as f:
            f.write("checkpoint,n,m,time,value\n")
            for ci, n, m, t, v in self.rows():
                f.write(f"{ci},{n},{m},{t},{_format_value(v)}\n")


@dataclass
class RunResult:
    config: RunConfig
    final_n: int
    final_m: int
    checkpoints: list[CheckpointRecord]
    series: dict[str, EvolutionSeries]
    manifest: dict
    out_dir: Optional[str]


def _format_value(v) -> str:
    if v is None:
        return ""
    if isinstance(v, bool):
        return "1" if v else "0"
    if isinstance(v, (int, np.integer)):
        return str(int(v))
    return repr(float(v))


def load_stream(config: RunConfig) -> ArrivalStream:
    """Normalized stream for a run, via the binary sidecar when possible.

    The sidecar lives next to the input with an ``.arrivals`` suffix and is
    only trusted when newer than the input. Failures to write it are
    silently ignored; failures to read it fall back to a fresh parse.
    """
    path = config.input_path
    cache_path = path + ".arrivals"
    if config.use_cache and os.path.exists(cache_path):
        try:
            if os.path.getmtime(cache_path) >= os.path.getmtime(path):
                return load_cache(cache_path)
        except (OSError, ValueError):
            pass
    with open_event_file(path) as f:
        stream = normalize(parse_event_stream(f, config.format_options))
    if config.use_cache:
        try:
            save_cache(stream, cache_path)
        except OSError:
            pass
    return stream


def _series_names(groups: frozenset) -> list[str]:
    names = []
    if "conn" in groups:
        names += ["component_count", "giant_fraction"]
    if "deg" in groups:
        names += ["average_degree", "density", "max_degree", "ks_vs_final"]
    if "dist" in groups:
        names += [
            "average_distance",
            "average_distance_samples",
            "diameter_lower",
            "diameter_upper",
            "diameter_iterations",
            "diameter_converged",
        ]
    if "tri" in groups:
        names += [
            "triangles",
            "clustering",
            "transitivity",
            "triangles_over_max_degree_sq",
            "clustering_over_density",
        ]
    return names


def checkpoint_estimator_seed(global_seed: int, checkpoint_index: int) -> np.random.SeedSequence:
    return np.random.SeedSequence([global_seed, checkpoint_index, 0])


def checkpoint_bounds_seed(global_seed: int, checkpoint_index: int) -> np.random.SeedSequence:
    return np.random.SeedSequence([global_seed, checkpoint_index, 1])


def run_evolution(config: RunConfig) -> RunResult:
    """Replay the input and measure every enabled statistic per checkpoint."""
    stream = load_stream(config)
    if stream.final_n < 1:
        raise ValueError(f"input {config.input_path!r} contains no nodes")
    schedule = checkpoint_sizes(stream.final_n, config.nominal_checkpoints)
    groups = config.stats

    graph = GrowingGraph()
    inc = IncrementalComponents()
    records: list[CheckpointRecord] = []
    values: dict[str, list] = {name: [] for name in _series_names(groups)}
    retained_dists = []  # degree distributions, for dumps and ks_vs_final
    checkpoint_timings: list[dict] = []
    pos = 0
    last_index = len(schedule.sizes) - 1

    for ci, target in enumerate(schedule.sizes):
        t_replay = _time.perf_counter()
        if ci == last_index:
            new_pos = stream.n_events
            n_act = stream.final_n
        else:
            new_pos = replay_to(stream, pos, target)
            n_act = checkpoint_node_count(stream, new_pos, target)
        if records and new_pos == records[-1].position and n_act == records[-1].n:
            continue  # the sample did not change; overshoot swallowed this target
        u_arr, v_arr = stream.u, stream.v
        for i in range(pos, new_pos):
            a = int(u_arr[i])
            b = int(v_arr[i])
            graph.add_link(a, b)
            inc.add_link(a, b)
        pos = new_pos
        inc.ensure(n_act)
        boundary_time = int(stream.time[new_pos - 1]) if new_pos else 0
        snapshot = finalize_snapshot(graph, n=n_act, checkpoint_time=boundary_time)
        record = CheckpointRecord(
            index=ci,
            target_n=target,
            position=new_pos,
            n=n_act,
            m=snapshot.m,
            time=boundary_time,
        )
        timing = {"checkpoint": ci, "replay": _time.perf_counter() - t_replay}

        try:
            basic: Optional[BasicStats] = None
            if n_act >= 2:
                basic = stats_from_counts(
                    n_act, snapshot.m, int(snapshot.degrees.max()) if n_act else 0
                )

            if "conn" in groups:
                t0 = _time.perf_counter()
                giant_size, _, giant_fraction = inc.giant()
                values["component_count"].append(inc.component_count)
                values["giant_fraction"].append(giant_fraction)
                timing["conn"] = _time.perf_counter() - t0

            if "deg" in groups:
                t0 = _time.perf_counter()
                dist = degree_distribution(snapshot)
                retained_dists.append(dist)
                if basic is None:
                    values["average_degree"].append(None)
                    values["density"].append(None)
                    values["max_degree"].append(None)
                else:
                    values["average_degree"].append(basic.average_degree)
                    values["density"].append(basic.density)
                    values["max_degree"].append(basic.max_degree)
                timing["deg"] = _time.perf_counter() - t0

            if "dist" in groups:
                t0 = _time.perf_counter()
                report = _distance_group(config, inc, snapshot, ci)
                if report is None:
                    for name in (
                        "average_distance",
                        "average_distance_samples",
                        "diameter_lower",
                        "diameter_upper",
                        "diameter_iterations",
                        "diameter_converged",
                    ):
                        values[name].append(None)
                else:
                    values["average_distance"].append(report.average_distance)
                    values["average_distance_samples"].append(report.samples_used)
                    values["diameter_lower"].append(report.diameter_lower)
                    values["diameter_upper"].append(report.diameter_upper)
                    values["diameter_iterations"].append(report.bound_iterations)
                    values["diameter_converged"].append(report.converged)
                timing["dist"] = _time.perf_counter() - t0

            if "tri" in groups:
                t0 = _time.perf_counter()
                if basic is None:
                    stand_in = BasicStats(
                        n=n_act, m=snapshot.m, average_degree=0.0, density=0.0, max_degree=0
                    )
                    tri = analyze_triangles(snapshot, stand_in)
                else:
                    tri = analyze_triangles(snapshot, basic)
                values["triangles"].append(tri.triangles)
                values["clustering"].append(tri.clustering)
                values["transitivity"].append(tri.transitivity)
                values["triangles_over_max_degree_sq"].append(
                    tri.triangles_over_max_degree_sq
                )
                values["clustering_over_density"].append(tri.clustering_over_density)
                timing["tri"] = _time.perf_counter() - t0
        except Exception as exc:
            raise RuntimeError(
                f"checkpoint {ci} (target n={target}, actual n={n_act}, m={snapshot.m}): "
                f"{exc}"
            ) from exc

        records.append(record)
        checkpoint_timings.append(timing)

    if "deg" in groups:
        final_cumulative = cumulative(retained_dists[-1])
        for d in retained_dists:
            values["ks_vs_final"].append(ks_statistic(cumulative(d), final_cumulative))

    series = {}
    for name in _series_names(groups):
        s = EvolutionSeries(name=name)
        for record, value in zip(records, values[name]):
            s.append(record, value)
        series[name] = s

    manifest = _build_manifest(config, stream, schedule, records, series)
    result = RunResult(
        config=config,
        final_n=stream.final_n,
        final_m=stream.final_m,
        checkpoints=records,
        series=series,
        manifest=manifest,
        out_dir=config.out_dir,
    )
    if config.out_dir is not None:
        _write_outputs(result, retained_dists if config.dump_distributions else None,
                       checkpoint_timings)
    return result


def _distance_group(
    config: RunConfig, inc: IncrementalComponents, snapshot, checkpoint_index: int
) -> Optional[DistanceReport]:
    """Distance statistics for one checkpoint; None while the giant component
    is too small to have distances."""
    giant_size, giant_root, _ = inc.giant()
    if giant_size < 2:
        return None
    roots = inc.roots()
    giant_mask = roots == roots[giant_root]
    est_cfg = dataclasses.replace(
        config.estimator, rng_seed=checkpoint_estimator_seed(config.seed, checkpoint_index)
    )
    estimate, samples = estimate_average_distance(snapshot, giant_mask, est_cfg)
    bnd_cfg = dataclasses.replace(
        config.bounds, rng_seed=checkpoint_bounds_seed(config.seed, checkpoint_index)
    )
    outcome = diameter_bounds(snapshot, giant_mask, bnd_cfg)
    return DistanceReport(
        average_distance=estimate,
        samples_used=samples,
        diameter_lower=outcome.lower,
        diameter_upper=outcome.upper,
        bound_iterations=outcome.iterations,
        converged=outcome.converged,
    )


def _build_manifest(config, stream, schedule, records, series) -> dict:
    import platform

    from netreplay import __version__

    return {
        "tool": {"name": "netreplay", "version": __version__},
        "versions": {"python": platform.python_version(), "numpy": np.__version__},
        "input": config.input_path,
        "seed": config.seed,
        "nominal_checkpoints": config.nominal_checkpoints,
        "stats": sorted(config.stats),
        "estimator": {"i_min": config.estimator.i_min, "epsilon": config.estimator.epsilon},
        "bounds": {
            "min_iterations": config.bounds.min_iterations,
            "gap_target": config.bounds.gap_target,
            "iteration_cap": config.bounds.iteration_cap,
        },
        "final_n": stream.final_n,
        "final_m": stream.final_m,
        "scheduled_targets": list(schedule.sizes),
        "checkpoints": [
            {
                "index": r.index,
                "target_n": r.target_n,
                "position": r.position,
                "n": r.n,
                "m": r.m,
                "time": r.time,
            }
            for r in records
        ],
        "series": {name: f"{name}.csv" for name in series},
        "extra_files": ["growth.csv", "links_vs_nodes.csv", "plots.gp"],
        "timings_file": "timings.json",
    }


def _write_outputs(result: RunResult, dists, checkpoint_timings) -> None:
    out = result.out_dir
    os.makedirs(out, exist_ok=True)
    for name, s in result.series.items():
        s.write_csv(os.path.join(out, f"{name}.csv"))
    with open(os.path.join(out, "growth.csv"), "w", encoding="utf-8", newline="\n") as f:
        f.write("checkpoint,n,m,time\n")
        for r in result.checkpoints:
            f.write(f"{r.index},{r.n},{r.m},{r.time}\n")
    with open(os.path.join(out, "links_vs_nodes.csv"), "w", encoding="utf-8", newline="\n") as f:
        f.write("n,m\n")
        for r in result.checkpoints:
            f.write(f"{r.n},{r.m}\n")
    with open(os.path.join(out, "manifest.json"), "w", encoding="utf-8", newline="\n") as f:
        json.dump(result.manifest, f, indent=2, sort_keys=True)
        f.write("\n")
    totals: dict[str, float] = {}
    for t in checkpoint_timings:
        for k, v in t.items():
            if k != "checkpoint":
                totals[k] = totals.get(k, 0.0) + v
    with open(os.path.join(out, "timings.json"), "w", encoding="utf-8", newline="\n") as f:
        json.dump(
            {"per_checkpoint": checkpoint_timings, "totals": totals}, f, indent=2, sort_keys=True
        )
        f.write("\n")
    _write_plot_script(result, os.path.join(out, "plots.gp"))
    if dists is not None:
        ddir = os.path.join(out, "distributions")
        os.makedirs(ddir, exist_ok=True)
        width = len(str(max(r.index for r in result.checkpoints)))
        for record, dist in zip(result.checkpoints, dists):
            name = f"degree_distribution_{record.index:0{width}d}.csv"
            cum = cumulative(dist)
            with open(os.path.join(ddir, name), "w", encoding="utf-8", newline="\n") as f:
                f.write("degree,count,proportion,cumulative\n")
                for k, c, p, q in zip(dist.degrees, dist.counts, dist.proportions(), cum.q):
                    f.write(f"{int(k)},{int(c)},{_format_value(float(p))},{_format_value(float(q))}\n")


def _write_plot_script(result: RunResult, path: str) -> None:
    lines = [
        "# gnuplot script for the evolution series",
        'set datafile separator ","',
        "set term pngcairo size 900,600",
        "set key off",
        "set xlabel 'nodes in sample'",
    ]
    for name in sorted(result.series):
        lines += [
            f"set output '{name}.png'",
            f"set ylabel '{name.replace('_', ' ')}'",
            f"plot '{name}.csv' using 2:5 every ::1 with linespoints",
        ]
    lines += [
        "set output 'growth.png'",
        "set ylabel 'links in sample'",
        "plot 'growth.csv' using 2:3 every ::1 with linespoints",
        "",
    ]
    with open(path, "w", encoding="utf-8", newline="\n") as f:
        f.write("\n".join(lines))
