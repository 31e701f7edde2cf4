"""Scenario orchestration: presets, configuration files, sweep execution,
CSV serialization and chart emission.

A scenario is a grid of cells (topology x parameter variant x architecture x
load x replication).  Cells are independent simulations with seeds derived
deterministically from the master seed, so a sweep may run them in any order
and across processes while producing byte-identical output files.
"""

from __future__ import annotations

import configparser
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field, replace
from typing import Callable, Optional

from .architectures import Architecture, ArchitectureParams, build_network
from .errors import ConfigurationError
from .kernel import Kernel, MS, US, derive_seed
from .metrics import MetricsLedger, aggregate_replications
from .svgplot import Series, render_chart
from .topology import (
    RouteTable,
    build_nsfnet,
    build_torus,
    load_topology_file,
    shortest_routes,
)
from .traffic import LoadSpec, TrafficGenerator

DEFAULT_LOAD_GRID = tuple(round(0.1 * i, 10) for i in range(1, 10))
ARCH_ORDER = ("c-obs", "e-obs", "l-obs")

CSV_COLUMNS = [
    "scenario",
    "topology",
    "arch",
    "load",
    "W",
    "CW",
    "mean_burst_bits",
    "control_bit_rate",
    "seed",
    "offered",
    "delivered",
    "loss_total",
    "loss_burst",
    "loss_bcp",
    "utilization",
    "utilization_wasted",
    "mean_delay_ps",
    "ci_loss_total",
    "ci_loss_burst",
    "ci_loss_bcp",
    "ci_utilization",
    "ci_utilization_wasted",
    "ci_mean_delay_ps",
]

HOPS_COLUMNS = [
    "scenario",
    "topology",
    "arch",
    "load",
    "remaining_hops",
    "attempts",
    "drops",
    "loss_probability",
    "ci_loss_probability",
]

UNITS_COMMENT = (
    "# units: load=offered Erlangs per node (normalized to one link); "
    "W,CW=wavelength counts; mean_burst_bits=bits; control_bit_rate=bits/s; "
    "offered,delivered=bursts; loss_*=probability [%.6e]; "
    "utilization*=fraction of wavelength-time [%.6e]; mean_delay_ps=picoseconds [%.1f]; "
    "ci_*=95%-CI half-width, same unit as its statistic, empty on per-replication rows"
)

HOPS_UNITS_COMMENT = (
    "# units: load=offered Erlangs per node; remaining_hops=hops left to destination when "
    "attempted; attempts,drops=bursts; loss_probability=drops/attempts [%.6e]; "
    "ci_loss_probability=95%-CI half-width across replications"
)


@dataclass
class Scenario:
    """A fully determined experiment: given a master seed, every cell of the
    sweep is reproducible."""

    name: str
    topologies: tuple = ("nsfnet",)
    architectures: tuple = ARCH_ORDER
    loads: tuple = DEFAULT_LOAD_GRID
    wavelengths: int = 32
    control_wavelengths: int = 1
    propagation_delay_ps: int = 1 * MS
    mean_burst_bits: int = 1_000_000
    data_bit_rate: float = 10e9
    control_bit_rate: float = 10e9
    t_sw_ps: int = 1 * US
    t_proc_ps: int = 10 * US
    replications: int = 5
    bursts_per_replication: int = 1_000_000
    warmup_fraction: float = 0.1
    master_seed: int = 1
    plot_kind: str = "loss_vs_load"
    #: optional parameter variants (fields overriding wavelengths,
    #: mean_burst_bits or control_bit_rate), each swept over the full grid
    variants: Optional[tuple] = None

    def validate(self) -> None:
        if not self.name:
            raise ConfigurationError("run.name: scenario name must not be empty")
        if not self.loads:
            raise ConfigurationError("traffic.load: at least one load required")
        previous = 0.0
        for load in self.loads:
            if not previous < load <= 1.0:
                raise ConfigurationError(
                    f"traffic.load: grid must be strictly increasing in (0, 1], got {self.loads}"
                )
            previous = load
        for arch in self.architectures:
            try:
                Architecture(arch)
            except ValueError:
                raise ConfigurationError(
                    f"architecture.architecture: unknown value {arch!r}"
                ) from None
        if self.replications < 1:
            raise ConfigurationError("run.replications: must be >= 1")
        if self.bursts_per_replication < 1:
            raise ConfigurationError("run.bursts_per_replication: must be >= 1")
        if not 0.0 <= self.warmup_fraction < 1.0:
            raise ConfigurationError("run.warmup_fraction: must be in [0, 1)")
        if self.wavelengths < 1:
            raise ConfigurationError("topology.wavelengths: must be >= 1")
        if not 0 <= self.control_wavelengths < self.wavelengths:
            raise ConfigurationError("topology.control_wavelengths: must satisfy 0 <= CW < W")

    def quickened(self, replications: int = 3, bursts: int = 100_000) -> "Scenario":
        """Desk-scale variant used by continuous integration."""
        return replace(self, replications=replications, bursts_per_replication=bursts)

    def parameter_points(self):
        """The swept parameter combinations: one per variant, or the base."""
        base = {
            "wavelengths": self.wavelengths,
            "control_wavelengths": self.control_wavelengths,
            "mean_burst_bits": self.mean_burst_bits,
            "control_bit_rate": self.control_bit_rate,
        }
        if not self.variants:
            return [base]
        points = []
        for variant in self.variants:
            merged = dict(base)
            merged.update(variant)
            points.append(merged)
        return points

    def cells(self):
        """All cell descriptors of the sweep, as plain picklable dicts."""
        self.validate()
        out = []
        for topology in self.topologies:
            for params in self.parameter_points():
                for arch in self.architectures:
                    for load in self.loads:
                        for rep in range(self.replications):
                            # seed excludes the architecture: the same
                            # replication index offers identical traffic to
                            # every architecture (common random numbers)
                            stream = (
                                f"cell/{self.name}/{topology}/{load!r}"
                                f"/W{params['wavelengths']}/CW{params['control_wavelengths']}"
                                f"/bits{params['mean_burst_bits']}"
                                f"/cbr{params['control_bit_rate']:g}/rep{rep}"
                            )
                            out.append(
                                {
                                    "scenario": self.name,
                                    "topology": topology,
                                    "arch": arch,
                                    "load": load,
                                    "wavelengths": params["wavelengths"],
                                    "control_wavelengths": params["control_wavelengths"],
                                    "mean_burst_bits": params["mean_burst_bits"],
                                    "data_bit_rate": self.data_bit_rate,
                                    "control_bit_rate": params["control_bit_rate"],
                                    "propagation_delay_ps": self.propagation_delay_ps,
                                    "t_sw_ps": self.t_sw_ps,
                                    "t_proc_ps": self.t_proc_ps,
                                    "bursts": self.bursts_per_replication,
                                    "warmup_fraction": self.warmup_fraction,
                                    "rep": rep,
                                    "seed": derive_seed(self.master_seed, stream)
                                    & 0x7FFFFFFFFFFFFFFF,
                                }
                            )
        return out


# -- presets ---------------------------------------------------------------


def _preset_fig2(quick: bool) -> Scenario:
    s = Scenario(
        name="fig2",
        topologies=("nsfnet", "torus6x6"),
        plot_kind="loss_vs_load",
    )
    return s.quickened() if quick else s


def _preset_fig3(quick: bool) -> Scenario:
    s = Scenario(
        name="fig3",
        topologies=("nsfnet", "torus6x6"),
        plot_kind="loss_by_cause",
    )
    return s.quickened() if quick else s


def _preset_fig4(quick: bool) -> Scenario:
    s = Scenario(
        name="fig4",
        topologies=("nsfnet",),
        architectures=("c-obs",),
        plot_kind="sweep",
        variants=(
            {},  # baseline: W=32, 1 Mbit bursts, control packets at 10 Gbps
            {"wavelengths": 16},
            {"mean_burst_bits": 5_000_000},
            {"control_bit_rate": 622e6},
        ),
    )
    return s.quickened() if quick else s


def _preset_fig5(quick: bool) -> Scenario:
    s = Scenario(
        name="fig5",
        topologies=("nsfnet", "torus6x6"),
        loads=(0.65,),
        plot_kind="fairness",
    )
    return s.quickened() if quick else s


def _preset_fig6(quick: bool) -> Scenario:
    s = Scenario(
        name="fig6",
        topologies=("nsfnet", "torus6x6"),
        plot_kind="utilization",
    )
    return s.quickened() if quick else s


PRESETS: dict = {
    "fig2": _preset_fig2,
    "fig3": _preset_fig3,
    "fig4": _preset_fig4,
    "fig5": _preset_fig5,
    "fig6": _preset_fig6,
}


def preset(name: str, quick: bool = False) -> Scenario:
    try:
        factory = PRESETS[name]
    except KeyError:
        raise ConfigurationError(
            f"unknown preset {name!r}; available: {', '.join(sorted(PRESETS))}"
        ) from None
    return factory(quick)


# -- configuration files -----------------------------------------------------


def _parse_list(raw: str) -> list:
    return [part.strip() for part in raw.split(",") if part.strip()]


def _get(parser, section: str, key: str, conv, default):
    if not parser.has_option(section, key):
        return default
    raw = parser.get(section, key)
    try:
        return conv(raw)
    except (TypeError, ValueError) as exc:
        raise ConfigurationError(f"{section}.{key}: invalid value {raw!r} ({exc})") from exc


_KNOWN_KEYS = {
    "topology": {"kind", "path", "rows", "cols", "wavelengths", "control_wavelengths", "propagation_delay_ps"},
    "traffic": {"load", "mean_burst_bits", "data_bit_rate", "control_bit_rate"},
    "architecture": {"architecture", "t_sw_ps", "t_proc_ps"},
    "run": {"name", "replications", "bursts_per_replication", "warmup_fraction", "master_seed"},
    "output": {"dir", "plot"},
}


def apply_config(path, base: Optional[Scenario] = None) -> Scenario:
    """Read a flat key=value configuration with [section] headers, applied on
    top of ``base`` (or library defaults)."""
    parser = configparser.ConfigParser(inline_comment_prefixes=("#",))
    read = parser.read(path)
    if not read:
        raise ConfigurationError(f"cannot read configuration file {path}")
    for section in parser.sections():
        if section not in _KNOWN_KEYS:
            raise ConfigurationError(f"unknown configuration section [{section}]")
        for key in parser.options(section):
            if key not in _KNOWN_KEYS[section]:
                raise ConfigurationError(f"{section}.{key}: unknown key")
    scenario = base if base is not None else Scenario(name="run")

    topo_kind = _get(parser, "topology", "kind", str, None)
    if topo_kind is not None:
        topologies = []
        for kind in _parse_list(topo_kind):
            if kind == "torus":
                rows = _get(parser, "topology", "rows", int, 6)
                cols = _get(parser, "topology", "cols", int, 6)
                topologies.append(f"torus{rows}x{cols}")
            elif kind == "file":
                file_path = _get(parser, "topology", "path", str, None)
                if not file_path:
                    raise ConfigurationError("topology.path: required when kind=file")
                topologies.append(f"file:{file_path}")
            elif kind == "nsfnet" or kind.startswith("torus"):
                topologies.append(kind)
            else:
                raise ConfigurationError(f"topology.kind: unknown kind {kind!r}")
        scenario = replace(scenario, topologies=tuple(topologies))

    scenario = replace(
        scenario,
        wavelengths=_get(parser, "topology", "wavelengths", int, scenario.wavelengths),
        control_wavelengths=_get(
            parser, "topology", "control_wavelengths", int, scenario.control_wavelengths
        ),
        propagation_delay_ps=_get(
            parser, "topology", "propagation_delay_ps", int, scenario.propagation_delay_ps
        ),
        mean_burst_bits=_get(parser, "traffic", "mean_burst_bits", int, scenario.mean_burst_bits),
        data_bit_rate=_get(parser, "traffic", "data_bit_rate", float, scenario.data_bit_rate),
        control_bit_rate=_get(
            parser, "traffic", "control_bit_rate", float, scenario.control_bit_rate
        ),
        t_sw_ps=_get(parser, "architecture", "t_sw_ps", int, scenario.t_sw_ps),
        t_proc_ps=_get(parser, "architecture", "t_proc_ps", int, scenario.t_proc_ps),
        replications=_get(parser, "run", "replications", int, scenario.replications),
        bursts_per_replication=_get(
            parser, "run", "bursts_per_replication", int, scenario.bursts_per_replication
        ),
        warmup_fraction=_get(parser, "run", "warmup_fraction", float, scenario.warmup_fraction),
        master_seed=_get(parser, "run", "master_seed", int, scenario.master_seed),
        name=_get(parser, "run", "name", str, scenario.name),
        plot_kind=_get(parser, "output", "plot", str, scenario.plot_kind),
    )
    loads_raw = _get(parser, "traffic", "load", str, None)
    if loads_raw is not None:
        try:
            loads = tuple(float(v) for v in _parse_list(loads_raw))
        except ValueError as exc:
            raise ConfigurationError(f"traffic.load: invalid value {loads_raw!r}") from exc
        scenario = replace(scenario, loads=loads)
    archs_raw = _get(parser, "architecture", "architecture", str, None)
    if archs_raw is not None:
        scenario = replace(scenario, architectures=tuple(_parse_list(archs_raw)))
    scenario.validate()
    return scenario


def resolved_config_text(scenario: Scenario) -> str:
    """The scenario's full parameter set, serialized back into configuration
    file form (what --print-config shows)."""
    lines = [
        "[topology]",
        f"kind = {', '.join(scenario.topologies)}",
        f"wavelengths = {scenario.wavelengths}",
        f"control_wavelengths = {scenario.control_wavelengths}",
        f"propagation_delay_ps = {scenario.propagation_delay_ps}",
        "",
        "[traffic]",
        f"load = {', '.join(f'{l:g}' for l in scenario.loads)}",
        f"mean_burst_bits = {scenario.mean_burst_bits}",
        f"data_bit_rate = {scenario.data_bit_rate:.0f}",
        f"control_bit_rate = {scenario.control_bit_rate:.0f}",
        "",
        "[architecture]",
        f"architecture = {', '.join(scenario.architectures)}",
        f"t_sw_ps = {scenario.t_sw_ps}",
        f"t_proc_ps = {scenario.t_proc_ps}",
        "",
        "[run]",
        f"name = {scenario.name}",
        f"replications = {scenario.replications}",
        f"bursts_per_replication = {scenario.bursts_per_replication}",
        f"warmup_fraction = {scenario.warmup_fraction:g}",
        f"master_seed = {scenario.master_seed}",
        "",
        "[output]",
        f"plot = {scenario.plot_kind}",
    ]
    if scenario.variants:
        lines.append("")
        lines.append("# parameter variants swept against the baseline:")
        for variant in scenario.variants:
            label = variant_label(
                {
                    "wavelengths": variant.get("wavelengths", scenario.wavelengths),
                    "mean_burst_bits": variant.get("mean_burst_bits", scenario.mean_burst_bits),
                    "control_bit_rate": variant.get("control_bit_rate", scenario.control_bit_rate),
                },
                scenario,
            )
            lines.append(f"# variant: {label}")
    return "\n".join(lines) + "\n"


def variant_label(params: dict, scenario: Scenario) -> str:
    """Human label for a parameter variant, relative to the scenario base."""
    parts = []
    if params["wavelengths"] != scenario.wavelengths:
        parts.append(f"W={params['wavelengths']}")
    if params["mean_burst_bits"] != scenario.mean_burst_bits:
        parts.append(f"{params['mean_burst_bits'] / 1e6:g} Mbit bursts")
    if params["control_bit_rate"] != scenario.control_bit_rate:
        parts.append(f"control {params['control_bit_rate'] / 1e6:g} Mbps")
    return ", ".join(parts) if parts else "baseline"


# -- cell execution ----------------------------------------------------------

_TOPOLOGY_CACHE: dict = {}


def _build_topology(cell: dict):
    key = (
        cell["topology"],
        cell["wavelengths"],
        cell["control_wavelengths"],
        cell["propagation_delay_ps"],
        cell["data_bit_rate"],
    )
    cached = _TOPOLOGY_CACHE.get(key)
    if cached is not None:
        return cached
    kind = cell["topology"]
    link_params = {
        "wavelengths": cell["wavelengths"],
        "control_wavelengths": cell["control_wavelengths"],
        "propagation_delay": cell["propagation_delay_ps"],
        "bit_rate": cell["data_bit_rate"],
    }
    if kind == "nsfnet":
        topo = build_nsfnet(**link_params)
    elif kind.startswith("torus"):
        try:
            rows, cols = kind[len("torus"):].split("x")
            topo = build_torus(int(rows), int(cols), **link_params)
        except ValueError as exc:
            raise ConfigurationError(f"topology.kind: cannot parse {kind!r}") from exc
    elif kind.startswith("file:"):
        topo = load_topology_file(kind[len("file:"):], **link_params)
    else:
        raise ConfigurationError(f"topology.kind: unknown topology {kind!r}")
    routes = shortest_routes(topo, require_complete=True)
    _TOPOLOGY_CACHE[key] = (topo, routes)
    return topo, routes


def run_cell(cell: dict) -> dict:
    """Execute one (topology, parameters, architecture, load, replication)
    cell and return its metric summary."""
    topo, routes = _build_topology(cell)
    kernel = Kernel()
    ledger = MetricsLedger(topo)
    spec = LoadSpec(
        offered_load=cell["load"],
        mean_burst_bits=cell["mean_burst_bits"],
        data_bit_rate=cell["data_bit_rate"],
        control_bit_rate=cell["control_bit_rate"],
    )
    params = ArchitectureParams(
        Architecture(cell["arch"]), t_sw=cell["t_sw_ps"], t_proc=cell["t_proc_ps"]
    )
    network = build_network(kernel, routes, params, spec, ledger)
    generator = TrafficGenerator(
        kernel,
        routes,
        spec,
        wavelengths=cell["wavelengths"],
        sink=network.ingress_emit,
        total_bursts=cell["bursts"],
        warmup_bursts=int(cell["bursts"] * cell["warmup_fraction"]),
        master_seed=cell["seed"],
    )
    generator.start()
    kernel.run_to_exhaustion()
    ledger.finalize(kernel.now)
    summary = ledger.summary()
    summary["cell"] = cell
    return summary


@dataclass
class RunResult:
    rows: list = field(default_factory=list)
    hops_rows: list = field(default_factory=list)
    failures: list = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return not self.failures

    def aggregate_rows(self) -> list:
        return [r for r in self.rows if r["_kind"] == "aggregate"]

    def replication_rows(self) -> list:
        return [r for r in self.rows if r["_kind"] == "replication"]


def _point_key(cell: dict):
    return (
        cell["topology"],
        cell["wavelengths"],
        cell["control_wavelengths"],
        cell["mean_burst_bits"],
        cell["control_bit_rate"],
        cell["arch"],
        cell["load"],
    )


def _base_row(scenario_name: str, cell: dict) -> dict:
    return {
        "scenario": scenario_name,
        "topology": cell["topology"],
        "arch": cell["arch"],
        "load": cell["load"],
        "W": cell["wavelengths"],
        "CW": cell["control_wavelengths"],
        "mean_burst_bits": cell["mean_burst_bits"],
        "control_bit_rate": cell["control_bit_rate"],
    }


def run_scenario(
    scenario: Scenario,
    jobs: int = 1,
    progress: Optional[Callable[[str], None]] = None,
) -> RunResult:
    """Run every cell of the scenario and assemble per-replication and
    aggregated result rows, deterministically ordered."""
    cells = scenario.cells()
    result = RunResult()
    summaries: dict = {}

    def note(message: str) -> None:
        if progress is not None:
            progress(message)

    def record(cell, outcome, error=None):
        if error is not None:
            result.failures.append((cell, error))
            note(f"FAILED {cell['topology']}/{cell['arch']}/load={cell['load']}: {error}")
            return
        summaries.setdefault(_point_key(cell), []).append(outcome)
        note(
            f"done {cell['topology']}/{cell['arch']}/load={cell['load']:g}"
            f"/rep={cell['rep']}"
        )

    if jobs > 1:
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            futures = [(cell, pool.submit(run_cell, cell)) for cell in cells]
            for cell, future in futures:
                try:
                    record(cell, future.result())
                except Exception as exc:  # noqa: BLE001 - cell isolation
                    record(cell, None, error=f"{type(exc).__name__}: {exc}")
    else:
        for cell in cells:
            try:
                record(cell, run_cell(cell))
            except Exception as exc:  # noqa: BLE001 - cell isolation
                record(cell, None, error=f"{type(exc).__name__}: {exc}")

    for key in sorted(summaries, key=_sort_key):
        group = summaries[key]
        group.sort(key=lambda s: s["cell"]["rep"])
        for summary in group:
            cell = summary["cell"]
            row = _base_row(scenario.name, cell)
            row.update(
                {
                    "seed": cell["seed"],
                    "offered": summary["offered"],
                    "delivered": summary["delivered"],
                    "loss_total": summary["loss_total"],
                    "loss_burst": summary["loss_burst"],
                    "loss_bcp": summary["loss_bcp"],
                    "utilization": summary["utilization"],
                    "utilization_wasted": summary["utilization_wasted"],
                    "mean_delay_ps": summary["mean_delay_ps"],
                    "_kind": "replication",
                    "_rep": cell["rep"],
                }
            )
            for column in CSV_COLUMNS:
                row.setdefault(column, None)
            result.rows.append(row)
        agg = aggregate_replications(group)
        cell = group[0]["cell"]
        row = _base_row(scenario.name, cell)
        row.update(
            {
                "seed": scenario.master_seed,
                "offered": agg["offered"],
                "delivered": agg["delivered"],
                "loss_total": agg["loss_total"],
                "loss_burst": agg["loss_burst"],
                "loss_bcp": agg["loss_bcp"],
                "utilization": agg["utilization"],
                "utilization_wasted": agg["utilization_wasted"],
                "mean_delay_ps": agg["mean_delay_ps"],
                "ci_loss_total": agg["ci_loss_total"],
                "ci_loss_burst": agg["ci_loss_burst"],
                "ci_loss_bcp": agg["ci_loss_bcp"],
                "ci_utilization": agg["ci_utilization"],
                "ci_utilization_wasted": agg["ci_utilization_wasted"],
                "ci_mean_delay_ps": agg["ci_mean_delay_ps"],
                "_kind": "aggregate",
                "_rep": 10**9,
            }
        )
        result.rows.append(row)
        for h, stats in agg["hops"].items():
            result.hops_rows.append(
                {
                    "scenario": scenario.name,
                    "topology": cell["topology"],
                    "arch": cell["arch"],
                    "load": cell["load"],
                    "W": cell["wavelengths"],
                    "mean_burst_bits": cell["mean_burst_bits"],
                    "control_bit_rate": cell["control_bit_rate"],
                    "remaining_hops": h,
                    "attempts": stats["attempts"],
                    "drops": stats["drops"],
                    "loss_probability": stats["loss"],
                    "ci_loss_probability": stats["ci_loss"],
                }
            )
    return result


def _sort_key(point_key):
    topology, w, cw, bits, cbr, arch, load = point_key
    return (topology, w, cw, bits, cbr, ARCH_ORDER.index(arch) if arch in ARCH_ORDER else 99, load)


# -- serialization -----------------------------------------------------------


def _format_value(column: str, value) -> str:
    if value is None:
        return ""
    if column in ("loss_total", "loss_burst", "loss_bcp", "utilization", "utilization_wasted",
                  "loss_probability") or column.startswith("ci_"):
        if column in ("ci_mean_delay_ps",):
            return f"{value:.1f}"
        return f"{value:.6e}"
    if column == "load":
        return f"{value:.2f}"
    if column == "mean_delay_ps":
        return f"{value:.1f}"
    if column == "control_bit_rate":
        return f"{value:.0f}"
    return str(value)


def emit_csv(rows, path) -> None:
    """Write result rows as UTF-8 CSV with a fixed header and a units
    comment line; refuses to create a file for an empty table."""
    if not rows:
        raise ValueError("no rows to serialize; the file was not created")
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(UNITS_COMMENT + "\n")
        fh.write(",".join(CSV_COLUMNS) + "\n")
        for row in rows:
            fh.write(",".join(_format_value(c, row.get(c)) for c in CSV_COLUMNS) + "\n")


def emit_hops_csv(rows, path) -> None:
    if not rows:
        raise ValueError("no fairness rows to serialize; the file was not created")
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(HOPS_UNITS_COMMENT + "\n")
        fh.write(",".join(HOPS_COLUMNS) + "\n")
        for row in rows:
            fh.write(",".join(_format_value(c, row.get(c)) for c in HOPS_COLUMNS) + "\n")


# -- charts ------------------------------------------------------------------

PLOT_KINDS = ("loss_vs_load", "loss_by_cause", "fairness", "utilization", "sweep")


def _require_columns(rows, columns, kind):
    missing = [c for c in columns if any(c not in row for row in rows)]
    if missing:
        raise ValueError(f"plot kind {kind!r} needs columns {missing} in every row")


def _series_from(rows, key_fn, x_column, y_column, label_fn):
    groups: dict = {}
    for row in rows:
        if row.get(y_column) is None:
            continue
        groups.setdefault(key_fn(row), []).append((row[x_column], row[y_column]))
    return [Series(label_fn(key), pts) for key, pts in sorted(groups.items())]


def emit_plot(rows, kind: str, path, scenario: Optional[Scenario] = None) -> None:
    """Render aggregate rows as an SVG chart; also writes a companion
    plain-text gnuplot script next to it (same stem, .plot suffix) that can
    regenerate the figure from the CSV alone."""
    if kind not in PLOT_KINDS:
        raise ValueError(f"unknown plot kind {kind!r}; expected one of {PLOT_KINDS}")
    if not rows:
        raise ValueError("no rows to plot")
    if kind == "loss_vs_load":
        _require_columns(rows, ("topology", "arch", "load", "loss_total"), kind)
        series = _series_from(
            rows,
            lambda r: (r["topology"], r["arch"]),
            "load",
            "loss_total",
            lambda k: f"{k[1]} {k[0]}",
        )
        render_chart(
            series, path, title="Burst loss probability vs offered load",
            xlabel="offered load (Erlangs)", ylabel="burst loss probability", ylog=True,
        )
    elif kind == "loss_by_cause":
        _require_columns(rows, ("topology", "arch", "load", "loss_burst", "loss_bcp"), kind)
        series = []
        for cause, column in (("burst", "loss_burst"), ("control", "loss_bcp")):
            series.extend(
                _series_from(
                    rows,
                    lambda r: (r["topology"], r["arch"]),
                    "load",
                    column,
                    lambda k, c=cause: f"{k[1]} {c} {k[0]}",
                )
            )
        render_chart(
            series, path, title="Burst loss probability by cause",
            xlabel="offered load (Erlangs)", ylabel="burst loss probability", ylog=True,
        )
    elif kind == "fairness":
        _require_columns(rows, ("topology", "arch", "remaining_hops", "loss_probability"), kind)
        series = _series_from(
            rows,
            lambda r: (r["topology"], r["arch"]),
            "remaining_hops",
            "loss_probability",
            lambda k: f"{k[1]} {k[0]}",
        )
        render_chart(
            series, path, title="Loss probability vs remaining hops",
            xlabel="remaining hops", ylabel="burst loss probability", ylog=False,
        )
    elif kind == "utilization":
        _require_columns(rows, ("topology", "arch", "load", "utilization"), kind)
        series = _series_from(
            rows,
            lambda r: (r["topology"], r["arch"]),
            "load",
            "utilization",
            lambda k: f"{k[1]} {k[0]}",
        )
        render_chart(
            series, path, title="Network resource utilization",
            xlabel="offered load (Erlangs)", ylabel="utilization", ylog=False,
        )
    else:  # sweep
        _require_columns(rows, ("W", "mean_burst_bits", "control_bit_rate", "load", "loss_bcp"), kind)

        def label(key):
            w, bits, cbr = key
            if scenario is not None:
                return variant_label(
                    {"wavelengths": w, "mean_burst_bits": bits, "control_bit_rate": cbr},
                    scenario,
                )
            return f"W={w}, {bits / 1e6:g} Mbit, {cbr / 1e6:g} Mbps"

        series = _series_from(
            rows,
            lambda r: (r["W"], r["mean_burst_bits"], r["control_bit_rate"]),
            "load",
            "loss_bcp",
            label,
        )
        render_chart(
            series, path, title="Control-packet contention loss, parameter sweep",
            xlabel="offered load (Erlangs)", ylabel="control-contention loss probability",
            ylog=True,
        )


def write_plot_script(path, csv_name: str, kind: str, hops_csv_name: Optional[str] = None) -> None:
    """Emit a standalone gnuplot script that rebuilds the chart from the CSV
    (aggregate rows only, selected by a non-empty ci_loss_total field)."""
    col = {name: i + 1 for i, name in enumerate(CSV_COLUMNS)}
    hops_col = {name: i + 1 for i, name in enumerate(HOPS_COLUMNS)}
    lines = [
        "# gnuplot script; regenerates the chart from the result CSV without the simulator.",
        "# Usage: gnuplot <this file>",
        'set datafile separator ","',
        "set key outside right",
        "set grid ytics",
        f'set xlabel "offered load (Erlangs)"',
    ]
    agg_filter = f"${col['ci_loss_total']} != \"\""
    if kind in ("loss_vs_load", "loss_by_cause", "sweep"):
        lines.append("set logscale y")
    if kind == "fairness":
        source = hops_csv_name or csv_name
        lines += [
            'set xlabel "remaining hops"',
            'set ylabel "burst loss probability"',
            "plot \\",
            f"  '< grep -v \"^#\" {source}' using {hops_col['remaining_hops']}:(column({hops_col['loss_probability']})) "
            "with linespoints title 'per remaining-hop loss'",
        ]
    else:
        y_col = {
            "loss_vs_load": col["loss_total"],
            "loss_by_cause": col["loss_burst"],
            "sweep": col["loss_bcp"],
            "utilization": col["utilization"],
        }[kind]
        lines += [
            f'set ylabel "{ "utilization" if kind == "utilization" else "loss probability" }"',
            f"# aggregate rows only: rows where ci_loss_total (column {col['ci_loss_total']}) is non-empty",
            "plot \\",
            f"  '< awk -F, \\'NR>2 && {agg_filter}\\' {csv_name}' "
            f"using {col['load']}:{y_col} with linespoints title '{kind}'",
        ]
    with open(path, "w", encoding="utf-8") as fh:
        fh.write("\n".join(lines) + "\n")
