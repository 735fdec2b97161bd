"""Command-line interface: region queries, equilibria, spectra, runs, and plots.

Every subcommand accepts parameters through flags or a JSON config file
(flags override the file).  Results go to stdout as JSON; bulk numeric output
goes to CSV files; plots to dependency-free SVG.  A metadata record (config
hash, version, wall time) is printed to stderr for every run.  Exit code 2
flags configuration errors, 3 numerical failures (with the error name in a
JSON record on stderr).
"""

from __future__ import annotations

import argparse
import json
import math
import sys
import time
from dataclasses import asdict, dataclass, field

import numpy as np

from . import __version__
from .equilibria import EquilibriumKind, build_equilibrium
from .errors import SwarmEqError
from .linear_stability import stability_report
from .model import InteractionParams, PhasePoint, classify_region, to_phase_point
from .output import SvgPlot, config_hash, json_canonical, write_csv
from .particles import (
    Morphology,
    RunControls,
    init_from_equilibrium,
    init_random_disk,
    morphology,
    run,
)
from .sweeps import (
    cell_centered_axis,
    existence_region_mask,
    region_code_grid,
    target_verdict_grid,
)
from .variational import lambda_profile
from .weak_cross import curve_sample, d_of_ab_ratio

_REGION_NAMES = {
    0: "Boundary",
    1: "D1",
    2: "D2",
    3: "D3",
    4: "D4",
    5: "D5",
    6: "D6",
}

_REGION_COLORS = {
    0: "#222222",
    1: "#aec7e8",
    2: "#ffbb78",
    3: "#98df8a",
    4: "#ff9896",
    5: "#c5b0d5",
    6: "#c49c94",
}


@dataclass
class RunConfig:
    """Flat, JSON-round-trippable description of one CLI invocation."""

    command: str
    values: dict = field(default_factory=dict)

    def to_json(self) -> str:
        return json_canonical({"command": self.command, **self.values})

    @classmethod
    def from_json(cls, text: str) -> "RunConfig":
        data = json.loads(text)
        command = data.pop("command")
        return cls(command=command, values=data)


_PARAM_FLAGS = ("a_s", "a_c", "b_s", "b_c", "M1", "M2", "eta", "A", "B", "M")


def add_param_flags(sub):
    sub.add_argument("-A", type=float, help="cross/self repulsion ratio (shorthand params)")
    sub.add_argument("-B", type=float, help="cross/self attraction ratio (shorthand params)")
    sub.add_argument("-M", type=float, help="mass ratio M1/M2 (shorthand params)")
    sub.add_argument("--a-s", dest="a_s", type=float)
    sub.add_argument("--a-c", dest="a_c", type=float)
    sub.add_argument("--b-s", dest="b_s", type=float)
    sub.add_argument("--b-c", dest="b_c", type=float)
    sub.add_argument("--M1", type=float)
    sub.add_argument("--M2", type=float)
    sub.add_argument("--eta", type=float, default=None)


def resolve_params(ns) -> InteractionParams:
    """Physical parameters from full coefficients or the (A, B, M) shorthand."""
    eta = ns.eta if ns.eta is not None else 1.0
    full = [ns.a_s, ns.a_c, ns.b_s, ns.b_c, ns.M1, ns.M2]
    if all(v is not None for v in full):
        return InteractionParams(*full, eta=eta)
    if any(v is not None for v in full):
        raise ValueError("give all of --a-s/--a-c/--b-s/--b-c/--M1/--M2, or use -A/-B/-M")
    if ns.A is None or ns.B is None or ns.M is None:
        raise ValueError("parameters required: either -A/-B/-M or the full coefficient set")
    return InteractionParams(
        a_s=1.0, a_c=ns.A, b_s=1.0, b_c=ns.B, M1=ns.M, M2=1.0, eta=eta
    )


def _kind(ns) -> EquilibriumKind:
    return EquilibriumKind(ns.kind)


def emit(obj) -> None:
    sys.stdout.write(json_canonical(obj) + "\n")


def cmd_region(ns) -> None:
    if ns.A is None or ns.B is None or ns.M is None:
        raise ValueError("region requires -A, -B and -M")
    q = PhasePoint(A=ns.A, B=ns.B, M=ns.M)
    emit({"A": q.A, "B": q.B, "M": q.M, "region": classify_region(q).value})


def cmd_equilibrium(ns) -> None:
    p = resolve_params(ns)
    cfg = build_equilibrium(_kind(ns), p)
    emit(
        {
            "kind": cfg.kind.value,
            "exists": cfg.exists,
            "reason": cfg.reason,
            "boundary_degenerate": cfg.boundary_degenerate,
            "radii": list(cfg.radii),
            "densities": [list(d) for d in cfg.densities],
            "region": classify_region(to_phase_point(p)).value,
        }
    )


def cmd_lambda(ns) -> None:
    p = resolve_params(ns)
    cfg = build_equilibrium(_kind(ns), p)
    prof1 = lambda_profile(cfg, 1)
    prof2 = lambda_profile(cfg, 2)
    r_max = ns.r_max if ns.r_max is not None else 3.0 * cfg.outermost_radius
    rs = np.linspace(0.0, r_max, ns.n_samples)
    rows = [(float(r), float(prof1.value(r)), float(prof2.value(r))) for r in rs]
    if ns.out_csv:
        write_csv(ns.out_csv, ("r", "Lambda1", "Lambda2"), rows)
    if ns.out_svg:
        plot = SvgPlot((0.0, r_max), _lambda_y_range(prof1, prof2, rs))
        plot.axes("r", "Lambda")
        plot.polyline(rs, [prof1.value(r) for r in rs], color="#1f77b4")
        plot.polyline(rs, [prof2.value(r) for r in rs], color="#d62728")
        plot.save(ns.out_svg)
    emit(
        {
            "kind": cfg.kind.value,
            "plateau1": prof1.plateau,
            "plateau2": prof2.plateau,
            "breakpoints": list(prof1.breakpoints),
            "csv": ns.out_csv or "",
        }
    )


def _lambda_y_range(prof1, prof2, rs):
    vals = [prof.value(r) for prof in (prof1, prof2) for r in rs]
    lo, hi = min(vals), max(vals)
    pad = 0.05 * (hi - lo + 1e-12)
    return (lo - pad, hi + pad)


def cmd_stability(ns) -> None:
    p = resolve_params(ns)
    report = stability_report(_kind(ns), p, ns.m_max)
    if ns.out_csv:
        rows = []
        for ms in report.modes:
            for k, lam in enumerate(np.sort_complex(ms.nontrivial)):
                rows.append((ms.m, k, float(lam.real), float(lam.imag), ms.verdict))
        write_csv(ns.out_csv, ("mode", "k", "re", "im", "verdict"), rows)
    emit(
        {
            "kind": report.kind.value,
            "m_max": report.m_max,
            "overall": report.overall,
            "dominant_unstable_mode": report.dominant_unstable_mode,
            "per_mode": {str(s.m): s.verdict for s in report.modes},
            "guarantee": report.guarantee,
        }
    )


def _write_snapshot(rows, state, t):
    for i, (x, y) in enumerate(state.pos1):
        rows.append((float(t), 1, i, float(x), float(y)))
    for i, (x, y) in enumerate(state.pos2):
        rows.append((float(t), 2, i, float(x), float(y)))


def cmd_simulate(ns) -> None:
    p = resolve_params(ns)
    if ns.init == "equilibrium":
        cfg = build_equilibrium(_kind(ns), p)
        state = init_from_equilibrium(cfg, ns.N1, ns.N2, ns.seed)
    else:
        state = init_random_disk(p, ns.N1, ns.N2, ns.radius, ns.seed)

    controls = RunControls(record_interval=ns.record_interval)
    snapshot_rows: list = []
    _write_snapshot(snapshot_rows, state, 0.0)
    times = np.arange(ns.snapshot_every, ns.t_end + 1e-9, ns.snapshot_every)
    diag_all = None
    for t_target in times:
        state, diag = run(state, float(t_target), controls)
        _write_snapshot(snapshot_rows, state, state.t)
        if diag_all is None:
            diag_all = diag.as_arrays()
        else:
            new = diag.as_arrays()
            diag_all = {k: np.concatenate([diag_all[k], new[k][1:]]) for k in diag_all}

    write_csv(
        f"{ns.out}_snapshots.csv",
        ("t", "species", "particle_id", "x", "y"),
        snapshot_rows,
    )
    d = diag_all
    diag_rows = [
        (
            float(d["t"][i]),
            float(d["energy"][i]),
            float(d["com_total"][i][0]),
            float(d["com_total"][i][1]),
            float(d["d_over_R"][i]),
            float(d["max_speed"][i]),
        )
        for i in range(len(d["t"]))
    ]
    write_csv(
        f"{ns.out}_diagnostics.csv",
        ("t", "E", "com_x", "com_y", "d_over_R", "max_speed"),
        diag_rows,
    )
    m: Morphology = morphology(state)
    emit(
        {
            "t_end": state.t,
            "morphology": asdict(m),
            "snapshots": f"{ns.out}_snapshots.csv",
            "diagnostics": f"{ns.out}_diagnostics.csv",
        }
    )


def _overlay_point(ratio, mass_ratio, eta, n_total, t_end, seed):
    """Long-run particle estimate of d/R at one A/B ratio (unit self-coefficients)."""
    n2 = round(n_total / (1.0 + mass_ratio))
    n1 = n_total - n2
    p = InteractionParams(
        a_s=1.0, a_c=ratio, b_s=1.0, b_c=1.0, M1=mass_ratio, M2=1.0, eta=eta
    )
    state = init_random_disk(p, n1, n2, 1.0, seed=seed)
    state, _ = run(
        state, t_end, RunControls(record_energy=False, record_interval=t_end / 10.0)
    )
    c1 = state.pos1.mean(axis=0)
    c2 = state.pos2.mean(axis=0)
    return float(np.hypot(*(c1 - c2))) / math.sqrt(p.a_s / p.b_s)


def cmd_weakcross(ns) -> None:
    if ns.ratio is not None:
        s = d_of_ab_ratio(ns.ratio)
        emit(asdict(s))
        return
    samples = curve_sample(ns.ratio_min, ns.ratio_max, ns.n_points)
    rows = [(s.ratio_AB, s.d_over_R, s.regime, s.residual) for s in samples]
    if ns.out_csv:
        write_csv(ns.out_csv, ("ratio_AB", "d_over_R", "regime", "residual"), rows)
    overlay_rows = []
    if ns.overlay_ratios:
        ratios = [float(r) for r in ns.overlay_ratios.split(",")]
        for k, ratio in enumerate(ratios):
            sim = _overlay_point(
                ratio, ns.overlay_M, ns.overlay_eta, ns.overlay_N, ns.overlay_t_end,
                seed=ns.seed + k,
            )
            overlay_rows.append((ratio, ns.overlay_M, sim))
        if ns.overlay_csv:
            write_csv(ns.overlay_csv, ("ratio_AB", "mass_ratio", "d_over_R_sim"), overlay_rows)
    if ns.out_svg:
        plot = SvgPlot(
            (ns.ratio_min, ns.ratio_max),
            (0.0, max(s.d_over_R for s in samples) * 1.1 + 1e-9),
        )
        plot.axes("A/B", "d/R")
        plot.polyline([s.ratio_AB for s in samples], [s.d_over_R for s in samples])
        for ratio, _, sim in overlay_rows:
            plot.circle(ratio, sim, radius_px=3.0)
        plot.save(ns.out_svg)
    emit(
        {
            "n_points": len(samples),
            "ratio_range": [ns.ratio_min, ns.ratio_max],
            "csv": ns.out_csv or "",
            "overlay": [list(r) for r in overlay_rows],
        }
    )


def cmd_phase_diagram(ns) -> None:
    ax = cell_centered_axis(ns.grid, 0.0, ns.extent)
    A, B = np.meshgrid(ax, ax, indexing="ij")
    codes = region_code_grid(A, B, ns.M)
    verdict_light = target_verdict_grid(
        EquilibriumKind.TARGET_LIGHT_IN, A, B, ns.M, ns.m_max
    )
    verdict_heavy = target_verdict_grid(
        EquilibriumKind.TARGET_HEAVY_IN, A, B, ns.M, ns.m_max
    )
    masks = {
        kind: existence_region_mask(kind, codes) & (codes != 0)
        for kind in EquilibriumKind
    }
    rows = []
    for i in range(ns.grid):
        for j in range(ns.grid):
            rows.append(
                (
                    float(A[i, j]),
                    float(B[i, j]),
                    _REGION_NAMES[int(codes[i, j])],
                    bool(masks[EquilibriumKind.TARGET_LIGHT_IN][i, j]),
                    bool(masks[EquilibriumKind.TARGET_HEAVY_IN][i, j]),
                    bool(masks[EquilibriumKind.OVERLAP_LIGHT_IN][i, j]),
                    bool(masks[EquilibriumKind.OVERLAP_HEAVY_IN][i, j]),
                    int(verdict_light[i, j]),
                    int(verdict_heavy[i, j]),
                )
            )
    if ns.out_csv:
        write_csv(
            ns.out_csv,
            (
                "A",
                "B",
                "region",
                "exists_target_light",
                "exists_target_heavy",
                "exists_overlap_light",
                "exists_overlap_heavy",
                "verdict_target_light",
                "verdict_target_heavy",
            ),
            rows,
        )
    if ns.out_svg:
        _phase_svg(ns, ax, codes)
    emit({"grid": ns.grid, "M": ns.M, "csv": ns.out_csv or "", "svg": ns.out_svg or ""})


def _phase_svg(ns, ax, codes):
    plot = SvgPlot((0.0, ns.extent), (0.0, ns.extent))
    d = ax[1] - ax[0] if len(ax) > 1 else ns.extent
    for i, a in enumerate(ax):
        for j, b in enumerate(ax):
            plot.cell(a, b, d, d, _REGION_COLORS[int(codes[i, j])])
    bs = np.linspace(1e-3, ns.extent, 400)
    c1 = (1.0 + ns.M * bs) / (bs + ns.M)
    c2 = (bs + ns.M) / (1.0 + ns.M * bs)
    plot.polyline(c1, bs, color="#000000", width=2.0)
    plot.polyline(c2, bs, color="#000000", width=2.0)
    plot.polyline([0.0, ns.extent], [0.0, ns.extent], color="#000000", width=2.0)
    plot.axes("A", "B")
    plot.save(ns.out_svg)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="swarm-eq",
        description="Two-species swarm equilibria: existence, stability, dynamics.",
    )
    parser.add_argument("--config", help="JSON config file; explicit flags override it")
    sub = parser.add_subparsers(dest="command", required=True)

    s = sub.add_parser("region", help="classify a phase point into D1..D6 or a boundary")
    add_param_flags(s)
    s.set_defaults(func=cmd_region)

    for name, fn in (
        ("equilibrium", cmd_equilibrium),
        ("lambda", cmd_lambda),
        ("stability", cmd_stability),
    ):
        s = sub.add_parser(name)
        add_param_flags(s)
        s.add_argument(
            "--kind",
            required=True,
            choices=[k.value for k in EquilibriumKind],
        )
        if name == "lambda":
            s.add_argument("--r-max", dest="r_max", type=float, default=None)
            s.add_argument("--n-samples", dest="n_samples", type=int, default=400)
            s.add_argument("--out-csv", dest="out_csv", default=None)
            s.add_argument("--out-svg", dest="out_svg", default=None)
        if name == "stability":
            s.add_argument("--m-max", dest="m_max", type=int, default=32)
            s.add_argument("--out-csv", dest="out_csv", default=None)
        s.set_defaults(func=fn)

    s = sub.add_parser("simulate", help="integrate the particle system")
    add_param_flags(s)
    s.add_argument("--init", choices=("random", "equilibrium"), default="random")
    s.add_argument("--kind", choices=[k.value for k in EquilibriumKind], default="target-light")
    s.add_argument("--N1", type=int, default=100)
    s.add_argument("--N2", type=int, default=100)
    s.add_argument("--seed", type=int, default=0)
    s.add_argument("--radius", type=float, default=1.0)
    s.add_argument("--t-end", dest="t_end", type=float, default=50.0)
    s.add_argument("--snapshot-every", dest="snapshot_every", type=float, default=10.0)
    s.add_argument("--record-interval", dest="record_interval", type=float, default=None)
    s.add_argument("--out", default="run")
    s.set_defaults(func=cmd_simulate)

    s = sub.add_parser("weakcross", help="species separation vs A/B")
    s.add_argument("--ratio", type=float, default=None)
    s.add_argument("--ratio-min", dest="ratio_min", type=float, default=0.5)
    s.add_argument("--ratio-max", dest="ratio_max", type=float, default=8.0)
    s.add_argument("--n-points", dest="n_points", type=int, default=50)
    s.add_argument("--out-csv", dest="out_csv", default=None)
    s.add_argument("--out-svg", dest="out_svg", default=None)
    s.add_argument(
        "--overlay-ratios",
        dest="overlay_ratios",
        default=None,
        help="comma-separated A/B values at which to overlay particle estimates",
    )
    s.add_argument("--overlay-csv", dest="overlay_csv", default=None)
    s.add_argument("--overlay-M", dest="overlay_M", type=float, default=2.0)
    s.add_argument("--overlay-eta", dest="overlay_eta", type=float, default=0.05)
    s.add_argument("--overlay-N", dest="overlay_N", type=int, default=200)
    s.add_argument("--overlay-t-end", dest="overlay_t_end", type=float, default=3000.0)
    s.add_argument("--seed", type=int, default=0)
    s.set_defaults(func=cmd_weakcross)

    s = sub.add_parser("phase-diagram", help="sweep an (A, B) grid")
    s.add_argument("-M", type=float, default=2.0)
    s.add_argument("--grid", type=int, default=100)
    s.add_argument("--extent", type=float, default=5.0)
    s.add_argument("--m-max", dest="m_max", type=int, default=32)
    s.add_argument("--out-csv", dest="out_csv", default=None)
    s.add_argument("--out-svg", dest="out_svg", default=None)
    s.set_defaults(func=cmd_phase_diagram)

    return parser


def _apply_config_file(parser, argv):
    """Use config-file entries as defaults for the chosen subcommand."""
    if "--config" not in argv:
        return argv
    idx = argv.index("--config")
    path = argv[idx + 1]
    with open(path) as fh:
        cfg = RunConfig.from_json(fh.read())
    rest = [a for k, a in enumerate(argv) if k not in (idx, idx + 1)]
    if not rest or rest[0] != cfg.command:
        rest = [cfg.command] + rest
    extra = []
    for key, value in sorted(cfg.values.items()):
        flag = "--" + key.replace("_", "-") if len(key) > 1 else "-" + key
        if key in ("A", "B", "M", "M1", "M2"):
            flag = "-" + key if len(key) == 1 else "--" + key
        if isinstance(value, bool):
            if value:
                extra.append(flag)
            continue
        extra.extend([flag, str(value)])
    # extras first so explicit argv flags win
    return [rest[0]] + extra + rest[1:]


def main(argv=None) -> int:
    argv = list(sys.argv[1:] if argv is None else argv)
    parser = build_parser()
    start = time.time()
    try:
        argv = _apply_config_file(parser, argv)
        ns = parser.parse_args(argv)
        config = {
            k: v
            for k, v in vars(ns).items()
            if k not in ("func", "config") and v is not None
        }
        ns.func(ns)
    except SwarmEqError as exc:
        sys.stderr.write(
            json_canonical({"error": type(exc).__name__, "message": str(exc)}) + "\n"
        )
        return 3
    except (ValueError, OSError, json.JSONDecodeError) as exc:
        sys.stderr.write(
            json_canonical({"error": type(exc).__name__, "message": str(exc)}) + "\n"
        )
        return 2
    meta = {
        "config_hash": config_hash(config),
        "version": __version__,
        "wall_time_s": round(time.time() - start, 6),
    }
    sys.stderr.write(json_canonical(meta) + "\n")
    return 0


if __name__ == "__main__":
    sys.exit(main())
