"""Command-line interface: figure data regeneration, state dumps, Wigner grids, QFI.

Exit codes: 0 success, 2 argument errors, 3 numerical errors (truncation,
trace loss, non-positive densities). Grid arguments accept either a comma
list (``1.0,1.5,2.0``) or a ``lo:hi:step`` range that includes ``hi`` up to
a 1e-12 slack. Angles accept radians or a ``deg`` suffix (``45deg``).
"""

from __future__ import annotations

import argparse
import json
import math
import sys
from pathlib import Path

import numpy as np

from . import experiments
from .errors import QuadcatError
from .fock_core import TruncationConfig, fock_state
from .metrics import qfi_displacement, wigner
from .state_factory import (
    CatAxis,
    CatParity,
    CatPhase,
    SqueezeSign,
    coherent,
    four_cat,
    photon_subtract,
    squeezed_vacuum,
    two_cat,
)


def parse_phase(token: str) -> float:
    token = token.strip()
    if token.lower().endswith("deg"):
        return math.radians(float(token[:-3]))
    return float(token)


def parse_grid(token: str) -> tuple[float, ...]:
    """Comma list or lo:hi:step range, inclusive of hi within 1e-12."""
    token = token.strip()
    if ":" in token:
        parts = token.split(":")
        if len(parts) != 3:
            raise ValueError(f"range syntax is lo:hi:step, got {token!r}")
        lo, hi, step = (float(p) for p in parts)
        if step <= 0:
            raise ValueError("range step must be positive")
        count = int(math.floor((hi - lo) / step + 1e-9)) + 1
        values = tuple(lo + i * step for i in range(max(count, 1)))
        return tuple(v for v in values if v <= hi + 1e-12 * max(1.0, abs(hi)))
    return tuple(float(p) for p in token.split(",") if p.strip())


def parse_int_list(token: str) -> tuple[int, ...]:
    return tuple(int(round(v)) for v in parse_grid(token))


_SQUEEZE_SIGNS = {
    "s": SqueezeSign.S,
    "sdag": SqueezeSign.S_DAGGER,
    "s_dagger": SqueezeSign.S_DAGGER,
}


def state_from_spec(spec: str, dim: int | None, tail_tol: float):
    """Build a pure state from a colon-packed spec like ``coherent:1.0`` or ``four_cat:1.5:0:45deg``."""
    parts = spec.split(":")
    kind, args = parts[0].strip().lower(), parts[1:]

    def trunc_for(amplitude: complex, floor: int = 2) -> TruncationConfig:
        if dim is not None:
            return TruncationConfig(dim, tail_tol)
        base = TruncationConfig.for_amplitude(amplitude, tail_tol)
        return TruncationConfig(max(base.dim, floor), tail_tol)

    if kind == "fock":
        n = int(args[0])
        return fock_state(n, trunc_for(0.0, floor=n + 2)), {"kind": "fock", "n": n}
    if kind == "coherent":
        amp = float(args[0]) * np.exp(1j * (parse_phase(args[1]) if len(args) > 1 else 0.0))
        return coherent(amp, trunc_for(amp)), {"kind": "coherent", "alpha": str(amp)}
    if kind == "two_cat":
        mag = float(args[0])
        axis = CatAxis(args[1].strip().lower()) if len(args) > 1 else CatAxis.REAL
        parity = CatParity(args[2].strip().lower()) if len(args) > 2 else CatParity.EVEN
        amp = mag * np.exp(1j * (parse_phase(args[3]) if len(args) > 3 else 0.0))
        state = two_cat(amp, CatPhase(axis, parity), trunc_for(amp))
        return state, {"kind": "two_cat", "alpha": str(amp), "axis": axis.value, "parity": parity.value}
    if kind == "four_cat":
        mag = float(args[0])
        k = int(args[1]) if len(args) > 1 else 0
        amp = mag * np.exp(1j * (parse_phase(args[2]) if len(args) > 2 else 0.0))
        return four_cat(amp, k, trunc_for(amp)), {"kind": "four_cat", "beta": str(amp), "k": k}
    if kind in ("squeezed", "squeezed_vacuum", "subtracted"):
        r = float(args[0])
        sign = _SQUEEZE_SIGNS[args[1].strip().lower()] if len(args) > 1 else SqueezeSign.S
        trunc = TruncationConfig(dim, tail_tol) if dim is not None else TruncationConfig(80, tail_tol)
        state = squeezed_vacuum(r, sign, trunc)
        meta = {"kind": kind, "r": r, "sign": sign.value}
        if kind == "subtracted":
            state, _ = photon_subtract(state)
        return state, meta
    raise ValueError(f"unknown state kind {kind!r}")


def _state_payload(state, meta: dict) -> dict:
    return {
        "dim": state.trunc.dim,
        "amplitudes": [[float(a.real), float(a.imag)] for a in state.amplitudes],
        "metadata": {**meta, "tail": state.tail, "tail_tol": state.trunc.tail_tol},
    }


def _emit(text: str, out: str | None) -> None:
    if out is None or out == "-":
        sys.stdout.write(text)
    else:
        Path(out).write_text(text, encoding="utf-8", newline="")


def _write_result(result, args) -> None:
    text = result.to_json() if args.format == "json" else result.to_csv()
    _emit(text, args.out)


_PLOT_TEMPLATE = """\
# Plots {name}.csv (written alongside this script). Requires matplotlib.
import csv
from collections import defaultdict

import matplotlib.pyplot as plt

rows = list(csv.DictReader(open({csv_name!r})))
series = defaultdict(list)
for row in rows:
    series[row[{group!r}]].append((float(row[{x!r}]), float(row[{y!r}])))
for label, pts in series.items():
    pts.sort()
    plt.plot([p[0] for p in pts], [p[1] for p in pts], label=f"{group}={{label}}")
plt.xlabel({x!r})
plt.ylabel({y!r})
plt.legend()
plt.savefig({name!r} + ".png", dpi=160)
"""

_PLOT_AXES = {
    "fig2": ("eta", "mean_fidelity", "abs_beta"),
    "fig3": ("abs_beta", "qfi", "eta"),
    "fig4": ("abs_alpha", "fidelity", "m"),
    "fig5": ("beta_target", "fidelity", "n"),
}


def _maybe_plot_script(args, parser) -> None:
    if not getattr(args, "plot_script", False):
        return
    if args.out in (None, "-"):
        parser.error("--plot-script requires --out")
    x, y, group = _PLOT_AXES[args.command]
    out = Path(args.out)
    script = _PLOT_TEMPLATE.format(name=out.stem, csv_name=out.name, x=x, y=y, group=group)
    out.with_name(out.stem + "_plot.py").write_text(script, encoding="utf-8")


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--dim", type=int, default=None, help="override the truncated dimension")
    common.add_argument("--tail-tol", type=float, default=1e-10, help="truncated-tail budget")
    common.add_argument("--n-cutoff", type=int, default=20, help="largest detector outcome kept")
    common.add_argument("--out", default=None, help="output path (default: stdout)")
    common.add_argument("--format", choices=("csv", "json"), default="csv")
    common.add_argument("--threads", type=int, default=1, help="worker threads for sweep rows")

    parser = argparse.ArgumentParser(prog="quadcat", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True)

    fig2 = sub.add_parser("fig2", parents=[common], help="fidelity vs detector efficiency")
    fig2.add_argument("--beta", default=None, help="input cat amplitudes (list or range)")
    fig2.add_argument("--eta", default=None, help="detector efficiencies (list or range)")
    fig2.add_argument("--panels", action="store_true", help="also write the Wigner panel JSON")
    fig2.add_argument("--plot-script", action="store_true")

    fig3 = sub.add_parser("fig3", parents=[common], help="displacement QFI sweep")
    fig3.add_argument("--beta", default=None)
    fig3.add_argument("--eta", default=None)
    fig3.add_argument("--phi", default=None, help="displacement directions (radians or Ndeg)")
    fig3.add_argument("--epsilon", type=float, default=1e-3)
    fig3.add_argument("--plot-script", action="store_true")

    fig4 = sub.add_parser("fig4", parents=[common], help="multiplexed on-off heralding")
    fig4.add_argument("--alpha", default=None)
    fig4.add_argument("--m", default=None, help="detector counts (list)")
    fig4.add_argument("--plot-script", action="store_true")

    fig5 = sub.add_parser("fig5", parents=[common], help="photon-subtracted squeezed inputs")
    fig5.add_argument("--n", default=None, help="PNRD outcomes (list or range)")
    fig5.add_argument("--beta", default=None, help="target cat amplitudes")
    fig5.add_argument("--plot-script", action="store_true")

    state = sub.add_parser("state", parents=[common], help="dump a factory state as JSON")
    state.add_argument("kind", choices=("fock", "coherent", "two_cat", "four_cat", "squeezed_vacuum"))
    state.add_argument("--n", type=int, default=0, help="photon number (fock)")
    state.add_argument("--alpha", type=float, default=1.0, help="amplitude magnitude")
    state.add_argument("--beta", type=float, default=None, help="amplitude magnitude (four_cat)")
    state.add_argument("--arg", default="0", help="amplitude phase (radians or Ndeg)")
    state.add_argument("--k", type=int, default=0, help="four-cat class")
    state.add_argument("--axis", choices=("real", "imaginary"), default="real")
    state.add_argument("--parity", choices=("even", "odd"), default="even")
    state.add_argument("--r", type=float, default=0.5, help="squeezing parameter")
    state.add_argument("--sign", choices=tuple(_SQUEEZE_SIGNS), default="s")
    state.add_argument("--subtract", type=int, default=0, help="photon subtractions to apply")

    wig = sub.add_parser("wigner", parents=[common], help="Wigner grid of a state spec")
    wig.add_argument("--state", required=True, help="state spec, e.g. four_cat:1.5:0:45deg")
    wig.add_argument("--xmin", type=float, default=-5.0)
    wig.add_argument("--xmax", type=float, default=5.0)
    wig.add_argument("--pmin", type=float, default=-5.0)
    wig.add_argument("--pmax", type=float, default=5.0)
    wig.add_argument("--nx", type=int, default=101)
    wig.add_argument("--np", type=int, default=101, dest="n_p")

    qfi = sub.add_parser("qfi", parents=[common], help="displacement QFI of a state spec")
    qfi.add_argument("--state", required=True, help="state spec, e.g. coherent:1.0")
    qfi.add_argument("--phi", default="0", help="displacement direction")
    qfi.add_argument("--epsilon", type=float, default=1e-3)

    return parser


def _spec_string(args) -> str:
    mag = args.beta if args.beta is not None else args.alpha
    if args.kind == "fock":
        return f"fock:{args.n}"
    if args.kind == "coherent":
        return f"coherent:{mag}:{args.arg}"
    if args.kind == "two_cat":
        return f"two_cat:{mag}:{args.axis}:{args.parity}:{args.arg}"
    if args.kind == "four_cat":
        return f"four_cat:{mag}:{args.k}:{args.arg}"
    return f"squeezed_vacuum:{args.r}:{args.sign}"


def _run(args, parser) -> None:
    if args.command == "fig2":
        result = experiments.run_fig2(
            beta_list=parse_grid(args.beta) if args.beta else None,
            eta_grid=parse_grid(args.eta) if args.eta else None,
            n_cutoff=args.n_cutoff, dim=args.dim, tail_tol=args.tail_tol, threads=args.threads,
        )
        _write_result(result, args)
        _maybe_plot_script(args, parser)
        if args.panels:
            if args.out in (None, "-"):
                parser.error("--panels requires --out")
            panels = experiments.fig2_wigner_panels(
                n_cutoff=args.n_cutoff, dim=args.dim, tail_tol=args.tail_tol
            )
            path = Path(args.out)
            path.with_name(path.stem + "_panels.json").write_text(
                json.dumps(panels, indent=2, sort_keys=True) + "\n", encoding="utf-8"
            )
    elif args.command == "fig3":
        result = experiments.run_fig3(
            beta_grid=parse_grid(args.beta) if args.beta else None,
            eta_list=parse_grid(args.eta) if args.eta else None,
            phi_samples=tuple(parse_phase(t) for t in args.phi.split(",")) if args.phi else None,
            n_cutoff=args.n_cutoff, dim=args.dim, tail_tol=args.tail_tol,
            epsilon=args.epsilon, threads=args.threads,
        )
        _write_result(result, args)
        _maybe_plot_script(args, parser)
    elif args.command == "fig4":
        result = experiments.run_fig4(
            alpha_grid=parse_grid(args.alpha) if args.alpha else None,
            m_list=parse_int_list(args.m) if args.m else None,
            dim=args.dim, tail_tol=args.tail_tol, threads=args.threads,
        )
        _write_result(result, args)
        _maybe_plot_script(args, parser)
    elif args.command == "fig5":
        result = experiments.run_fig5(
            n_list=parse_int_list(args.n) if args.n else None,
            beta_grid=parse_grid(args.beta) if args.beta else None,
            dim=args.dim, tail_tol=args.tail_tol, threads=args.threads,
        )
        _write_result(result, args)
        _maybe_plot_script(args, parser)
    elif args.command == "state":
        state, meta = state_from_spec(_spec_string(args), args.dim, args.tail_tol)
        for _ in range(max(0, args.subtract)):
            state, _ = photon_subtract(state)
        _emit(json.dumps(_state_payload(state, meta), indent=2, sort_keys=True) + "\n", args.out)
    elif args.command == "wigner":
        state, meta = state_from_spec(args.state, args.dim, args.tail_tol)
        grid = wigner(
            state.to_density(), args.xmin, args.xmax, args.pmin, args.pmax, args.nx, args.n_p
        )
        if args.format == "json":
            payload = {
                "x_min": grid.x_min, "x_max": grid.x_max,
                "p_min": grid.p_min, "p_max": grid.p_max,
                "n_x": grid.n_x, "n_p": grid.n_p,
                "reliable": grid.reliable,
                "values": [[float(v) for v in row] for row in grid.values],
                "metadata": meta,
            }
            _emit(json.dumps(payload, indent=2, sort_keys=True) + "\n", args.out)
        else:
            lines = ["x,p,w"]
            xs, ps = grid.x_axis(), grid.p_axis()
            for i, p in enumerate(ps):
                for j, x in enumerate(xs):
                    lines.append(f"{x:.12g},{p:.12g},{grid.values[i, j]:.12g}")
            _emit("\n".join(lines) + "\n", args.out)
    elif args.command == "qfi":
        state, meta = state_from_spec(args.state, args.dim, args.tail_tol)
        est = qfi_displacement(state.to_density(), parse_phase(args.phi), args.epsilon)
        result = experiments.SweepResult(
            ("state", "phi", "epsilon", "qfi", "richardson_residual"),
            ((args.state, est.phi, est.epsilon_used, est.value, est.richardson_residual),),
            {"state": meta, "seedless": True},
        )
        text = result.to_json() if args.format == "json" else (
            "state,phi,epsilon,qfi,richardson_residual\n"
            + f"{args.state},{est.phi:.12g},{est.epsilon_used:.12g},"
            + f"{est.value:.12g},{est.richardson_residual:.12g}\n"
        )
        _emit(text, args.out)


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        _run(args, parser)
    except SystemExit as exc:  # parser.error inside _run
        return int(exc.code or 0)
    except QuadcatError as exc:
        print(f"quadcat: numerical error: {exc}", file=sys.stderr)
        return 3
    except (ValueError, KeyError, IndexError) as exc:
        parser.print_usage(sys.stderr)
        print(f"quadcat: argument error: {exc}", file=sys.stderr)
        return 2
    return 0


cli_main = main

if __name__ == "__main__":
    raise SystemExit(main())
