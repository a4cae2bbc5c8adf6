"""Command-line front end: every experiment as a reproducible subcommand.

Each subcommand validates its arguments, runs the underlying module, and
writes machine-readable CSV/JSON artifacts plus a run manifest into the
directory given by --out. Nothing is written anywhere else. Exit codes:
0 success, 2 usage error, 1 numeric failure (training divergence).
"""

from __future__ import annotations

import argparse
import json
import os
import sys
import time
from dataclasses import asdict, dataclass, field
from pathlib import Path

from . import __version__, autodiff_net
from ._kernels import BACKEND
from .discrepancy import METHODS as DISC_METHODS
from .discrepancy import star_discrepancy_1d, star_discrepancy_nd
from .lowdisc import KINDS, GeneratorSpec, generate, write_csv
from .pool_sampler import coverage_probability, expected_missed_fraction
from .quadrature import METHODS as QUAD_METHODS
from .quadrature import convergence_study, f_exp, f_sin
from .trainer import (
    TrainConfig,
    TrainDiverged,
    compare_samplers,
    parse_sampler,
    train,
)

INTEGRANDS = {"f_sin": f_sin, "f_exp": f_exp}


@dataclass
class RunManifest:
    """Everything needed to reproduce one invocation bit-exactly.

    The manifest is written before the run with status "incomplete" and
    atomically replaced on success, so an aborted run leaves an honest
    marker behind instead of a half-written file.
    """

    subcommand: str
    config: dict
    version: str = __version__
    backend: str = BACKEND
    seeds: dict = field(default_factory=dict)
    outputs: list = field(default_factory=list)
    wall_time_s: float = float("nan")
    status: str = "incomplete"


def _write_atomic(path: Path, text: str) -> None:
    tmp = path.with_name(path.name + ".tmp")
    tmp.write_text(text)
    os.replace(tmp, path)


def _write_json(path: Path, payload) -> None:
    _write_atomic(path, json.dumps(payload, indent=2, sort_keys=True) + "\n")


def _write_manifest(out: Path, manifest: RunManifest) -> None:
    _write_json(out / "manifest.json", asdict(manifest))


def _int_list(text: str) -> list[int]:
    try:
        return [int(tok) for tok in text.split(",") if tok.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated integers, got {text!r}")


def _str_list(text: str) -> list[str]:
    return [tok.strip() for tok in text.split(",") if tok.strip()]


# ------------------------------------------------------------------ subcommands


def cmd_gen(args, out: Path, manifest: RunManifest) -> int:
    spec = GeneratorSpec(args.kind, args.d, seed=args.seed, offset=args.offset)
    ps = generate(spec, args.n)
    write_csv(ps, out / "points.csv")
    manifest.seeds = {"seed": args.seed}
    manifest.outputs = ["points.csv"]
    print(f"wrote {args.n} {args.kind} points (d={args.d}) to {out / 'points.csv'}")
    return 0


def cmd_quad(args, out: Path, manifest: RunManifest) -> int:
    integrand = INTEGRANDS[args.integrand](args.d)
    curves = convergence_study(
        integrand,
        args.n_grid,
        methods=args.methods,
        n_seeds=args.seeds,
        seed0=args.seed0,
        n_scale=args.n_scale,
    )
    lines = ["method,N,mean_abs_err,std_err"]
    for c in curves:
        for n, err, spread in zip(c.ns, c.mean_abs_err, c.std_err):
            lines.append(f"{c.method},{n},{err:.17g},{spread:.17g}")
    _write_atomic(out / "quad.csv", "\n".join(lines) + "\n")
    slopes = {
        c.method: {"slope": c.slope, "intercept": c.intercept, "err_at_max_n": c.mean_abs_err[-1]}
        for c in curves
    }
    payload = {
        "integrand": args.integrand,
        "dim": args.d,
        "exact": integrand.exact,
        "slopes": slopes,
    }
    _write_json(out / "slopes.json", payload)
    manifest.seeds = {"seed0": args.seed0, "n_seeds": args.seeds}
    manifest.outputs = ["quad.csv", "slopes.json"]
    print(json.dumps(payload, indent=2, sort_keys=True))
    return 0


def cmd_discrepancy(args, out: Path, manifest: RunManifest) -> int:
    spec = GeneratorSpec(args.kind, args.d, seed=args.seed, offset=args.offset)
    ps = generate(spec, args.n)
    if args.d == 1 and args.method == "auto":
        report = star_discrepancy_1d(ps.points)
    else:
        report = star_discrepancy_nd(
            ps.points, method=args.method, n_corners=args.corners, seed=args.seed
        )
    payload = {
        "kind": args.kind,
        "dim": args.d,
        "n": args.n,
        "offset": args.offset,
        "dstar": report.value,
        "method": report.method,
    }
    _write_json(out / "discrepancy.json", payload)
    manifest.seeds = {"seed": args.seed}
    manifest.outputs = ["discrepancy.json"]
    print(json.dumps(payload, indent=2, sort_keys=True))
    return 0


def cmd_coverage(args, out: Path, manifest: RunManifest) -> int:
    result = coverage_probability(args.n, args.nb, args.s, seed=args.seed, n_trials=args.trials)
    payload = {
        "method": result.method,
        "n_pool": args.n,
        "n_b": args.nb,
        "s": args.s,
        "expected_missed_fraction": expected_missed_fraction(args.n, args.nb, args.s),
    }
    if result.method == "closed_form":
        payload["p_exact"] = result.value
    else:
        payload["p_sim"] = result.value
        payload["n_trials"] = result.n_trials
    _write_json(out / "coverage.json", payload)
    manifest.seeds = {"seed": args.seed}
    manifest.outputs = ["coverage.json"]
    print(json.dumps(payload, indent=2, sort_keys=True))
    return 0


def _train_config(args) -> TrainConfig:
    sampler, use_rad = parse_sampler(args.sampler)
    widths = tuple(args.widths) if args.widths else (args.d, 50, 50, 50, 1)
    return TrainConfig(
        problem=args.problem,
        dim=args.d,
        alpha=args.alpha,
        coeff_seed=args.coeff_seed,
        sampler=sampler,
        use_rad=use_rad,
        n_r=args.n_r,
        n_bc=args.n_bc,
        n_scale=args.n_scale,
        epochs=args.epochs,
        iters_per_epoch=args.iters,
        widths=widths,
        lr=args.lr,
        weight_bc=args.weight_bc,
        seed_params=args.seed_params,
        seed_sampler=args.seed_sampler,
        n_test=args.n_test,
        seed_test=args.seed_test,
    )


def _write_history(path: Path, losses, rels) -> None:
    lines = ["epoch,mean_loss,rel_l2"]
    for i, (lo, re) in enumerate(zip(losses, rels)):
        lines.append(f"{i},{lo:.17g},{re:.17g}")
    _write_atomic(path, "\n".join(lines) + "\n")


def cmd_train(args, out: Path, manifest: RunManifest) -> int:
    cfg = _train_config(args)
    manifest.config = asdict(cfg)
    manifest.seeds = {
        "seed_params": cfg.seed_params,
        "seed_sampler": cfg.seed_sampler,
        "seed_test": cfg.seed_test,
    }
    try:
        report = train(cfg)
        diverged = False
    except TrainDiverged as exc:
        report = exc.report
        diverged = True
    _write_history(out / "history.csv", report.epoch_losses, report.epoch_rel_l2)
    payload = {
        "problem": cfg.problem,
        "dim": cfg.dim,
        "sampler": cfg.sampler + ("+rad" if cfg.use_rad else ""),
        "epochs_run": len(report.epoch_losses),
        "rel_l2": report.rel_l2,
        "wall_time_s": report.wall_time_s,
        "diverged": diverged,
    }
    _write_json(out / "report.json", payload)
    manifest.outputs = ["history.csv", "report.json"]
    if not diverged:
        autodiff_net.save_checkpoint(report.params, out / "model.npz")
        manifest.outputs.append("model.npz")
    print(json.dumps(payload, indent=2, sort_keys=True))
    return 1 if diverged else 0


def cmd_compare(args, out: Path, manifest: RunManifest) -> int:
    base_cfg = _train_config(args)
    manifest.config = {**asdict(base_cfg), "samplers": args.samplers, "seeds": args.seed_list}
    manifest.seeds = {"seeds": args.seed_list, "seed_test": base_cfg.seed_test}
    table = compare_samplers(base_cfg, args.samplers, args.seed_list)
    lines = ["sampler,rad,seed,rel_l2,failed,diverged,wall_time_s"]
    for c in table.cells:
        lines.append(
            f"{c.sampler},{int(c.use_rad)},{c.seed},{c.rel_l2:.17g},"
            f"{int(c.failed)},{int(c.diverged)},{c.wall_time_s:.17g}"
        )
    _write_atomic(out / "cells.csv", "\n".join(lines) + "\n")
    rows = [asdict(r) for r in table.rows]
    _write_json(out / "summary.json", rows)
    text = table.format()
    _write_atomic(out / "table.txt", text + "\n")
    manifest.outputs = ["cells.csv", "summary.json", "table.txt"]
    print(text)
    return 0


# ------------------------------------------------------------------ parser


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="qrs",
        description="Quasi-random sampling experiments: point sets, quadrature, "
        "discrepancy, pool coverage, and collocation-based network training.",
    )
    parser.add_argument("--version", action="version", version=f"qrs {__version__}")
    sub = parser.add_subparsers(dest="subcommand", required=True)

    def add_out(p):
        p.add_argument("--out", required=True, help="output directory (created if missing)")

    p = sub.add_parser("gen", help="write a point set as CSV")
    p.add_argument("--kind", choices=KINDS, default="halton")
    p.add_argument("--d", type=int, default=2, help="dimension")
    p.add_argument("--n", type=int, default=128, help="number of points")
    p.add_argument("--offset", type=int, default=0, help="skip this many points first")
    p.add_argument("--seed", type=int, default=0, help="stream seed (uniform kind only)")
    add_out(p)
    p.set_defaults(func=cmd_gen)

    p = sub.add_parser("quad", help="integration convergence study")
    p.add_argument("--integrand", choices=sorted(INTEGRANDS), default="f_sin")
    p.add_argument("--d", type=int, default=2)
    p.add_argument(
        "--methods",
        type=_str_list,
        default=list(QUAD_METHODS),
        help=f"comma-separated subset of {','.join(QUAD_METHODS)}",
    )
    p.add_argument(
        "--n-grid",
        type=_int_list,
        default=[2**k for k in range(4, 15)],
        help="comma-separated point counts",
    )
    p.add_argument("--seeds", type=int, default=10, help="independent streams per random method")
    p.add_argument("--seed0", type=int, default=0)
    p.add_argument("--n-scale", type=int, default=10, help="pool oversampling for rqmc methods")
    add_out(p)
    p.set_defaults(func=cmd_quad)

    p = sub.add_parser("discrepancy", help="star discrepancy of a generated point set")
    p.add_argument("--kind", choices=KINDS, default="halton")
    p.add_argument("--d", type=int, default=2)
    p.add_argument("--n", type=int, default=128)
    p.add_argument("--offset", type=int, default=0)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--method", choices=("auto",) + DISC_METHODS, default="auto")
    p.add_argument("--corners", type=int, default=4096, help="samples for the MC lower bound")
    add_out(p)
    p.set_defaults(func=cmd_discrepancy)

    p = sub.add_parser("coverage", help="probability that s batches touch the whole pool")
    p.add_argument("--n", type=int, required=True, help="pool size")
    p.add_argument("--nb", type=int, required=True, help="batch size")
    p.add_argument("--s", type=int, required=True, help="number of batches")
    p.add_argument("--trials", type=int, default=100_000, help="simulation trials (large pools)")
    p.add_argument("--seed", type=int, default=0)
    add_out(p)
    p.set_defaults(func=cmd_coverage)

    def add_train_flags(p):
        p.add_argument(
            "--problem", choices=("poisson", "allen_cahn", "sine_gordon"), default="poisson"
        )
        p.add_argument("--d", type=int, default=2)
        p.add_argument("--alpha", type=float, default=1.0, help="poisson sharpness")
        p.add_argument("--coeff-seed", type=int, default=0, help="nonlinearity coefficient seed")
        p.add_argument("--n-r", type=int, default=1000, help="interior batch size")
        p.add_argument("--n-bc", type=int, default=400, help="boundary batch size")
        p.add_argument("--n-scale", type=int, default=10, help="pool size / batch size")
        p.add_argument("--epochs", type=int, default=20)
        p.add_argument("--iters", type=int, default=500, help="optimizer steps per epoch")
        p.add_argument(
            "--widths",
            type=_int_list,
            default=None,
            help="comma-separated layer widths, input first (default d,50,50,50,1)",
        )
        p.add_argument("--lr", type=float, default=1e-3)
        p.add_argument("--weight-bc", type=float, default=1.0)
        p.add_argument("--seed-params", type=int, default=0)
        p.add_argument("--seed-sampler", type=int, default=0)
        p.add_argument("--n-test", type=int, default=10_000)
        p.add_argument("--seed-test", type=int, default=0)

    p = sub.add_parser("train", help="train one network on one PDE")
    add_train_flags(p)
    p.add_argument(
        "--sampler", default="sobol", help="vanilla | halton | sobol, with optional +rad suffix"
    )
    add_out(p)
    p.set_defaults(func=cmd_train)

    p = sub.add_parser("compare", help="train a grid of (sampler, seed) cells and summarize")
    add_train_flags(p)
    p.add_argument(
        "--samplers",
        type=_str_list,
        default=["vanilla", "halton", "sobol"],
        help="comma-separated sampler labels (+rad suffix allowed)",
    )
    p.add_argument(
        "--seed-list",
        dest="seed_list",
        type=_int_list,
        default=[0, 1, 2],
        help="comma-separated seeds; each seeds both params and sampler",
    )
    p.add_argument("--sampler", help=argparse.SUPPRESS, default="sobol")
    add_out(p)
    p.set_defaults(func=cmd_compare)

    return parser


def _resolved_config(args) -> dict:
    skip = {"func", "out", "subcommand"}
    return {k: v for k, v in vars(args).items() if k not in skip}


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    manifest = RunManifest(subcommand=args.subcommand, config=_resolved_config(args))
    _write_manifest(out, manifest)
    t0 = time.perf_counter()
    try:
        code = args.func(args, out, manifest)
    except ValueError as exc:
        parser.exit(2, f"{parser.prog}: error: {exc}\n")
    except KeyboardInterrupt:
        print("interrupted; manifest left marked incomplete", file=sys.stderr)
        return 130
    manifest.wall_time_s = time.perf_counter() - t0
    manifest.status = "complete"
    _write_manifest(out, manifest)
    return code


if __name__ == "__main__":
    sys.exit(main())
