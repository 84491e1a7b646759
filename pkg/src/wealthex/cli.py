"""Command-line entry point: ``wealthex simulate|sweep|tables|preset``."""

from __future__ import annotations

import argparse
import logging
import sys
from pathlib import Path

from . import gf
from .config import DEFAULT_CONFIG, SimConfig, load_config
from .experiment import component_census, run_experiment, sweep
from .netgen import chi_from_counts
from .presets import PRESETS, figure_preset


def _parse_list(text: str, cast=float) -> list:
    return [cast(x) for x in text.split(",") if x.strip()]


def _num(x: str):
    f = float(x)
    return int(f) if f.is_integer() and "." not in x else f


def _add_run_flags(p: argparse.ArgumentParser) -> None:
    p.add_argument("--config", type=Path, help="flat 'key = value' config file")
    p.add_argument("--seed", type=int)
    p.add_argument("--rule", choices=("additive", "multiplicative"))
    p.add_argument("--bankruptcy", action="store_true", default=None)
    net = p.add_mutually_exclusive_group()
    net.add_argument("--kmax", type=int)
    net.add_argument("--fully-connected", action="store_true")
    p.add_argument("--n", type=int)
    p.add_argument("--mean-w", type=int)
    p.add_argument("--c", type=int, help="additive stake")
    p.add_argument("--nu", type=float, help="multiplicative rate")
    p.add_argument("--mcs", type=int, help="MCS budget")
    p.add_argument("--realizations", type=int)
    p.add_argument("--stride", type=int)
    p.add_argument("--snapshots", help="comma-separated snapshot times")
    p.add_argument("--stop-at-condensation", action="store_true", default=None)
    p.add_argument("--workers", type=int)
    p.add_argument("--out", type=Path, default=Path("out"))


def config_from_args(args) -> SimConfig:
    cfg = load_config(args.config, DEFAULT_CONFIG) if args.config else DEFAULT_CONFIG
    kw = {}
    for flag, key in (("seed", "seed"), ("rule", "kind"), ("n", "n"), ("mean_w", "mean_w"),
                      ("c", "c"), ("nu", "nu"), ("mcs", "mcs_budget"),
                      ("realizations", "realizations"), ("stride", "stride"),
                      ("workers", "workers"), ("bankruptcy", "bankruptcy"),
                      ("stop_at_condensation", "stop_at_condensation")):
        v = getattr(args, flag)
        if v is not None:
            kw[key] = v
    if args.kmax is not None:
        kw["k_max"] = args.kmax
    elif args.fully_connected:
        kw["k_max"] = None
    if args.snapshots:
        kw["snapshot_times"] = tuple(_parse_list(args.snapshots, int))
    return cfg.with_(**kw)


def _report(res, out: Path) -> None:
    tcs = res.reached_t_c()
    print(f"wrote {out}  realizations={len(res.t_c)} conserved={res.conserved} "
          f"condensed={len(tcs)}/{len(res.t_c)}")
    for f in res.fits:
        print("  fit", f.csv_row())


def cmd_simulate(args) -> int:
    cfg = config_from_args(args)
    res = run_experiment(cfg, args.out)
    _report(res, args.out)
    return 0


def cmd_sweep(args) -> int:
    cfg = config_from_args(args)
    values = [_num(v) for v in args.values.split(",") if v.strip()]
    res = sweep(cfg, args.param.replace("k_max", "kmax"), values, args.out)
    sys.stdout.write(res.csv())
    if res.scaling is not None:
        print(f"scaling exponent {res.scaling.p2:.4f} prefactor {res.scaling.p1:.4g}")
    return 0


def tables_text(k_values, s_max: int, s_show: int) -> dict[str, str]:
    z = ["k_max,z1,z2,z1_float,z2_float,has_giant"]
    u = ["k_max,u,u_exact,S,mean_s,finite_mass,tail_mass"]
    ps = ["k_max,s,P_s,chi_T_chi,chi,P_s_float,chi_float"]
    for k in k_values:
        m = gf.gf_model(k, s_max)
        z.append(f"{k},{m.z1},{m.z2},{float(m.z1):.10g},{float(m.z2):.10g},{int(m.has_giant)}")
        u.append(f"{k},{m.u:.12g},{'' if m.u_exact is None else m.u_exact},{m.s_frac:.12g},"
                 f"{m.mean_s:.12g},{m.finite_mass:.12g},{m.tail_mass:.3g}")
        hs = gf.h0(k, s_max)
        w = gf.chi_weights(k, s_max)
        for s in range(1, s_show + 1):
            c = w[s] / m.chi_t if s >= 2 else 0
            ps.append(f"{k},{s},{hs[s]},{w[s]},{float(c):.12g},{float(hs[s]):.12g},{float(c):.12g}")
    return {"table_z.csv": "\n".join(z) + "\n", "table_u.csv": "\n".join(u) + "\n",
            "table_ps.csv": "\n".join(ps) + "\n"}


def cmd_tables(args) -> int:
    texts = tables_text(_parse_list(args.kmax, int), args.smax, args.show)
    if args.out is None:
        sys.stdout.write("\n".join(texts.values()))
    else:
        args.out.mkdir(parents=True, exist_ok=True)
        for name, text in texts.items():
            (args.out / name).write_text(text)
        print(f"wrote {', '.join(texts)} to {args.out}")
    return 0


def cmd_preset(args) -> int:
    p = figure_preset(args.name)
    out = args.out / p.name
    over = {}
    if args.realizations is not None:
        over["realizations"] = args.realizations
    if args.seed is not None:
        over["seed"] = args.seed
    if args.workers is not None:
        over["workers"] = args.workers
    if p.kind == "tables":
        args.kmax, args.smax, args.show = ",".join(map(str, p.k_max_values)), gf.DEFAULT_S_MAX, 7
        args.out = out
        return cmd_tables(args)
    if p.kind == "components":
        out.mkdir(parents=True, exist_ok=True)
        wirings = over.get("realizations", 100)
        lines = ["k_max,mean_degree,s,count,chi_emp"]
        for k in p.k_max_values:
            counts, degs, _ = component_census(DEFAULT_CONFIG.n, k, wirings, over.get("seed", 0))
            chi = chi_from_counts(counts)
            mk = sum(degs) / len(degs)
            for s in sorted(counts):
                lines.append(f"{k},{mk:.6g},{s},{counts[s]},{chi.get(s, 0.0):.10g}")
        (out / "components.csv").write_text("\n".join(lines) + "\n")
        print(f"wrote {out / 'components.csv'}")
        return 0
    for label, cfg in p.runs:
        res = run_experiment(cfg.with_(**over), out / label)
        _report(res, out / label)
    for label, cfg, param, values in p.sweeps:
        res = sweep(cfg.with_(**over), param, values, out / label)
        print(f"[{label}]")
        sys.stdout.write(res.csv())
        if res.scaling is not None:
            print(f"scaling exponent {res.scaling.p2:.4f}")
    return 0


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="wealthex", description=__doc__)
    ap.add_argument("-v", "--verbose", action="store_true")
    sub = ap.add_subparsers(dest="command", required=True)

    p = sub.add_parser("simulate", help="run one experiment and write its output bundle")
    _add_run_flags(p)
    p.set_defaults(func=cmd_simulate)

    p = sub.add_parser("sweep", help="condensation times (n, dw, nu) or b values (kmax) over a parameter")
    _add_run_flags(p)
    p.add_argument("--param", required=True, choices=("n", "dw", "nu", "kmax"))
    p.add_argument("--values", required=True, help="comma-separated values")
    p.set_defaults(func=cmd_sweep)

    p = sub.add_parser("tables", help="generating-function tables as CSV")
    p.add_argument("--kmax", default="2,3,4,20", help="comma-separated k_max values")
    p.add_argument("--smax", type=int, default=gf.DEFAULT_S_MAX)
    p.add_argument("--show", type=int, default=7, help="rows of the P_s table per k_max")
    p.add_argument("--out", type=Path)
    p.set_defaults(func=cmd_tables)

    p = sub.add_parser("preset", help="run the canned configuration behind a figure or table")
    p.add_argument("name", choices=sorted(PRESETS))
    p.add_argument("--out", type=Path, default=Path("out"))
    p.add_argument("--realizations", type=int)
    p.add_argument("--seed", type=int)
    p.add_argument("--workers", type=int)
    p.set_defaults(func=cmd_preset)
    return ap


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        return args.func(args)
    except ValueError as e:
        print(f"error: {e}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
