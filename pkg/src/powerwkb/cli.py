"""Command-line front end: ``powerwkb <subcommand> [flags]``.

All configuration is explicit on the command line.  Results go to
stdout or to ``--out``; the ``figure`` subcommand also renders a PNG
next to its data file unless ``--no-plot`` is given.
"""

from __future__ import annotations

import argparse
import math
import sys
from pathlib import Path

from .bohr_sommerfeld import (
    EnergyRecord,
    GammaRecord,
    Method,
    Parity,
    bse_energy,
    gamma_from_energy,
    modified_bse_energy,
    CLOSED_FORM_ACCURACY,
)
from .errors import ConvergenceError, DomainError
from .fitting import (
    ParityScope,
    eval_energy_fit,
    eval_gamma_fit,
    fit_energy_model,
    fit_gamma_model,
    load_presets,
    preset,
    PolyRootModel,
    RationalSqrtModel,
)
from .reports import (
    COLUMNS,
    ENERGY_FIT_PRESETS,
    FigureRequest,
    OutputFormat,
    ReportError,
    TableRequest,
    emit_figure_data,
    format_sci,
    render_figure_data,
    render_table,
    write_rows,
)
from .spectral import Engine, exact_spectrum
from .special_math import PotentialSpec
from .variational import Family, energy_functional, optimize_params, seed_params


def parse_levels(text: str) -> list[int]:
    """Parse '0-5,10,20' into [0, 1, 2, 3, 4, 5, 10, 20]."""
    out: list[int] = []
    for part in text.split(","):
        part = part.strip()
        if "-" in part:
            lo, hi = (int(v) for v in part.split("-", 1))
            out.extend(range(lo, hi + 1))
        elif part:
            out.append(int(part))
    if any(N < 0 for N in out):
        raise argparse.ArgumentTypeError("quantum numbers must be non-negative")
    return out


def _emit(text: str, out: str | None) -> None:
    if out:
        Path(out).write_text(text, encoding="utf-8")
    else:
        sys.stdout.write(text)


def _fmt(value: str) -> OutputFormat:
    return OutputFormat(value.upper())


def _exact(spec: PotentialSpec, levels: list[int], engine: Engine, tol: float | None) -> list[float]:
    return list(exact_spectrum(spec, max(levels) + 1, tol, engine).energies)


def _energy_records(args) -> list[EnergyRecord]:
    spec = PotentialSpec(args.m)
    method = Method(args.method.upper())
    levels = args.n
    if method is Method.BS:
        return [EnergyRecord(spec.m, N, method, bse_energy(spec, N), CLOSED_FORM_ACCURACY) for N in levels]
    if method in (Method.EXACT_DVR, Method.EXACT_NUMEROV):
        engine = Engine.DVR if method is Method.EXACT_DVR else Engine.NUMEROV
        res = exact_spectrum(spec, max(levels) + 1, args.tol, engine)
        return [EnergyRecord(spec.m, N, method, res.energies[N], res.est_accuracy[N]) for N in levels]
    if method is Method.FIT:
        name = args.preset or ENERGY_FIT_PRESETS.get(spec.m)
        if name is None:
            raise DomainError(f"no energy fit preset for m={spec.m}; pass --preset")
        model = preset(name)
        return [EnergyRecord(spec.m, N, method, eval_energy_fit(model, N), math.nan) for N in levels]
    if method is Method.MODIFIED_BS:
        if args.gamma is not None:
            gammas = {N: args.gamma for N in levels}
        elif args.preset:
            model = preset(args.preset)
            gammas = {N: eval_gamma_fit(model, N) for N in levels}
        else:
            raise DomainError("MODIFIED_BS needs --gamma or --preset")
        return [EnergyRecord(spec.m, N, method, modified_bse_energy(spec, N, gammas[N]), math.nan) for N in levels]
    # variational
    family = {4.0: Family.QUARTIC, 6.0: Family.SEXTIC}.get(spec.m)
    if family is None:
        raise DomainError("variational energies exist for m=4 and m=6 only")
    out = []
    for N in levels:
        if N > 1:
            raise DomainError("the variational command line path covers N = 0 and N = 1")
        seed = seed_params(family, 0, N)
        result = optimize_params(seed, spec)
        out.append(EnergyRecord(spec.m, N, method, result.energy, math.nan))
    return out


def cmd_energy(args) -> int:
    recs = _energy_records(args)
    cells = [[f"{r.m:g}", str(r.N), r.method.value, repr(r.energy),
              "" if math.isnan(r.est_accuracy) else format_sci(r.est_accuracy)] for r in recs]
    _emit(write_rows(("m", "N", "method", "energy", "est_accuracy"), cells, _fmt(args.format), {"m": args.m}), args.out)
    return 0


def cmd_gamma(args) -> int:
    spec = PotentialSpec(args.m)
    levels = args.n
    E = _exact(spec, levels, Engine(args.engine.upper()), args.tol)
    columns = ["N", "parity", "gamma"]
    model = preset(args.preset) if args.preset else None
    if model is not None:
        columns.append("gamma_fit")
    cells = []
    for N in levels:
        row = [str(N), Parity.of(N).value, repr(gamma_from_energy(spec, N, E[N]))]
        if model is not None:
            row.append(repr(eval_gamma_fit(model, N)) if model.parity_scope.admits(N) else "")
        cells.append(row)
    _emit(write_rows(columns, cells, _fmt(args.format), {"m": args.m}), args.out)
    return 0


def cmd_table(args) -> int:
    if args.preset.upper() == "CUSTOM":
        if args.m is None or args.n is None:
            raise DomainError("CUSTOM tables need --m and --n")
    columns = tuple(args.columns.split(",")) if args.columns else ("E_exact", "E_fit", "E_bs", "AD", "RD")
    req = TableRequest(
        preset=args.preset.upper(),
        m=args.m,
        N_list=tuple(args.n or ()),
        columns=columns,
        format=_fmt(args.format),
        tol=args.tol,
        engine=Engine(args.engine.upper()),
    )
    _emit(render_table(req), args.out)
    return 0


def cmd_figure(args) -> int:
    req = FigureRequest(args.figure.upper(), _fmt(args.format), args.tol)
    data = emit_figure_data(req)
    _emit(render_figure_data(data, req.format), args.out)
    plot_path = args.plot
    if plot_path is None and args.out and not args.no_plot:
        plot_path = str(Path(args.out).with_suffix(".png"))
    if plot_path:
        from .plotting import render_figure

        render_figure(data, plot_path)
    return 0


def cmd_fit(args) -> int:
    spec = PotentialSpec(args.m)
    levels = args.n
    E = _exact(spec, levels, Engine.DVR, args.tol)
    if args.kind == "energy":
        recs = [EnergyRecord(spec.m, N, Method.EXACT_DVR, E[N], 0.0) for N in levels]
        fit = fit_energy_model(recs, args.degree)
        model: PolyRootModel = fit.model
        lines = [
            f"model\tpoly_root",
            f"scale_c\t{model.scale_c!r}",
            f"poly_coeffs_ascending\t{' '.join(repr(c) for c in model.poly_coeffs)}",
            f"root_power\t{model.root_power}",
            f"max_rel_dev\t{fit.max_rel_dev!r}",
        ]
    else:
        scope = ParityScope(args.parity)
        data = [GammaRecord(spec.m, N, Parity.of(N), gamma_from_energy(spec, N, E[N])) for N in levels if scope.admits(N)]
        fit = fit_gamma_model(data, args.degree, scope)
        gm: RationalSqrtModel = fit.model
        lines = [
            f"model\trational_sqrt",
            f"parity_scope\t{gm.parity_scope.value}",
            f"num_coeffs_ascending\t{' '.join(repr(c) for c in gm.num_coeffs)}",
            f"den_coeffs_ascending\t{' '.join(repr(c) for c in gm.den_coeffs)}",
            f"max_abs_dgamma\t{fit.max_abs_dgamma!r}",
            f"max_energy_error\t{fit.max_energy_error!r}",
            f"seed_index\t{fit.seed_index}",
        ]
    _emit("\n".join(lines) + "\n", args.out)
    return 0


def cmd_variational(args) -> int:
    family = Family(args.family.lower())
    spec = PotentialSpec(family.m)
    seed = seed_params(family, 0, args.p)
    if args.optimize:
        params, energy = optimize_params(seed, spec)
    else:
        params, energy = seed, energy_functional(seed, spec)
    names = ["A", "B"] + (["C", "D"] if family is Family.SEXTIC else [])
    lines = [f"family\t{family.value}", f"n\t{params.n}", f"p\t{params.p}"]
    lines += [f"{k}\t{getattr(params, k)!r}" for k in names]
    lines.append(f"energy\t{energy!r}")
    _emit("\n".join(lines) + "\n", args.out)
    return 0


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="powerwkb", description="Bohr-Sommerfeld and exact spectra of |x|^m.")
    sub = ap.add_subparsers(dest="command", required=True)

    def common(p, m_required=True, n_default=None):
        p.add_argument("--m", type=float, required=m_required, help="exponent of |x|^m")
        p.add_argument("--n", type=parse_levels, default=n_default, help="levels, e.g. 0-5,10")
        p.add_argument("--format", default="csv", choices=["csv", "json", "markdown"])
        p.add_argument("--tol", type=float, default=None, help="absolute energy tolerance")
        p.add_argument("--out", default=None, help="output file (default stdout)")

    p = sub.add_parser("energy", help="energies by one method")
    common(p, n_default=[0])
    p.add_argument("--method", default="BS", choices=[m.value for m in Method] + [m.value.lower() for m in Method])
    p.add_argument("--gamma", type=float, default=None, help="WKB correction for MODIFIED_BS")
    p.add_argument("--preset", default=None, help="fit preset name for FIT or MODIFIED_BS")
    p.set_defaults(func=cmd_energy)

    p = sub.add_parser("gamma", help="WKB corrections extracted from exact energies")
    common(p, n_default=[0])
    p.add_argument("--engine", default="DVR", choices=["DVR", "NUMEROV", "dvr", "numerov"])
    p.add_argument("--preset", default=None, help="also evaluate this gamma preset")
    p.set_defaults(func=cmd_gamma)

    p = sub.add_parser("table", help="benchmark tables")
    p.add_argument("preset", choices=["TABLE_I", "TABLE_II", "TABLE_III", "CUSTOM"], type=str.upper)
    common(p, m_required=False)
    p.add_argument("--columns", default=None, help=f"comma list from {','.join(COLUMNS)}")
    p.add_argument("--engine", default="DVR", choices=["DVR", "NUMEROV", "dvr", "numerov"])
    p.set_defaults(func=cmd_table)

    p = sub.add_parser("figure", help="figure data series (plus PNG)")
    p.add_argument("figure", choices=["FIG1", "FIG2", "FIG3", "FIG4"], type=str.upper)
    p.add_argument("--format", default="csv", choices=["csv", "json"])
    p.add_argument("--tol", type=float, default=None)
    p.add_argument("--out", default=None, help="data file; the PNG goes next to it")
    p.add_argument("--plot", default=None, help="explicit PNG path")
    p.add_argument("--no-plot", action="store_true")
    p.set_defaults(func=cmd_figure)

    p = sub.add_parser("fit", help="fit gamma or energy models to exact data")
    common(p, n_default=list(range(41)))
    p.add_argument("--kind", default="gamma", choices=["gamma", "energy"])
    p.add_argument("--degree", type=int, default=1, help="numerator degree (gamma) or polynomial degree (energy)")
    p.add_argument("--parity", default="all", choices=["all", "even", "odd"])
    p.set_defaults(func=cmd_fit)

    p = sub.add_parser("variational", help="trial-function energies")
    p.add_argument("--family", required=True, choices=["quartic", "sextic"])
    p.add_argument("--p", type=int, default=0, choices=[0, 1])
    p.add_argument("--optimize", action="store_true")
    p.add_argument("--out", default=None)
    p.set_defaults(func=cmd_variational)

    p = sub.add_parser("presets", help="list the shipped fit presets")
    p.set_defaults(func=lambda a: (sys.stdout.write("\n".join(load_presets()) + "\n"), 0)[1])
    return ap


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except (DomainError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except (ConvergenceError, ReportError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 3


if __name__ == "__main__":
    raise SystemExit(main())
