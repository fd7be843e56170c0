"""Command-line front end: gk <schoenberg|certify|synth|gneiting|appendix>.

Exit codes: 0 success / certified-PD, 1 certified-not-PD, 2 spec or input
validation failure, 3 numerical failure, 4 inconclusive.
"""

import argparse
import os
import sys

# GK_THREADS caps the linear-algebra thread pools; must be set before
# numpy initializes its backends.
_threads = os.environ.get("GK_THREADS")
if _threads:
    for var in ("OMP_NUM_THREADS", "OPENBLAS_NUM_THREADS", "MKL_NUM_THREADS",
                "NUMEXPR_NUM_THREADS"):
        os.environ.setdefault(var, _threads)

import numpy as np  # noqa: E402

from .abelian import (CYCLIC, REAL_LINE, AbelianGrid, SampledFunction,  # noqa: E402
                      bochner_test)
from .gram import randomized_pd_probe  # noqa: E402
from .gneiting import (CMMixture, cm_mixture_coeffs, exp_arccos_coeffs,  # noqa: E402
                       psi_infinity_check, rn_table)
from .fourier_tails import (PeriodizationSpec, bump_base, conclusion_demo,  # noqa: E402
                            fourier_lower_bound_check, ln_norm, periodize,
                            trapezoid_base, triangle_base)
from .products import SpectralFamily, chg_synthesize_tensor, gneiting_certify  # noqa: E402
from .report import CERTIFIED_NOT_PD, CERTIFIED_PD, CertReport  # noqa: E402
from .schoenberg import (KernelField, certify_scalar_series,  # noqa: E402
                         certify_sphere_sphere, certify_sphere_time,
                         coefficient_table, d_schoenberg, synthesize_tensor)
from .specfile import KernelSpec, SpecError, load_spec  # noqa: E402
from .special import SphereBasis  # noqa: E402

_EXIT_BY_VERDICT = {CERTIFIED_PD: 0, CERTIFIED_NOT_PD: 1, "inconclusive": 4}


def _fmt(x: float) -> str:
    return format(float(x), ".17g")


def _write_csv(path, header, rows):
    lines = [",".join(header)]
    lines += [",".join(str(c) for c in row) for row in rows]
    text = "\n".join(lines) + "\n"
    if path:
        with open(path, "w") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


# ---------------------------------------------------------------------------
# probe kernels: turn certified objects back into callables for the oracle

def _lookup(grid: AbelianGrid, values: np.ndarray):
    """Map group differences to sampled values by exact grid lookup."""
    values = np.asarray(values)

    def at(diffs):
        diffs = np.asarray(diffs, dtype=float)
        if grid.kind == CYCLIC:
            idx = np.mod(np.rint(diffs), grid.size).astype(int)
        elif grid.kind == REAL_LINE:
            idx = np.rint((diffs - grid.points[0]) / grid.step).astype(int)
            if idx.min() < 0 or idx.max() >= grid.size:
                raise ValueError("group difference leaves the sampling window")
        else:
            spacing = 2.0 * np.pi / grid.size
            idx = np.mod(np.rint(diffs / spacing), grid.size).astype(int)
        return values[..., idx] if values.ndim > 1 else values[idx]

    return at


def _sampled_kernel(grid: AbelianGrid, field) -> object:
    """Exact single-factor kernel from samples; differences of cyclic or
    circle grid points land back on the grid, real-line ones do not."""
    if grid.kind == REAL_LINE:
        raise SpecError("oracle probe needs a closed-form kernel on a "
                        "real-line grid; sampled lookups cannot resolve "
                        "point differences there")
    return _lookup(grid, field.tensor())


def _run_probe(spec: KernelSpec, first, second, field) -> None:
    from .special import gegenbauer_table

    settings = spec.settings
    closed_form = field.fn is not None
    if isinstance(first, SphereBasis):
        if second is None:
            if closed_form:
                kern = field.fn
            else:
                series = d_schoenberg(field, settings=settings)
                coeffs = series.coeffs.real

                def kern(dots):
                    return np.tensordot(
                        coeffs, gegenbauer_table(first.d, first.max_degree, dots),
                        axes=(0, 0))
            res = randomized_pd_probe(kern, d=first.d, seed=spec.seed,
                                      settings=settings)
        elif isinstance(second, SphereBasis):
            if closed_form:
                kern = field.fn
            else:
                B = coefficient_table(field, first.max_degree, second.max_degree)

                def kern(dots1, dots2):
                    t1 = gegenbauer_table(first.d, first.max_degree, dots1)
                    t2 = gegenbauer_table(second.d, second.max_degree, dots2)
                    return np.einsum("nm,nij,mij->ij", B, t1, t2)
            res = randomized_pd_probe(kern, d=first.d, d2=second.d,
                                      seed=spec.seed, settings=settings)
        else:
            if closed_form:
                kern = field.fn
            else:
                rows = _lookup(second, d_schoenberg(field, settings=settings).coeffs)
                if second.kind == REAL_LINE:
                    raise SpecError("oracle probe needs a closed-form kernel on "
                                    "a real-line grid")

                def kern(dots, diffs):
                    table = gegenbauer_table(first.d, first.max_degree, dots)
                    return np.sum(rows(diffs) * table, axis=0)
            res = randomized_pd_probe(kern, d=first.d, grid=second,
                                      seed=spec.seed, settings=settings)
    elif second is None:
        kern = field.fn if closed_form else _sampled_kernel(first, field)
        res = randomized_pd_probe(kern, grid=first, seed=spec.seed,
                                  settings=settings)
    else:
        if closed_form:
            kern = field.fn
        else:
            vals = field.tensor()
            if REAL_LINE in (first.kind, second.kind):
                raise SpecError("oracle probe needs a closed-form kernel on a "
                                "real-line grid")
            i_of = _lookup(first, np.arange(first.size))
            j_of = _lookup(second, np.arange(second.size))

            def kern(d1, d2):
                return vals[i_of(d1), j_of(d2)]
        res = randomized_pd_probe(kern, grid=first, grid2=second,
                                  seed=spec.seed, settings=settings)
    print(f"oracle.worst_min_eigenvalue: {_fmt(res.worst_min_eig)}")
    print(f"oracle.worst_trial: {res.worst_trial}")
    print(f"oracle.trials: {res.trials}")


# ---------------------------------------------------------------------------
# subcommands

def _cmd_schoenberg(args) -> int:
    spec = load_spec(args.spec)
    first = spec.build_factor("first")
    if not isinstance(first, SphereBasis):
        raise SpecError("factors.first: schoenberg expansion needs a sphere")
    field = spec.build_field()
    series = d_schoenberg(field, settings=spec.settings)
    if args.out:
        series.to_csv(args.out)
    masses = series.degree_masses()
    coeffs = series.coeffs.real if series.scalar else series.coeffs
    print(f"degrees: {series.basis.max_degree + 1}")
    print(f"min_coefficient: {_fmt(np.min(coeffs.real))}")
    print(f"tail_estimate: {_fmt(masses[-1])}")
    if args.out:
        print(f"wrote: {args.out}")
    return 0


def _certify_dispatch(spec: KernelSpec, tol) -> tuple[CertReport, object, object, object]:
    first = spec.build_factor("first")
    second = spec.build_factor("second")
    field = spec.build_field()
    settings = spec.settings
    if isinstance(first, SphereBasis) and second is None:
        series = d_schoenberg(field, settings=settings)
        report = certify_scalar_series(series, tol=tol, settings=settings)
    elif isinstance(first, SphereBasis) and isinstance(second, SphereBasis):
        report = certify_sphere_sphere(field, tol=tol, settings=settings)
    elif isinstance(first, SphereBasis):
        report = certify_sphere_time(field, tol=tol, settings=settings)
    elif second is None:
        report = bochner_test(SampledFunction(first, field.tensor()), tol=tol,
                              settings=settings)
    else:
        report = gneiting_certify(field, tol=tol, settings=settings)
    return report, first, second, field


def _cmd_certify(args) -> int:
    spec = load_spec(args.spec)
    if args.seed is not None:
        spec.seed = args.seed
    report, first, second, field = _certify_dispatch(spec, args.tol)
    sys.stdout.write(report.to_text())
    if args.oracle:
        _run_probe(spec, first, second, field)
    return _EXIT_BY_VERDICT[report.verdict]


def _cmd_synth(args) -> int:
    import json

    spec = load_spec(args.spec)
    first = spec.build_factor("first")
    second = spec.build_factor("second")
    if spec.kernel["family"] == "spectral-family":
        fam = spec.build_spectral_family()
        field = chg_synthesize_tensor(fam, settings=spec.settings)
    else:
        field = spec.build_field()
    tensor = np.asarray(field.tensor(), dtype=complex)
    out = args.out
    npy_path = out if out.endswith(".npy") else out + ".npy"
    np.save(npy_path, tensor)
    companion = {
        "factors": spec.factors,
        "kernel": {"family": "samples", "path": os.path.basename(npy_path)},
        "truncation": spec.truncation,
        "tolerances": {},
        "seed": spec.seed,
    }
    spec_path = npy_path[:-4] + ".spec.json"
    with open(spec_path, "w") as fh:
        json.dump(companion, fh, indent=2, sort_keys=True)
        fh.write("\n")
    print(f"samples: {npy_path}")
    print(f"spec: {spec_path}")
    print(f"shape: {tensor.shape}")
    return 0


def _cmd_gneiting(args) -> int:
    if args.table is not None:
        polys = rn_table(args.table)
        if args.out:
            polys.to_csv(args.out)
        for n in range(args.table + 1):
            print(f"r_{n}(a) = {polys.render(n)}")
        return 0
    if args.exp_arccos is not None:
        coeffs = exp_arccos_coeffs(args.exp_arccos, args.max_n)
        _write_csv(args.out, ["n", "coefficient"],
                   [(n, _fmt(c)) for n, c in enumerate(coeffs)])
        return 0
    if args.cm is not None:
        atoms = []
        for part in args.cm.split(","):
            a, w = part.split(":")
            atoms.append((float(a), float(w)))
        coeffs = cm_mixture_coeffs(CMMixture(tuple(atoms)), args.max_n)
        _write_csv(args.out, ["n", "coefficient"],
                   [(n, _fmt(c)) for n, c in enumerate(coeffs)])
        return 0
    if args.check is not None:
        with open(args.check) as fh:
            header = fh.readline().strip().split(",")
            if header != ["n", "coefficient"]:
                raise SpecError(f"{args.check}: expected header n,coefficient")
            coeffs = [float(line.split(",")[1]) for line in fh if line.strip()]
        report = psi_infinity_check(coeffs, tol=args.tol)
        sys.stdout.write(report.to_text())
        return _EXIT_BY_VERDICT[report.verdict]
    raise SpecError("gneiting: choose one of --table/--exp-arccos/--cm/--check")


_BASES = {"triangle": lambda: triangle_base,
          "trapezoid": lambda: trapezoid_base(1e-3),
          "bump": lambda: bump_base}


def _cmd_appendix(args) -> int:
    if args.ln is not None:
        print(_fmt(ln_norm(args.ln)))
        return 0
    if args.ln_table is not None:
        ns = [int(v) for v in args.ln_table.split(",")]
        _write_csv(args.out, ["n", "ln_norm"], [(n, _fmt(ln_norm(n))) for n in ns])
        return 0
    spec = PeriodizationSpec(_BASES[args.base](), n_range=args.n_range)
    if args.combinator:
        grid = AbelianGrid.real_line(1.0 / 256.0, args.n_range + 1.5)
        f = periodize(spec, grid)
        t = np.linspace(-40.0, 40.0, 3201)
        ratio = fourier_lower_bound_check(spec, t)
        rows = [("min_transform_ratio", _fmt(ratio)),
                ("max_f", _fmt(np.max(f.values.real))),
                ("integral_f", _fmt(np.sum(f.values.real) * grid.haar_weight))]
        _write_csv(args.out, ["quantity", "value"], rows)
        return 0 if ratio >= 0.25 - 1e-6 else 1
    if args.conclusion:
        rows = conclusion_demo(spec)
        print("# mechanism demonstration: masses of a synthesized kernel over "
              "growing windows; no explicit non-integrable transform is exhibited")
        _write_csv(args.out, ["window", "mass", "lower_bound_mass"],
                   [(_fmt(r["window"]), _fmt(r["mass"]), _fmt(r["lower_bound_mass"]))
                    for r in rows])
        return 0
    raise SpecError("appendix: choose one of --ln/--ln-table/--combinator/--conclusion")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="gk",
        description="construct, expand and certify positive definite kernels "
                    "on spheres and abelian groups")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("schoenberg", help="expansion coefficients to CSV")
    p.add_argument("--spec", required=True)
    p.add_argument("--out", default=None)
    p.set_defaults(run=_cmd_schoenberg)

    p = sub.add_parser("certify", help="positive definiteness certification")
    p.add_argument("--spec", required=True)
    p.add_argument("--oracle", action="store_true",
                   help="append a randomized Gram falsification probe")
    p.add_argument("--seed", type=int, default=None)
    p.add_argument("--tol", type=float, default=None)
    p.set_defaults(run=_cmd_certify)

    p = sub.add_parser("synth", help="evaluate a kernel or spectral synthesis "
                                     "onto sample tensors")
    p.add_argument("--spec", required=True)
    p.add_argument("--out", required=True)
    p.set_defaults(run=_cmd_synth)

    p = sub.add_parser("gneiting", help="series coefficients of exponential "
                                        "mixtures in the dot product")
    p.add_argument("--table", type=int, default=None, metavar="N")
    p.add_argument("--exp-arccos", type=float, default=None, metavar="A")
    p.add_argument("--cm", default=None, metavar="A:W,A:W")
    p.add_argument("--check", default=None, metavar="CSV")
    p.add_argument("--max-n", type=int, default=40)
    p.add_argument("--tol", type=float, default=None)
    p.add_argument("--out", default=None)
    p.set_defaults(run=_cmd_gneiting)

    p = sub.add_parser("appendix", help="window norms and periodization demos")
    p.add_argument("--ln", type=int, default=None, metavar="N")
    p.add_argument("--ln-table", default=None, metavar="N1,N2,...")
    p.add_argument("--combinator", action="store_true")
    p.add_argument("--conclusion", action="store_true")
    p.add_argument("--base", choices=sorted(_BASES), default="triangle")
    p.add_argument("--n-range", type=int, default=6)
    p.add_argument("--out", default=None)
    p.set_defaults(run=_cmd_appendix)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.run(args)
    except SpecError as exc:
        print(f"spec error: {exc}", file=sys.stderr)
        return 2
    except ValueError as exc:
        print(f"input error: {exc}", file=sys.stderr)
        return 2
    except (RuntimeError, np.linalg.LinAlgError) as exc:
        print(f"numerical failure: {exc}", file=sys.stderr)
        return 3


if __name__ == "__main__":
    sys.exit(main())
