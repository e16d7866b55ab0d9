"""ptlab command line.

Every subcommand writes deterministic CSV/JSON (and optional SVG) and prints a JSON
summary on stdout.  Exit codes: 0 ok, 1 usage error, 2 numerical failure,
3 classical blow-up.
"""

from __future__ import annotations

import argparse
import dataclasses
import json
import sys
from concurrent.futures import ProcessPoolExecutor
from pathlib import Path

import numpy as np

from . import classical, io, matrixpt, model, opalgebra, physics, spectrum, wkb
from .errors import BlowUpError, PtlabError

CLASSICAL_FAMILIES = {
    "sextic": lambda a: model.PolynomialPotential(1.0, (0, 0, 0, 0, 0, 0, 1)),
    "quartic-pt": lambda a: model.AnharmonicPT(m=1.0, mu2=_get(a, "mu2", 0.0), g=_get(a, "g", 1.0)),
    "tilde": lambda a: model.TildeAnomalous(m=1.0, mu2=_get(a, "mu2", 0.0), g=_get(a, "g", 1.0),
                                            alpha=_get(a, "alpha", 1.0), hbar=_get(a, "hbar", 1.0)),
    "double-well": lambda a: model.PolynomialPotential(1.0, (0, 0, -5, 0, 1)),
}


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        print(f"{self.prog}: error: {message}", file=sys.stderr)
        sys.exit(1)


def _get(args, name, default):
    v = getattr(args, name, None)
    return default if v is None else v


def parse_complex(s: str) -> complex:
    """Accepts 1+0.2i, 0-2i, 1.167i, 2j, -1."""
    t = str(s).strip().replace(" ", "").replace("i", "j")
    try:
        return complex(t)
    except ValueError:
        raise argparse.ArgumentTypeError(f"not a complex number: {s!r}") from None


def parse_pair(s: str) -> tuple[float, float]:
    try:
        lo, hi = (float(v) for v in s.split(":"))
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected lo:hi, got {s!r}") from None
    return lo, hi


def build_spec(args) -> model.HamiltonianSpec:
    fam = args.family
    if fam in CLASSICAL_FAMILIES:
        return CLASSICAL_FAMILIES[fam](args)
    cls = model.FAMILIES.get(fam)
    if cls is None:
        raise PtlabError(f"unknown family {fam!r}")
    kw = {}
    for f in dataclasses.fields(cls):
        src = {"kinetic_coeff": "kinetic"}.get(f.name, f.name)
        v = getattr(args, src, None)
        if v is None:
            continue
        if f.name == "coeffs":
            v = tuple(parse_complex(c) for c in v.split(","))
        elif f.name in ("m", "n", "J") and cls in (model.MonomialDeformed, model.QESQuartic):
            v = int(v)
        kw[f.name] = v
    return cls(**kw)


def _add_spec_flags(p):
    p.add_argument("--family", default="monomial",
                   help=f"one of {sorted(model.FAMILIES) + sorted(CLASSICAL_FAMILIES)}")
    p.add_argument("--m", type=float, help="kinetic power (monomial) or mass (quartic families)")
    p.add_argument("--n", type=int, help="x^(2n) prefactor of the monomial family")
    p.add_argument("--eps", type=float, help="deformation parameter (dimensionless)")
    p.add_argument("--mu2", type=float, help="quadratic coupling mu^2")
    p.add_argument("--g", type=float, help="quartic coupling")
    p.add_argument("--alpha", type=float, help="anomaly strength multiplier")
    p.add_argument("--hbar", type=float, help="Planck constant (anomaly term only)")
    p.add_argument("--a", type=float, help="QES parameter a")
    p.add_argument("--b", type=float, help="QES parameter b")
    p.add_argument("--J", type=int, help="QES order J")
    p.add_argument("--kinetic", type=float, help="polynomial family: coefficient of p^2")
    p.add_argument("--coeffs", help="polynomial family: comma-separated c0,c1,... (complex allowed)")


def make_parser() -> argparse.ArgumentParser:
    ap = _Parser(prog="ptlab", description="PT-symmetric quantum and classical mechanics lab.")
    # global flags are accepted before or after the subcommand
    common = _Parser(add_help=False)
    for target, default in ((ap, None), (common, argparse.SUPPRESS)):
        target.add_argument("--out", default="." if default is None else default,
                            help="output directory for files without explicit paths")
        target.add_argument("--config", default=default, help="JSON file mirroring the flags (flags win)")
        target.add_argument("--jobs", type=int, default=1 if default is None else default,
                            help="worker processes for independent jobs")
    sub = ap.add_subparsers(dest="command", required=True, parser_class=_Parser)

    def add(name, **kw):
        return sub.add_parser(name, parents=[common], **kw)

    p = add("spectrum", help="eigenvalues of one Hamiltonian")
    _add_spec_flags(p)
    p.add_argument("--contour", choices=("pt", "rotated"), default="pt", help="Stokes-sector pair")
    p.add_argument("--method", choices=("shoot", "grid"), default="shoot",
                   help="complex-contour shooting or real-axis finite differences")
    p.add_argument("--emax", type=float, default=20.0, help="upper energy of the scan (energy units)")
    p.add_argument("--emin", type=float, default=0.0, help="lower energy of the scan (energy units)")
    p.add_argument("--count", type=int, default=5, help="levels for --method grid")
    p.add_argument("--csv", help="output CSV (default OUT/spectrum.csv)")

    p = add("sweep", help="continue the monomial levels across eps")
    p.add_argument("--m", type=int, default=1, help="kinetic power")
    p.add_argument("--n", type=int, default=1, help="x^(2n) prefactor")
    p.add_argument("--family", default="monomial", choices=("monomial",), help="only monomial")
    p.add_argument("--from", dest="eps_from", type=float, default=-0.5, help="first eps")
    p.add_argument("--to", dest="eps_to", type=float, default=4.0, help="last eps")
    p.add_argument("--step", type=float, default=0.1, help="eps step")
    p.add_argument("--levels", type=int, default=5, help="number of branches")
    p.add_argument("--csv", help="branch table (default OUT/sweep.csv)")
    p.add_argument("--svg", help="branch plot")

    p = add("classical", help="one complex classical trajectory")
    _add_spec_flags(p)
    p.add_argument("--energy", type=parse_complex, default=1.0, help="energy (complex, e.g. 1+0.2i)")
    p.add_argument("--x0", type=parse_complex, default=0.5, help="initial position (complex)")
    p.add_argument("--sign", type=int, choices=(1, -1), default=1, help="branch of p(0)")
    p.add_argument("--tmax", type=float, default=20.0, help="integration time (time units)")
    p.add_argument("--csv", help="trajectory CSV (default OUT/trajectory.csv)")
    p.add_argument("--svg", help="trajectory plot in the complex-x plane")

    p = add("resonance", help="tunneling resonance of the double well -5x^2 + x^4")
    p.add_argument("--reE", type=float, required=True, help="real part of the energy")
    p.add_argument("--bracket", type=parse_pair, required=True, help="Im E search window lo:hi")
    p.add_argument("--scan", type=int, default=9, help="scan points inside the bracket")

    p = add("regions", help="region-hopping sequence for the sextic oscillator")
    p.add_argument("--energy", type=parse_complex, default=1 + 0.2j, help="complex energy")
    p.add_argument("--x0", type=parse_complex, default=1.167j, help="initial position")
    p.add_argument("--sign", type=int, choices=(1, -1), default=1, help="branch of p(0)")
    p.add_argument("--tmax", type=float, default=250.0, help="integration time")

    p = add("matrix", help="2x2 PT matrix report")
    p.add_argument("--r", type=float, help="modulus of the diagonal")
    p.add_argument("--theta", type=float, help="phase of the diagonal (radians)")
    p.add_argument("--a", type=float, help="real diagonal part (with --b)")
    p.add_argument("--b", type=float, help="imaginary diagonal part (with --a)")
    p.add_argument("--g", type=float, required=True, help="off-diagonal coupling")
    p.add_argument("--eigen-only", action="store_true", help="skip C and Q (allowed in any phase)")
    p.add_argument("--json", help="report file (default OUT/matrix.json)")

    p = add("qop", help="perturbative Q operator of the cubic oscillator")
    p.add_argument("--order", type=int, choices=(1, 3), default=1, help="Q1 or Q3")

    p = add("zeta", help="spectral zeta: closed form vs eigenvalue sum")
    p.add_argument("--eps", type=float, default=2.0, help="deformation eps > 0")
    p.add_argument("--modes", type=int, default=40, help="computed levels before the WKB tail")

    p = add("binding", help="mass gap and binding energies of the anomalous quartic")
    p.add_argument("--g", type=float, nargs="+", required=True, help="coupling(s); several give a scan")
    p.add_argument("--alpha", type=float, default=1.0, help="anomaly strength")
    p.add_argument("--levels", type=int, default=12, help="levels per report")
    p.add_argument("--csv", help="table (default OUT/binding.csv)")

    p = add("qes", help="quasi-exactly solvable quartic levels")
    p.add_argument("--a", type=float, required=True)
    p.add_argument("--b", type=float, required=True)
    p.add_argument("--J", type=int, required=True)

    p = add("isospectral", help="PT quartic vs Hermitian partner")
    p.add_argument("--pair", choices=physics.PAIRS, default="quartic")
    p.add_argument("--k", type=int, default=5, help="levels compared")
    p.add_argument("--g", type=float, help="quartic coupling")
    p.add_argument("--mu2", type=float, default=1.0, help="quadratic coupling")

    p = add("wkb", help="closed-form WKB levels")
    p.add_argument("--tag", choices=wkb.FAMILIES, required=True)
    p.add_argument("--N", type=float, help="exponent for pt-monomial")
    p.add_argument("--levels", type=int, default=5)
    return ap


def _path(args, explicit, name):
    if explicit:
        return Path(explicit)
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    return out / name


def _emit(obj):
    print(io.dumps(obj))


# ---------------------------------------------------------------- commands

def cmd_spectrum(args):
    spec = build_spec(args)
    if args.method == "grid":
        sp = spectrum.hermitian_grid(spec, args.count)
    elif args.contour == "rotated":
        sp = spectrum.eigenvalues_rotated_sign_flip(spec, e_max=args.emax)
    else:
        sp = spectrum.eigenvalues_real_scan(spec, e_min=args.emin, e_max=args.emax)
    rows = [(r.index, r.energy.real, r.energy.imag, r.residual, r.method) for r in sp.records]
    path = _path(args, args.csv, "spectrum.csv")
    io.write_csv(path, ("n", "re_E", "im_E", "residual", "method"), rows)
    _emit({"spec": model.spec_to_dict(spec), "energies": [r.energy.real for r in sp.records],
           "csv": str(path)})


def cmd_sweep(args):
    grid = np.round(np.arange(args.eps_from, args.eps_to + args.step / 2, args.step), 12)
    res = spectrum.sweep_epsilon(model.MonomialDeformed(args.m, args.n, 0.0), grid, args.levels)
    rows = [(e, i, v.real, v.imag) for e, vals in zip(res.eps, res.values) for i, v in enumerate(vals)]
    path = _path(args, args.csv, "sweep.csv")
    io.write_csv(path, ("eps", "branch", "re_E", "im_E"), rows)
    if args.svg:
        series = []
        for i in range(args.levels):
            v = res.values[:, i]
            cplx = np.abs(v.imag) > 1e-9
            series.append({"x": res.eps, "y": np.where(cplx, np.nan, v.real)})
            if np.any(cplx):
                series.append({"x": res.eps, "y": np.where(cplx, v.real, np.nan), "dashed": True})
                series.append({"x": res.eps, "y": np.where(cplx, v.imag, np.nan), "dashed": True,
                               "color": "gray"})
        io.svg_plot(args.svg, series, "energy levels", "eps", "E")
    _emit({"csv": str(path), "events": [{"eps_lo": a, "eps_hi": b, "kind": k, "branches": list(br)}
                                        for a, b, k, br in res.events]})


def _trajectory_outputs(args, spec, tr):
    path = _path(args, args.csv, "trajectory.csv")
    io.write_csv(path, ("t", "re_x", "im_x", "re_p", "im_p"),
                 [(t, x.real, x.imag, p.real, p.imag) for t, x, p in zip(tr.times, tr.positions, tr.momenta)])
    if args.svg:
        tps = model.turning_points(spec, args.energy) if model.polynomial_coeffs(spec) is not None else []
        io.svg_plot(args.svg, [{"x": tr.positions.real, "y": tr.positions.imag}], "classical orbit",
                    "Re x", "Im x", markers=[(z.real, z.imag) for z in tps])
    return path


def cmd_classical(args):
    spec = build_spec(args)
    try:
        tr = classical.trajectory(spec, args.energy, args.x0, args.sign, args.tmax)
    except BlowUpError as exc:
        part = exc.partial
        if part is not None:
            tr = classical.Trajectory(part.t, part.y[:, 0], part.y[:, 1], complex(args.energy))
            _trajectory_outputs(args, spec, tr)
        _emit({"blowup": True, "t_blowup": exc.t_blowup, "message": str(exc)})
        raise
    path = _trajectory_outputs(args, spec, tr)
    _emit({"closed": tr.closed, "period": tr.period, "axis_crossings": sum(1 for e in tr.events if e[1] == "axis"),
           "energy_drift": tr.energy_drift(spec), "csv": str(path)})


def cmd_resonance(args):
    spec = CLASSICAL_FAMILIES["double-well"](args)
    r = classical.resonance_search(spec, args.reE, args.bracket, scan=args.scan)
    _emit({"re_E": args.reE, "im_E": r.im_E, "period": r.period, "start": r.start, "target": r.target,
           "miss": r.miss})


def cmd_regions(args):
    spec = CLASSICAL_FAMILIES["sextic"](args)
    seq = classical.region_sequence(spec, args.energy, args.x0, args.tmax, sign=args.sign)
    _emit({"labels": "".join(seq.labels), "visits": len(seq.visits), "mean_dwell": seq.mean_dwell})


def cmd_matrix(args):
    if args.r is not None:
        spec = matrixpt.Matrix2Spec(args.r, args.theta or 0.0, args.g)
    elif args.a is not None and args.b is not None:
        spec = matrixpt.Matrix2Spec.from_abg(args.a, args.b, args.g)
    else:
        raise PtlabError("give --r/--theta or --a/--b")
    eig = matrixpt.eigen2(spec)
    rep = {"r": spec.r, "theta": spec.theta, "g": spec.g, "phase": eig.phase,
           "E_plus": eig.e_plus, "E_minus": eig.e_minus}
    if eig.states is not None:
        rep["pt_norms"] = list(matrixpt.pt_norms(eig.states))
    if not args.eigen_only:
        rep["alpha"] = matrixpt.alpha(spec)
        rep["C"] = matrixpt.c_matrix(spec)
        rep["Q"] = matrixpt.q_matrix(spec)
        rep["residuals"] = matrixpt.identity_residuals(spec)
    path = _path(args, args.json, "matrix.json")
    io.write_json(path, rep)
    _emit(rep)


def cmd_qop(args):
    if args.order == 1:
        A, B = opalgebra.solve_q1()
        print(f"A = {A}, B = {B}")
        print(f"Q1 = {opalgebra.q1_poly()}")
    else:
        q3, res = opalgebra.solve_q3()
        print(f"Q3 = {q3}")
        print(f"rank {res.rank}, {res.equations} equations")


def cmd_zeta(args):
    total, E = spectrum.spectral_zeta_sum(args.eps, args.modes)
    closed = spectrum.spectral_zeta_closed(args.eps)
    _emit({"eps": args.eps, "modes": args.modes, "closed": closed, "sum": total,
           "rel_diff": abs(total / closed - 1)})


def _binding_job(item):
    g, alpha, levels = item
    return physics.binding_report(g, alpha, levels)


def cmd_binding(args):
    items = [(g, args.alpha, args.levels) for g in args.g]
    if args.jobs > 1 and len(items) > 1:
        with ProcessPoolExecutor(max_workers=args.jobs) as pool:
            reports = list(pool.map(_binding_job, items))
    else:
        reports = [_binding_job(it) for it in items]
    rows = []
    for rep in reports:
        E = rep.energies
        for n, e in enumerate(E):
            b = rep.B[n - 2] if n >= 2 else float("nan")
            rows.append((rep.g, rep.alpha, n, e, b, n >= 2 and b < -physics.BOUND_DEADBAND))
    path = _path(args, args.csv, "binding.csv")
    io.write_csv(path, ("g", "alpha", "n", "E_n", "B_n", "bound_flag"), rows)
    _emit([{"g": r.g, "alpha": r.alpha, "M": r.M, "bound_count": r.bound_count} for r in reports])


def cmd_qes(args):
    r = physics.qes_polynomial(args.a, args.b, args.J)
    _emit({"a": r.a, "b": r.b, "J": r.J, "coefficients": r.coefficients, "roots": list(r.roots)})


def cmd_isospectral(args):
    r = physics.isospectral_check(args.pair, args.k, g=args.g, mu2=args.mu2)
    _emit({"pair": r.pair, "pt": r.pt_levels, "hermitian": r.hermitian_levels, "max_rel_dev": r.max_rel_dev})


def cmd_wkb(args):
    _emit({"tag": args.tag, "levels": [wkb.wkb_closed_form(args.tag, n, args.N) for n in range(args.levels)]})


COMMANDS = {"spectrum": cmd_spectrum, "sweep": cmd_sweep, "classical": cmd_classical,
            "resonance": cmd_resonance, "regions": cmd_regions, "matrix": cmd_matrix, "qop": cmd_qop,
            "zeta": cmd_zeta, "binding": cmd_binding, "qes": cmd_qes, "isospectral": cmd_isospectral,
            "wkb": cmd_wkb}


def _apply_config(ap, args, argv):
    """Fill flags the user did not give from the JSON config."""
    cfg = json.loads(Path(args.config).read_text())
    given = {a.split("=")[0].lstrip("-").replace("-", "_") for a in argv if a.startswith("--")}
    for key, val in cfg.items():
        dest = key.replace("-", "_")
        if dest in given or dest == "command":
            continue
        setattr(args, {"from": "eps_from", "to": "eps_to"}.get(dest, dest), val)
    return args


def main(argv=None) -> int:
    argv = sys.argv[1:] if argv is None else list(argv)
    ap = make_parser()
    args = ap.parse_args(argv)
    try:
        if args.config:
            args = _apply_config(ap, args, argv)
        COMMANDS[args.command](args)
    except BlowUpError as exc:
        print(f"ptlab: blow-up: {exc}", file=sys.stderr)
        return exc.exit_code
    except (PtlabError, ValueError) as exc:
        print(f"ptlab: error: {exc}", file=sys.stderr)
        return getattr(exc, "exit_code", 2)
    return 0


if __name__ == "__main__":
    sys.exit(main())
