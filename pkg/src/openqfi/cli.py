"""Command-line interface: ``openqfi {qfi,figure2,verify}``.

Exit codes: 0 success, 1 verification failure, 2 usage or configuration error.
"""

import argparse
import csv
import io
import itertools
import json
import re
import sys

import numpy as np

from . import dynamics, fisher, models, verify
from .errors import ConfigError, QfiError

FLOAT_FMT = ".17g"

DEFAULT_GRIDS = {
    "kbody": {"N": [2], "k": [1], "x": [0.1], "tau": [1.0]},
    "dephasing": {"N": [1, 2, 3, 4], "Gamma": [0.1, 0.5, 1.0, 2.0], "tau": [1.0], "x1": [1.0],
                  "b": [1.0]},
    "lossy": {"N": [1, 5, 10, 20], "phi": list(verify.REFERENCE_PHIS)},
    "custom": {"x": [1.0], "tau": [1.0]},
}

INTEGER_KEYS = ("N", "k")

_PI_TOKEN = re.compile(r"^([+-]?(?:\d+(?:\.\d*)?|\.\d+)?)\*?pi(?:/(\d+(?:\.\d*)?))?$")


def parse_value(token):
    """A float, an inclusive integer range ``a:b``, or a multiple of pi like ``3pi/20``."""
    token = token.strip()
    if not token:
        raise ConfigError("empty value in grid")
    if ":" in token:
        lo, hi = token.split(":", 1)
        try:
            lo, hi = int(lo), int(hi)
        except ValueError:
            raise ConfigError(f"range {token!r} must have integer bounds") from None
        if hi < lo:
            raise ConfigError(f"range {token!r} is empty")
        return [float(v) for v in range(lo, hi + 1)]
    match = _PI_TOKEN.match(token)
    if match:
        coef = match.group(1)
        coef = 1.0 if coef in ("", "+") else -1.0 if coef == "-" else float(coef)
        den = float(match.group(2)) if match.group(2) else 1.0
        return [coef * np.pi / den]
    try:
        value = float(token)
    except ValueError:
        raise ConfigError(f"cannot parse grid value {token!r}") from None
    if not np.isfinite(value):
        raise ConfigError(f"grid value {token!r} is not finite")
    return [value]


def parse_grid(items):
    grid = {}
    for item in items or []:
        if "=" not in item:
            raise ConfigError(f"--grid expects key=v1,v2,..., got {item!r}")
        key, _, rhs = item.partition("=")
        key = key.strip()
        if not rhs.strip():
            raise ConfigError(f"grid {key!r} is empty")
        values = []
        for tok in rhs.split(","):
            values.extend(parse_value(tok))
        grid[key] = values
    return grid


def resolve_grid(model, overrides):
    base = DEFAULT_GRIDS[model]
    unknown = set(overrides) - set(base)
    if unknown:
        raise ConfigError(f"unknown grid keys for model {model!r}: {sorted(unknown)}")
    grid = {k: overrides.get(k, v) for k, v in base.items()}
    for key, values in grid.items():
        if not values:
            raise ConfigError(f"grid {key!r} is empty")
    return grid


def _as_int(value, key):
    if value != int(value):
        raise ConfigError(f"grid {key!r} needs integers, got {value!r}")
    return int(value)


# ----------------------------------------------------------------- custom file


def _complex_matrix(data, field, dim):
    try:
        arr = np.array(
            [[complex(e[0], e[1]) if isinstance(e, list) else complex(e) for e in row] for row in data]
        )
    except (TypeError, ValueError, IndexError):
        raise ConfigError(f"field {field!r}: entries must be numbers or [re, im] pairs") from None
    if arr.shape != (dim, dim):
        raise ConfigError(f"field {field!r}: expected {dim}x{dim}, got shape {arr.shape}")
    return arr


def load_custom_model(path):
    """Parse a custom model file into ``(generator, rho0, binding)``.

    The file is JSON with keys ``dimension``, ``hamiltonian``, ``jumps``
    (list of ``{"operator": ..., "rate": number}``), ``initial_state`` and
    ``parameter`` (``{"binding": "generator" | "hamiltonian" | "jump",
    "index": k}``). Complex entries are written as ``[re, im]`` pairs.
    """
    try:
        with open(path) as fh:
            text = fh.read()
    except OSError as err:
        raise ConfigError(f"cannot read model file: {err}") from None
    try:
        data = json.loads(text)
    except json.JSONDecodeError as err:
        raise ConfigError(f"{path}:{err.lineno}:{err.colno}: {err.msg}") from None
    for key in ("dimension", "hamiltonian", "initial_state"):
        if key not in data:
            raise ConfigError(f"missing field {key!r}")
    dim = data["dimension"]
    if not isinstance(dim, int) or dim < 1:
        raise ConfigError("field 'dimension' must be a positive integer")
    h = _complex_matrix(data["hamiltonian"], "hamiltonian", dim)
    jumps = []
    for i, jump in enumerate(data.get("jumps", [])):
        op = _complex_matrix(jump.get("operator"), f"jumps[{i}].operator", dim)
        rate = jump.get("rate")
        if not isinstance(rate, (int, float)):
            raise ConfigError(f"field 'jumps[{i}].rate' must be a constant number")
        jumps.append((op, float(rate)))
    rho0 = _complex_matrix(data["initial_state"], "initial_state", dim)
    binding = data.get("parameter", {"binding": "generator"})
    kind = binding.get("binding", "generator")
    if kind not in ("generator", "hamiltonian", "jump"):
        raise ConfigError(f"field 'parameter.binding': unknown binding {kind!r}")
    if kind == "jump":
        idx = binding.get("index")
        if not isinstance(idx, int) or not 0 <= idx < len(jumps):
            raise ConfigError("field 'parameter.index' must select an existing jump")
    try:
        gen = dynamics.LindbladGenerator(h, jumps)
        rho0 = dynamics.check_density_matrix(rho0)
    except (QfiError, ValueError) as err:
        raise ConfigError(f"invalid model: {err}") from None
    return gen, rho0, binding


def custom_evolution(gen, binding, x, tau):
    """Split ``gen`` into the part scaled by the parameter and the fixed rest."""
    d = gen.dim
    zero = np.zeros((d, d))
    kind = binding.get("binding", "generator")
    if kind == "generator":
        return fisher.ParameterizedEvolution.constant(dynamics.superoperator(gen), x, tau)
    if kind == "hamiltonian":
        shape = dynamics.superoperator(dynamics.LindbladGenerator(gen.hamiltonian))
        rest = dynamics.superoperator(dynamics.LindbladGenerator(zero, gen.jumps))
    else:
        idx = binding["index"]
        op, _ = gen.jumps[idx]
        shape = dynamics.superoperator(dynamics.LindbladGenerator(zero, [(op, 1.0)]))
        others = [j for i, j in enumerate(gen.jumps) if i != idx]
        rest = dynamics.superoperator(dynamics.LindbladGenerator(gen.hamiltonian, others))
    return fisher.ParameterizedEvolution.constant(shape, x, tau, offset=tau * rest)


# ----------------------------------------------------------------------- rows


def _report_row(params, report, **extra):
    row = dict(params)
    row.update(report.as_dict())
    row.update(extra)
    return row


def qfi_rows(model, grid, repetitions=1, purity_tol=fisher.PURE_TOL, model_file=None):
    """One output row per grid point (dephasing: per point, probe and parameter)."""
    keys = list(grid)
    rows = []
    custom = load_custom_model(model_file) if model == "custom" else None
    for combo in itertools.product(*(grid[k] for k in keys)):
        p = {k: _as_int(v, k) if k in INTEGER_KEYS else v for k, v in zip(keys, combo)}
        try:
            rows.extend(_qfi_point(model, p, repetitions, purity_tol, custom))
        except (QfiError, ValueError) as err:
            rows.append({**p, "error": f"{type(err).__name__}: {err}"})
    return rows


def _qfi_point(model, p, repetitions, purity_tol, custom):
    if model == "kbody":
        n, k = _as_int(p["N"], "N"), _as_int(p["k"], "k")
        m = models.KBodyModel(n, k, p["x"])
        evo = models.kbody_evolution(m, p["tau"])
        rho0 = models.ghz_like_state(n, -1)
        state = evo.state(rho0)
        rho, drho = evo.density_and_derivative(rho0)
        k_val = fisher.kappa(rho, purity_tol)
        rep = fisher.qfi_report(rho, drho, fisher.qfi_tilde_cov(state, evo), repetitions, k_val)
        closed = models.kbody_bound_closed_form(m, p["tau"])
        return [_report_row(p, rep, closed_bound=closed)]

    if model == "dephasing":
        n = _as_int(p["N"], "N")
        gamma, tau, b, x1 = p["Gamma"], p["tau"], p["b"], p["x1"]
        rows = []
        for initial, tag in (("product", "p"), ("ghz", "e")):
            for par in ("x1", "x2"):
                head = {**p, "state": initial, "param": par}
                if par == "x2" and gamma <= 0:
                    rows.append({**head, "error": "DomainError: x2 information diverges at Gamma = 0"})
                    continue
                bound, _, f_tilde = models.dephasing_numeric(n, gamma, tau, initial, par, b, x1)
                m = models.DephasingModel(n, x1, models.ExponentialRate.for_gamma(gamma, tau, b),
                                          initial)
                rho0 = m.initial_state()
                evo = models.dephasing_evolution(m, tau, par)
                rho, drho = evo.density_and_derivative(rho0)
                rep = fisher.qfi_report(rho, drho, f_tilde, repetitions, f_tilde / bound)
                closed_b = models.dephasing_bound_closed_forms(n, gamma, tau, b)[f"{tag}_{par}"]
                closed_e = models.dephasing_exact_closed_forms(
                    n, gamma, tau, b if par == "x2" else None
                )[f"{tag}_{par}"]
                rows.append(_report_row(head, rep, closed_bound=closed_b, closed_exact=closed_e))
        return rows

    if model == "lossy":
        n = _as_int(p["N"], "N")
        phi = p["phi"]
        state = models.lossy_vectorized_state(n, phi)
        rho, drho = models.lossy_density_and_derivative(n, phi)
        f_tilde = fisher.qfi_tilde_fd(lambda ph: models.lossy_vectorized_state(n, ph), phi)
        rep = fisher.qfi_report(rho, drho, f_tilde, repetitions, fisher.kappa(rho, purity_tol))
        closed = models.lossy_bound_closed_form(n, phi)
        return [_report_row(p, rep, closed_bound=closed)]

    if model == "custom":
        gen, rho0, binding = custom
        evo = custom_evolution(gen, binding, p["x"], p["tau"])
        rho, drho = evo.density_and_derivative(rho0)
        f_tilde = fisher.qfi_tilde_exact(evo, rho0)
        rep = fisher.qfi_report(rho, drho, f_tilde, repetitions, fisher.kappa(rho, purity_tol))
        return [_report_row(p, rep)]

    raise ConfigError(f"unknown model {model!r}")


def figure2_data(ns, phis, fit_min=5):
    """``(points, fits)`` with ``delta_phi_min = sqrt(kappa / F~)`` per ``(N, phi)``."""
    points = []
    fits = []
    for phi in phis:
        ys = []
        for n in ns:
            val = float(np.sqrt(models.lossy_bound_closed_form(n, phi)))
            points.append({"N": n, "phi": phi, "delta_phi_min": val})
            ys.append(val)
        sel = [(n, y) for n, y in zip(ns, ys) if n >= fit_min]
        if len(sel) >= 2:
            logn = np.log([n for n, _ in sel])
            logy = np.log([y for _, y in sel])
            slope, intercept = np.polyfit(logn, logy, 1)
            fits.append({"phi": phi, "slope": float(slope), "intercept": float(intercept)})
    return points, fits


# --------------------------------------------------------------------- output


def _fmt(value):
    if value is None:
        return ""
    if isinstance(value, bool):
        return str(value).lower()
    if isinstance(value, (float, np.floating)):
        return format(float(value), FLOAT_FMT)
    return str(value)


def rows_to_csv(rows):
    header = []
    for row in rows:
        for key in row:
            if key not in header:
                header.append(key)
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(header)
    for row in rows:
        writer.writerow([_fmt(row.get(k)) for k in header])
    return buf.getvalue()


def _jsonable(obj):
    if isinstance(obj, dict):
        return {k: _jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_jsonable(v) for v in obj]
    if isinstance(obj, np.floating):
        return float(obj)
    if isinstance(obj, np.integer):
        return int(obj)
    return obj


def to_json(obj):
    return json.dumps(_jsonable(obj), indent=2) + "\n"


def emit(text, out):
    if out in (None, "-"):
        sys.stdout.write(text)
    else:
        with open(out, "w", newline="") as fh:
            fh.write(text)


# ----------------------------------------------------------------- commands


def cmd_qfi(args):
    grid = resolve_grid(args.model, parse_grid(args.grid))
    if args.model == "custom" and not args.model_file:
        raise ConfigError("--model custom needs --model-file")
    rows = qfi_rows(args.model, grid, args.repetitions, args.tol, args.model_file)
    text = rows_to_csv(rows) if args.format == "csv" else to_json({"model": args.model, "rows": rows})
    emit(text, args.out)
    return 0


def cmd_figure2(args):
    grid = parse_grid(args.grid)
    unknown = set(grid) - {"N", "phi"}
    if unknown:
        raise ConfigError(f"figure2 accepts only N and phi grids, got {sorted(unknown)}")
    ns = [_as_int(v, "N") for v in grid.get("N", range(1, 51))]
    if any(n < 1 for n in ns):
        raise ConfigError("N must be >= 1")
    phis = grid.get("phi", list(verify.REFERENCE_PHIS))
    points, fits = figure2_data(ns, phis, args.fit_min)
    if args.format == "json":
        text = to_json({"points": points, "fits": fits})
    else:
        lines = ["N,phi,delta_phi_min"]
        lines += [f"{p['N']},{_fmt(p['phi'])},{_fmt(p['delta_phi_min'])}" for p in points]
        lines += [
            f"# fit phi={_fmt(f['phi'])} slope={_fmt(f['slope'])} intercept={_fmt(f['intercept'])}"
            for f in fits
        ]
        text = "\n".join(lines) + "\n"
    emit(text, args.out)
    return 0


def cmd_verify(args):
    report = verify.run(args.suite, seed=args.seed, steps=args.steps)
    if args.format == "csv":
        rows = [{k: c[k] for k in ("suite", "name", "passed", "worst", "tolerance", "cases")}
                for c in report["checks"]]
        text = rows_to_csv(rows)
    else:
        text = to_json(report)
    emit(text, args.out)
    return 0 if report["passed"] else 1


def build_parser():
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--model", choices=sorted(DEFAULT_GRIDS), default="dephasing")
    common.add_argument("--model-file", help="JSON model description for --model custom")
    common.add_argument("--grid", action="append", metavar="KEY=V1,V2,...",
                        help="parameter grid; values may be floats, a:b ranges or k*pi/n")
    common.add_argument("--out", help="output path (default stdout)")
    common.add_argument("--seed", type=int, default=1)
    common.add_argument("--steps", type=int, default=10000, help="RK4 steps for integration checks")
    common.add_argument("--tol", type=float, default=fisher.PURE_TOL,
                        help="purity tolerance for the pure-state kappa branch")
    common.add_argument("--repetitions", "-M", type=int, default=1)

    parser = argparse.ArgumentParser(prog="openqfi", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("qfi", parents=[common], help="QFI, vectorized QFI and bounds on a grid")
    p.add_argument("--format", choices=("csv", "json"), default="json")
    p.set_defaults(func=cmd_qfi)

    p = sub.add_parser("figure2", parents=[common], help="lossy-mode precision versus N")
    p.add_argument("--format", choices=("csv", "json"), default="csv")
    p.add_argument("--fit-min", type=int, default=5, help="smallest N used in the slope fit")
    p.set_defaults(func=cmd_figure2)

    p = sub.add_parser("verify", parents=[common], help="run the self-verification suites")
    p.add_argument("suite", choices=verify.SUITES + ("all",))
    p.add_argument("--format", choices=("csv", "json"), default="json")
    p.set_defaults(func=cmd_verify)
    return parser


def main(argv=None):
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except ConfigError as err:
        print(f"openqfi: config error: {err}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
