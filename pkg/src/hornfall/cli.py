"""``hornfall`` command-line entry point.

Exit codes: 0 success, 1 usage error, 2 runtime error, and for ``solve``
10 = satisfiable / 20 = unsatisfiable.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

from . import __version__
from .automata import emptiness_direct, parse_automaton, to_horn
from .errors import HornfallError
from .experiments import parse_axis, parse_config, jump_probe, run_sweep, write_csv_header
from .formula import DensityVector, parse_formula, sample_ensemble, serialize_formula
from .solver import solve
from .theory import gamma_curve, root_t0

EXIT_OK, EXIT_USAGE, EXIT_RUNTIME, EXIT_SAT, EXIT_UNSAT = 0, 1, 2, 10, 20

PREDICT_SCHEMA = "hornfall-predict/1"
GAMMA_SCHEMA = "hornfall-gamma/1"
PROBE_SCHEMA = "hornfall-probe/1"


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(f"{self.prog}: {message}\n{self.format_usage()}")


def _densities(text: str) -> list[float]:
    try:
        return [float(x) for x in text.split(",") if x.strip() != ""]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated numbers, got {text!r}") from None


def _read_input(path: str) -> str:
    if path == "-":
        return sys.stdin.read()
    return Path(path).read_text()


def _dv(d: list[float], k: int | None) -> DensityVector:
    try:
        return DensityVector.of(*d, k=k)
    except ValueError as exc:
        raise UsageError(str(exc)) from None


def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="hornfall", description="Random Horn-SAT: generate, solve, predict.")
    p.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    g = sub.add_parser("gen", help="sample a formula from the random ensemble")
    g.add_argument("--n", type=int, required=True, help="number of variables")
    g.add_argument("--d", type=_densities, required=True, help="densities d1,d2,...,dk")
    g.add_argument("--k", type=int, help="max clause length (pads --d with zeros)")
    g.add_argument("--seed", type=int, default=0)
    g.add_argument("-o", "--output", default="-", help="output file ('-' = stdout)")

    s = sub.add_parser("solve", help="decide a Horn formula by unit propagation")
    s.add_argument("file", help="hcnf file, or '-' for stdin")
    s.add_argument("--backbone", action="store_true", help="also print the implied variables")
    s.add_argument("--backend", choices=("numba", "numpy"))

    pr = sub.add_parser("predict", help="analytic t0 and satisfiability probability (JSON)")
    pr.add_argument("--k", type=int, help="max clause length (pads --d with zeros)")
    pr.add_argument("--d", type=_densities, required=True, help="densities d1,d2,...,dk")
    pr.add_argument("--tol", type=float, default=1e-12)

    ga = sub.add_parser("gamma", help="points of the discontinuity curve for k=3, d2=0")
    grp = ga.add_mutually_exclusive_group(required=True)
    grp.add_argument("--d3", type=float, help="single point (JSON)")
    grp.add_argument("--d3-range", help="start:stop:step, inclusive (CSV)")

    au = sub.add_parser("automaton", help="translate or check a word/tree automaton")
    au.add_argument("file", help="automaton file, or '-' for stdin")
    mode = au.add_mutually_exclusive_group(required=True)
    mode.add_argument("--emit-horn", action="store_true", help="print the Horn encoding")
    mode.add_argument("--check-empty", action="store_true", help="print 'empty' or 'nonempty'")

    sw = sub.add_parser("sweep", help="Monte Carlo sweep from a key=value config (CSV)")
    sw.add_argument("--config", required=True)
    sw.add_argument("--output", help="override the config's output path ('-' = stdout)")
    sw.add_argument("--workers", type=int, help="override the config's worker count")

    pb = sub.add_parser("probe", help="probability on both sides of d3 at fixed d1 (JSON)")
    pb.add_argument("--d1", type=float, required=True)
    pb.add_argument("--d3", type=float, required=True)
    pb.add_argument("--window", type=float, default=0.1)
    pb.add_argument("--n", type=int, default=20000)
    pb.add_argument("--trials", type=int, default=0, help="Monte Carlo trials per side (0 = analytic only)")
    pb.add_argument("--seed", type=int, default=0)
    return p


def _cmd_gen(a, out) -> int:
    sample = sample_ensemble(a.n, _dv(a.d, a.k), a.seed)
    text = serialize_formula(sample.formula)
    if a.output == "-":
        out.write(text)
    else:
        Path(a.output).write_text(text)
    return EXIT_OK


def _cmd_solve(a, out) -> int:
    f = parse_formula(_read_input(a.file))
    r = solve(f, backend=a.backend)
    out.write(f"s {r.verdict}\n")
    out.write(f"c backbone_size {r.backbone_size}\n")
    out.write(f"c rounds {r.steps}\n")
    if a.backbone:
        out.write("b " + " ".join(str(v) for v in r.backbone.tolist()) + (" 0\n" if r.backbone_size else "0\n"))
    return EXIT_SAT if r.satisfiable else EXIT_UNSAT


def _cmd_predict(a, out) -> int:
    dv = _dv(a.d, a.k)
    r = root_t0(dv, tol=a.tol)
    doc = {
        "schema": PREDICT_SCHEMA, "k": dv.k, "d": list(dv.d),
        "t0": r.t0, "phi": r.phi, "derivative_at_root": r.derivative_at_root, "simple": r.simple,
    }
    out.write(json.dumps(doc) + "\n")
    return EXIT_OK


def _cmd_gamma(a, out) -> int:
    if a.d3 is not None:
        g = gamma_curve(a.d3)
        out.write(json.dumps({"schema": GAMMA_SCHEMA, "d3": g.d3, "d1": g.d1, "t_tangent": g.t_tangent}) + "\n")
        return EXIT_OK
    values = parse_axis(a.d3_range)
    out.write(f"# schema: {GAMMA_SCHEMA}\n")
    out.write("d3,d1,t_tangent\n")
    for d3 in values:
        g = gamma_curve(float(d3))
        out.write(f"{g.d3!r},{g.d1!r},{g.t_tangent!r}\n")
    return EXIT_OK


def _cmd_automaton(a, out) -> int:
    aut = parse_automaton(_read_input(a.file))
    if a.emit_horn:
        f, tmap = to_horn(aut)
        out.write("c state-to-variable " + " ".join(f"{s}:{v}" for s, v in sorted(tmap.state_to_var.items())) + "\n")
        out.write(serialize_formula(f))
    else:
        out.write("empty\n" if emptiness_direct(aut) else "nonempty\n")
    return EXIT_OK


def _cmd_sweep(a, out) -> int:
    cfg = parse_config(Path(a.config).read_text())
    if a.output is not None:
        cfg.output = a.output
    if a.workers is not None:
        cfg.workers = a.workers
    if cfg.output is None or cfg.output == "-":
        cfg.output = None
        w = write_csv_header(out)
        from .experiments import iter_sweep

        for rec in iter_sweep(cfg):
            w.writerow(rec.row())
    else:
        run_sweep(cfg)
    return EXIT_OK


def _cmd_probe(a, out) -> int:
    r = jump_probe(a.d1, a.d3, a.window, n=a.n, trials=a.trials, seed=a.seed)
    doc = {"schema": PROBE_SCHEMA, "d1": a.d1, "d3": a.d3, "window": a.window,
           "phi_below": r.phi_below, "phi_above": r.phi_above,
           "empirical_below": r.empirical_below, "empirical_above": r.empirical_above}
    if a.trials:
        doc.update(n=a.n, trials=a.trials)
    out.write(json.dumps(doc) + "\n")
    return EXIT_OK


_COMMANDS = {
    "gen": _cmd_gen, "solve": _cmd_solve, "predict": _cmd_predict, "gamma": _cmd_gamma,
    "automaton": _cmd_automaton, "sweep": _cmd_sweep, "probe": _cmd_probe,
}


def dispatch(argv: list[str] | None = None, out=None, err=None) -> int:
    out = out or sys.stdout
    err = err or sys.stderr
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except UsageError as exc:
        err.write(str(exc))
        return EXIT_USAGE
    except SystemExit as exc:  # --help / --version
        return int(exc.code or 0)
    try:
        return _COMMANDS[args.command](args, out)
    except UsageError as exc:
        err.write(f"hornfall {args.command}: {exc}\n")
        return EXIT_USAGE
    except (HornfallError, OSError) as exc:
        err.write(f"hornfall {args.command}: {exc}\n")
        return EXIT_RUNTIME


def main() -> None:
    sys.exit(dispatch())


if __name__ == "__main__":
    main()
