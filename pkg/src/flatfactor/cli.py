"""``flatfactor analyze|embed|verify|counterexample``.

Exit codes: 0 when every check passes, 1 on bad input, 2 when the input
is not Hilbertian or not CAT, or a sampled inequality fails.
"""

from __future__ import annotations

import argparse
import json
import logging
import math
import os
import sys
from typing import Optional

from .affine import affine_basis, check_affine, describe, lipschitz_norm
from .cat import check_bruhat_tits, check_cat
from .catalog import normed_product
from .config import ConfigError, SpaceConfig, load_config
from .embedding import (
    REPORT_SCHEMA,
    TildeMetric,
    Verdict,
    embed,
    evaluation_map,
    jsonable,
)
from .hilbert import NotHilbert, build_hilbert_model, parallelogram_residual, polarization_inner_product
from .spaces import Curvature, InvalidSpaceError, PointError
from .tolerances import DEFAULT

log = logging.getLogger("flatfactor")

EXIT_OK, EXIT_INPUT, EXIT_SCOPE = 0, 1, 2


class InputError(Exception):
    pass


def _seed(text: str) -> int:
    try:
        value = int(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"seed must be an unsigned integer, got {text!r}") from None
    if value < 0:
        raise argparse.ArgumentTypeError("seed must be an unsigned integer")
    return value


def _positive_int(text: str) -> int:
    try:
        value = int(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected a positive integer, got {text!r}") from None
    if value < 1:
        raise argparse.ArgumentTypeError("expected a positive integer")
    return value


def _positive_float(text: str) -> float:
    try:
        value = float(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected a number, got {text!r}") from None
    if not (math.isfinite(value) and value > 0):
        raise argparse.ArgumentTypeError("expected a positive number")
    return value


def _finite_float(text: str) -> float:
    try:
        value = float(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected a number, got {text!r}") from None
    if not math.isfinite(value):
        raise argparse.ArgumentTypeError("expected a finite number")
    return value


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_INPUT, f"{self.prog}: error: {message}\n")


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="flatfactor", description="Affine functions and the flat factor of geodesic spaces.")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    def common(p, config=True):
        if config:
            p.add_argument("config", help="space configuration (JSON)")
        p.add_argument("--seed", type=_seed, default=None, help="random seed (default 42, or the config's)")
        p.add_argument("--samples", type=_positive_int, default=None, help="sample count (default 10000)")
        p.add_argument("--tol", type=_positive_float, default=None, help="override every tolerance")
        p.add_argument("--json", action="store_true", help="print the JSON report instead of the summary")
        p.add_argument("--report", metavar="PATH", help="also write the JSON report to PATH")
        if config:
            p.add_argument("--bounds", type=_finite_float, nargs=2, metavar=("LOW", "HIGH"), help="sampling box for Euclidean factors")

    common(sub.add_parser("analyze", help="affine functions, norms and Gram matrix"))
    common(sub.add_parser("embed", help="run the embedding pipeline and all verifiers"))
    p = sub.add_parser("verify", help="sampled CAT(kappa) comparison checks")
    common(p)
    p.add_argument("--kappa", type=_finite_float, default=None, help="curvature bound (default 0, or the config's)")
    p = sub.add_parser("counterexample", help="l^p product of two lines")
    common(p, config=False)
    p.add_argument("--p", dest="p", type=_finite_float, default=4.0, help="exponent in (1, inf), default 4")
    return parser


def _configure_logging():
    level = os.environ.get("FLATFACTOR_LOG", "WARNING").upper()
    if level.isdigit():
        value = int(level)
    else:
        value = logging.getLevelName(level)
        if not isinstance(value, int):
            value = logging.WARNING
    logging.basicConfig(level=value, stream=sys.stderr, format="%(levelname)s %(name)s: %(message)s")


def _settings(args, cfg: Optional[SpaceConfig]):
    seed = args.seed if args.seed is not None else (cfg.seed if cfg and cfg.seed is not None else 42)
    samples = args.samples if args.samples is not None else (cfg.samples if cfg and cfg.samples is not None else 10000)
    tol = cfg.tolerance_set(args.tol) if cfg else (DEFAULT.override(args.tol) if args.tol else DEFAULT)
    return seed, samples, tol


def _load(args):
    cfg = load_config(args.config)
    return cfg, cfg.build(args.bounds)


def _report(space, dim, gram, verdicts, quotient=None, **extra) -> dict:
    out = {
        "schema": REPORT_SCHEMA,
        "space": space.to_dict(),
        "dim_A": dim,
        "gram": None if gram is None else [[float(x) for x in row] for row in gram],
        "verdicts": [v.to_dict() for v in verdicts],
        "quotient": quotient or {"classes": None, "sample_size": 0},
    }
    out.update(extra)
    return out


def _emit(args, report: dict, summary: str):
    text = json.dumps(report, indent=2) + "\n"
    if args.report:
        with open(args.report, "w", encoding="utf-8") as fh:
            fh.write(text)
    sys.stdout.write(text if args.json else summary)


def _table(verdicts) -> str:
    rows = [("check", "pass", "worst slack")]
    for v in verdicts:
        mark = "n/a" if v.passed is None else ("yes" if v.passed else "NO")
        slack = "-" if v.worst_slack is None else f"{float(v.worst_slack):.3e}"
        rows.append((v.name, mark, slack))
    w = [max(len(r[i]) for r in rows) for i in range(3)]
    return "".join(f"{r[0]:<{w[0]}}  {r[1]:<{w[1]}}  {r[2]:>{w[2]}}\n" for r in rows)


# --------------------------------------------------------------------------
# commands


def cmd_analyze(args) -> int:
    cfg, space = _load(args)
    _, _, tol = _settings(args, cfg)
    basis = affine_basis(space)
    lines = [f"space: {space!r}", f"dim A = {len(basis)}"]
    for i, f in enumerate(basis, 1):
        lines.append(f"f{i}: {describe(f)}")
        lines.append(f"||f{i}|| = {lipschitz_norm(space, f):.6g}")
    residuals = []
    for i in range(len(basis)):
        for j in range(i + 1, len(basis)):
            r = parallelogram_residual(space, basis[i], basis[j])
            residuals.append(r)
            lines.append(f"parallelogram residual (f{i + 1}, f{j + 1}) = {r:.6f}")
    gram = [[polarization_inner_product(space, f, g) for g in basis] for f in basis]
    lines.append("gram:")
    lines.extend("  [" + ", ".join(f"{x:.6g}" for x in row) + "]" for row in gram)
    try:
        model = build_hilbert_model(space, basis, tol.parallelogram)
        verdict = Verdict("hilbert", True, model.max_parallelogram_residual)
        lines.append(f"Hilbert: yes (smallest Gram eigenvalue {model.psd_certificate:.6g})")
        code = EXIT_OK
    except NotHilbert as exc:
        verdict = Verdict("hilbert", False, exc.residual, {"basis_indices": list(exc.witness)}, str(exc))
        lines.append(f"Hilbert: NO, {exc}")
        code = EXIT_SCOPE
    report = _report(space, len(basis), gram, [verdict], parallelogram_residuals=residuals)
    _emit(args, report, "\n".join(lines) + "\n")
    return code


def cmd_embed(args) -> int:
    cfg, space = _load(args)
    seed, samples, tol = _settings(args, cfg)
    rep = embed(space, seed=seed, samples=samples, tolerances=tol)
    summary = f"space: {space!r}\ndim A = {rep.dim_A}\nstatus: {rep.status}\n" + _table(rep.verdicts)
    q = rep.quotient
    if q.get("classes") is not None:
        summary += f"quotient: {q['classes']} classes among {q['sample_size']} sample points\n"
    _emit(args, rep.to_dict(), summary)
    return EXIT_OK if rep.passed else EXIT_SCOPE


def cmd_verify(args) -> int:
    cfg, space = _load(args)
    seed, samples, tol = _settings(args, cfg)
    kappa = args.kappa if args.kappa is not None else (cfg.kappa if cfg.kappa is not None else 0.0)
    structural = space.curvature_validity(kappa)
    res = check_cat(space, kappa, samples, 3, [seed, 0])
    verdicts = [
        Verdict(
            f"cat({kappa:g})",
            res.worst <= tol.cat,
            res.worst,
            jsonable(space, res.witness),
            f"{res.extra['triangles']} triangles within the perimeter bound",
        )
    ]
    if kappa <= 0:
        bt = check_bruhat_tits(space, samples, [seed, 1])
        verdicts.append(Verdict("bruhat_tits", bt.worst >= -tol.bruhat_tits, bt.worst, jsonable(space, bt.witness)))
    dim, gram = None, None
    try:
        model = build_hilbert_model(space, None, tol.parallelogram)
        dim, gram = model.dim, model.gram
        if kappa != 0:
            tm = TildeMetric(space, evaluation_map(space, model))
            qres = check_cat(space, kappa, min(samples, 2000), 3, [seed, 2], metric=lambda a, b: tm.distance(a, b, strict=False))
            verdicts.append(
                Verdict(f"quotient_cat({kappa:g})", None, qres.worst, jsonable(space, qres.witness), "reported only")
            )
    except NotHilbert as exc:
        dim = len(affine_basis(space))
        log.info("no Hilbert model: %s", exc)
    ok = all(v.passed is not False for v in verdicts)
    summary = f"space: {space!r}\nstructural verdict for kappa={kappa:g}: {structural.value}\n" + _table(verdicts)
    if not ok and res.worst > tol.cat:
        summary += f"witness: {json.dumps(jsonable(space, res.witness))}\n"
    _emit(args, _report(space, dim, gram, verdicts, kappa=kappa, structural=structural.value), summary)
    return EXIT_OK if ok else EXIT_SCOPE


def cmd_counterexample(args) -> int:
    if not args.p > 1:
        raise InputError(f"exponent p must lie in (1, inf), got {args.p!r}")
    seed, samples, tol = _settings(args, None)
    space = normed_product(args.p)
    f, g = affine_basis(space)
    n_geo = max(1, min(samples, 1000))
    dev = max(check_affine(space, f, n_geo, [seed, 0]), check_affine(space, g, n_geo, [seed, 1]))
    signed = float(
        lipschitz_norm(space, f + g) ** 2 + lipschitz_norm(space, f - g) ** 2 - 2 * lipschitz_norm(space, f) ** 2 - 2 * lipschitz_norm(space, g) ** 2
    )
    residual = abs(signed)
    cat = check_cat(space, 0.0, samples, 3, [seed, 2])
    bt = check_bruhat_tits(space, samples, [seed, 3])
    verdicts = [
        Verdict("projections_affine", dev <= tol.affine, dev),
        Verdict("parallelogram", residual <= tol.parallelogram, residual, {"signed": signed}),
        Verdict("cat(0)", cat.worst <= tol.cat, cat.worst, jsonable(space, cat.witness)),
        Verdict("bruhat_tits", bt.worst >= -tol.bruhat_tits, bt.worst, jsonable(space, bt.witness)),
    ]
    gram = [[polarization_inner_product(space, a, b) for b in (f, g)] for a in (f, g)]
    ok = all(v.passed for v in verdicts)
    lines = [
        f"space: {space!r}",
        f"projections affine: max deviation {dev:.3e}",
        f"||f1 + f2|| = {lipschitz_norm(space, f + g):.6f}",
        f"parallelogram residual = {residual:.6f} (signed {signed:.6f})",
        f"structural verdict: {Curvature(space.curvature_validity(0.0)).value}",
    ]
    summary = "\n".join(lines) + "\n" + _table(verdicts)
    if cat.worst > tol.cat:
        summary += f"CAT(0) witness: {json.dumps(jsonable(space, cat.witness))}\n"
    _emit(args, _report(space, 2, gram, verdicts, p=args.p), summary)
    return EXIT_OK if ok else EXIT_SCOPE


COMMANDS = {
    "analyze": cmd_analyze,
    "embed": cmd_embed,
    "verify": cmd_verify,
    "counterexample": cmd_counterexample,
}


def main(argv=None) -> int:
    _configure_logging()
    args = build_parser().parse_args(argv)
    try:
        return COMMANDS[args.command](args)
    except (ConfigError, InvalidSpaceError, PointError, InputError) as exc:
        print(f"flatfactor: error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except OSError as exc:
        print(f"flatfactor: error: {exc}", file=sys.stderr)
        return EXIT_INPUT


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
