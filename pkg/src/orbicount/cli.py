"""Command-line front end.

Subcommands: count, classify, constant, local-factor, fit, zeta.
CSV schema for counts: ``B,n_rational,n_campana,n_darmon``.  All JSON output
uses lower_snake_case keys.  Exit codes: 0 success, 2 usage or domain error,
3 resource cap exceeded.

An optional ``--config path`` file provides line-oriented ``key=value``
defaults (same names as the long flags); explicit flags win.
"""

from __future__ import annotations

import argparse
import io
import json
import sys
from fractions import Fraction
from typing import Dict, List, Optional, Sequence

from . import constants, enumeration, fitting, geometry, localfactors
from .errors import BudgetExceededError, DomainError
from .orbifold import OrbifoldModel, PlaceSet, blowup_p2, projective_space

__all__ = ["main"]


def _parse_primes(text: str) -> List[int]:
    text = text.strip()
    if not text:
        return []
    return [int(t) for t in text.split(",")]


def _parse_fraction(text: str) -> Fraction:
    try:
        return Fraction(str(text))
    except (ValueError, ZeroDivisionError) as exc:
        raise DomainError(f"cannot parse number {text!r}") from exc


def _build_model(args) -> OrbifoldModel:
    if args.model == "p1":
        return projective_space(1, args.m)
    if args.model == "pn":
        return projective_space(args.n, args.m)
    if args.model == "blowup":
        return blowup_p2(args.m1, args.m2)
    raise DomainError(f"unknown model {args.model!r}")


def _build_places(args) -> PlaceSet:
    text = getattr(args, "s_primes", None)
    if text is None:
        text = getattr(args, "s", "") or ""
    return PlaceSet.of(_parse_primes(text))


def _grid(args) -> tuple:
    """Returns (bounds ascending, labels)."""
    spec = args.grid
    if spec.startswith("geometric:"):
        k = int(spec.split(":", 1)[1])
        if k < 1:
            raise DomainError("geometric grid needs at least one point")
        if args.bmax is None:
            raise DomainError("geometric grid requires --bmax")
        lo = float(_parse_fraction(args.bmin))
        hi = float(_parse_fraction(args.bmax))
        if hi < lo:
            raise DomainError("--bmax below --bmin")
        if k == 1:
            vals = [int(round(hi))]
        else:
            ratio = (hi / lo) ** (1.0 / (k - 1))
            vals = [int(round(lo * ratio**i)) for i in range(k)]
        out = []
        for v in vals:
            if not out or v > out[-1]:
                out.append(max(v, 1))
        return [Fraction(v) for v in out], [str(v) for v in out]
    entries = [e.strip() for e in spec.split(",") if e.strip()]
    if not entries:
        raise DomainError("empty bound grid")
    pairs = sorted({(_parse_fraction(e), e) for e in entries})
    seen = set()
    bounds, labels = [], []
    for b, label in pairs:
        if b in seen:
            continue
        seen.add(b)
        bounds.append(b)
        labels.append(label)
    return bounds, labels


def _model_params_json(model: OrbifoldModel) -> Dict[str, int]:
    return dict(model.params)


# --------------------------------------------------------------------------
# subcommands
# --------------------------------------------------------------------------


def _cmd_count(args) -> int:
    model = _build_model(args)
    S = _build_places(args)
    bounds, labels = _grid(args)
    series = enumeration.count_series(
        model,
        S,
        bounds,
        mode=args.mode,
        workers=args.workers,
        budget=args.budget,
        labels=labels,
    )
    if args.dump:
        if len(bounds) != 1:
            raise DomainError("--dump requires a single-point grid")
        with open(args.dump, "w") as fh:
            enumeration.dump_points(model, S, bounds[0], _dump_mode(args.mode), fh)
    if args.format == "json":
        payload = {
            "model": model.name,
            "params": _model_params_json(model),
            "s_primes": list(S.finite_primes),
            "mode": args.mode,
            "records": [
                {
                    "b": label,
                    "n_rational": rec.n_rational,
                    "n_campana": rec.n_campana,
                    "n_darmon": rec.n_darmon,
                }
                for label, rec in zip(series.labels, series.records)
            ],
        }
        _emit(args, json.dumps(payload, indent=2) + "\n")
    else:
        buf = io.StringIO()
        enumeration.write_series_csv(series, buf)
        _emit(args, buf.getvalue())
    return 0


def _dump_mode(mode: str) -> str:
    return "darmon" if mode == "all" else mode


def _cmd_classify(args) -> int:
    model = _build_model(args)
    S = _build_places(args)
    point = geometry.parse_point(model, args.point)
    heights: Dict[str, object] = {}
    gh = geometry.global_height(point, model)
    heights["inf"] = geometry.local_height(point, model, geometry.ARCH).value
    mults: Dict[str, Dict[str, int]] = {}
    for p in geometry.relevant_primes(point, model):
        lh = geometry.local_height(point, model, p)
        heights[str(p)] = {"value": lh.value, "exponent": str(lh.exponent)}
        mults[str(p)] = geometry.multiplicities(point, model, p)
    if isinstance(point, geometry.BlowupPoint):
        point_text = f"{point.u},{point.w}"
    else:
        point_text = ":".join(str(c) for c in point.coords)
    payload = {
        "model": model.name,
        "params": _model_params_json(model),
        "s_primes": list(S.finite_primes),
        "point": point_text,
        "global_height": gh.value,
        "heights": heights,
        "multiplicities": mults,
        "is_darmon": geometry.is_darmon(point, model, S),
        "is_campana": geometry.is_campana(point, model, S),
    }
    _emit(args, json.dumps(payload, indent=2) + "\n")
    return 0


def _cmd_constant(args) -> int:
    model = _build_model(args)
    S = _build_places(args)
    breakdown = constants.leading_constant(
        model, S, prime_cutoff=args.p0, method=args.method
    )
    payload = {
        "model": model.name,
        "params": _model_params_json(model),
        "s_primes": list(S.finite_primes),
        "a": float(breakdown.a),
        "a_exact": str(breakdown.a),
        "b": breakdown.b,
        "residue_factors": [
            {"component": label, "value": float(v), "exact": str(v)}
            for label, v in breakdown.residue_factors
        ],
        "finite_product": breakdown.finite_product,
        "tail_bound": breakdown.tail_bound,
        "archimedean": breakdown.archimedean,
        "s_factors": [{"p": p, "value": v} for p, v in breakdown.s_factors],
        "total": breakdown.total,
        "count_coefficient": breakdown.count_coefficient,
    }
    if args.paper_values:
        payload["paper_values"] = _paper_values(model, S, args.p0)
    _emit(args, json.dumps(payload, indent=2) + "\n")
    return 0


def _paper_values(model: OrbifoldModel, S: PlaceSet, p0: int) -> Dict[str, object]:
    """Published closed-form candidates, reported for side-by-side comparison."""
    if model.name in ("p1", "pn"):
        m = model.params["m"]
        ref = constants.p1_reference_constants(m, S)
        out: Dict[str, object] = {
            "count_coefficient": ref.count_coefficient,
            "residue": ref.residue,
            "residue_times_m": ref.residue_times_m,
        }
        if m >= 2:
            camp, camp_tail = constants.p1_campana_constant(m, S, p0)
            out["campana_coefficient"] = camp
            out["campana_tail_bound"] = camp_tail
        return out
    m1, m2 = model.params["m1"], model.params["m2"]
    value, tail = constants.blowup_reference_constant(m1, m2, p0)
    return {
        "constant": value,
        "tail_bound": tail,
        "archimedean_reference": constants.blowup_archimedean_reference(m1, m2),
    }


def _cmd_local_factor(args) -> int:
    model = _build_model(args)
    if args.s_value is None:
        raise DomainError("local-factor requires --s")
    s = float(args.s_value)
    if model.name == "p1":
        closed = localfactors.p1_factor(args.p, model.params["m"], s, in_S=args.in_s)
    elif model.name == "blowup":
        closed = localfactors.blowup_factor(
            args.p, model.params["m1"], model.params["m2"], s, in_S=args.in_s
        )
    else:
        closed = localfactors.denef_factor(model, args.p, s, in_S=args.in_s)
    denef = localfactors.denef_factor(model, args.p, s, in_S=args.in_s)
    oracle = localfactors.shell_sum_oracle(
        model, args.p, s, localfactors.OracleConfig(depth=args.depth), in_S=args.in_s
    )
    payload = {
        "model": model.name,
        "params": _model_params_json(model),
        "p": args.p,
        "s": s,
        "in_s": bool(args.in_s),
        "closed_form": float(closed),
        "denef": float(denef),
        "oracle": float(oracle.value),
        "oracle_bound": float(oracle.bound),
    }
    _emit(args, json.dumps(payload, indent=2) + "\n")
    return 0


def _cmd_fit(args) -> int:
    with open(args.csv) as fh:
        rows = enumeration.read_counts_csv(fh)
    column = {"darmon": "n_darmon", "campana": "n_campana", "rational": "n_rational"}[
        args.column
    ]
    pts = [(row["bound"], row[column]) for row in rows if row[column] is not None]
    window = None
    if args.window:
        lo, hi = (float(_parse_fraction(t)) for t in args.window.split(","))
        window = (lo, hi)
    result = fitting.fit_counts(pts, float(args.a), args.b, window)
    payload = {
        "c_hat": result.c_hat,
        "coefficient": result.coefficient,
        "a": result.a_used,
        "b": result.b_used,
        "residual": result.residual,
        "window": [result.window[0], result.window[1]],
        "n_points": result.n_points,
    }
    _emit(args, json.dumps(payload, indent=2) + "\n")
    return 0


def _cmd_zeta(args) -> int:
    model = _build_model(args)
    S = _build_places(args)
    bound = _parse_fraction(args.bound)
    if args.probe:
        s_values = [float(t) for t in args.probe.split(",")]
        probe = fitting.residue_probe(model, S, s_values, bound, args.mode)
        payload = {
            "model": model.name,
            "params": _model_params_json(model),
            "mode": args.mode,
            "bound": float(bound),
            "probe": [{"s": s, "value": v} for s, v in probe],
        }
    else:
        if args.s_value is None:
            raise DomainError("zeta requires --s (or --probe)")
        z = fitting.zeta_partial_sum(model, S, float(args.s_value), bound, args.mode)
        payload = {
            "model": model.name,
            "params": _model_params_json(model),
            "mode": z.mode,
            "s": z.s,
            "bound": z.bound,
            "value": z.value,
        }
    _emit(args, json.dumps(payload, indent=2) + "\n")
    return 0


def _emit(args, text: str) -> None:
    if getattr(args, "output", None):
        with open(args.output, "w") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


# --------------------------------------------------------------------------
# parser assembly
# --------------------------------------------------------------------------

_CONFIG_COERCERS = {
    "n": int,
    "m": int,
    "m1": int,
    "m2": int,
    "workers": int,
    "budget": int,
    "depth": int,
    "p0": int,
    "b": int,
    "p": int,
    "a": float,
    "s_value": float,
    "in_s": lambda v: v.lower() in ("1", "true", "yes"),
    "paper_values": lambda v: v.lower() in ("1", "true", "yes"),
}


def _add_model_flags(sub, s_is_variable=False):
    """Model/weight flags.  --s names the finite primes of S on the counting
    subcommands; on local-factor and zeta it is the real variable s, and the
    place set (when needed) moves to --s-primes."""
    sub.add_argument("--model", choices=("p1", "pn", "blowup"), default="p1")
    sub.add_argument("--n", type=int, default=2, help="dimension for model pn")
    sub.add_argument("--m", type=int, default=1, help="weight for p1/pn")
    sub.add_argument("--m1", type=int, default=1, help="first blow-up weight")
    sub.add_argument("--m2", type=int, default=1, help="second blow-up weight")
    if s_is_variable:
        sub.add_argument("--s", dest="s_value", default=None, help="the variable s")
        sub.add_argument(
            "--s-primes", default="", help="finite primes of S, comma separated"
        )
    else:
        sub.add_argument("--s", default="", help="finite primes of S, comma separated")
    sub.add_argument("--config", default=None, help="key=value defaults file")
    sub.add_argument("--output", default=None, help="write output to this path")


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="orbicount",
        description="bounded-height point counts and leading constants "
        "on the built-in vector-group compactifications",
    )
    subs = parser.add_subparsers(dest="command", required=True)

    c = subs.add_parser("count", help="enumerate counts over a grid of bounds")
    _add_model_flags(c)
    c.add_argument("--bmax", default=None, help="largest bound (for geometric grids)")
    c.add_argument("--bmin", default="10", help="smallest bound for geometric grids")
    c.add_argument(
        "--grid",
        default="geometric:10",
        help="'geometric:k' or an explicit comma list of bounds",
    )
    c.add_argument(
        "--mode", choices=("darmon", "campana", "rational", "all"), default="all"
    )
    c.add_argument("--workers", type=int, default=1)
    c.add_argument("--format", choices=("csv", "json"), default="csv")
    c.add_argument("--budget", type=int, default=enumeration.DEFAULT_BUDGET)
    c.add_argument("--dump", default=None, help="write points to this file (debug)")
    c.set_defaults(func=_cmd_count)

    cl = subs.add_parser("classify", help="diagnose a single point")
    _add_model_flags(cl)
    cl.add_argument("point", help="p/q, x0:x1:...:xn, or u,w")
    cl.set_defaults(func=_cmd_classify)

    co = subs.add_parser("constant", help="assembled leading constant")
    _add_model_flags(co)
    co.add_argument("--p0", type=int, default=constants.DEFAULT_PRIME_CUTOFF)
    co.add_argument("--method", choices=("exact", "truncated"), default="exact")
    co.add_argument(
        "--paper-values",
        action="store_true",
        help="include published closed-form reference values",
    )
    co.set_defaults(func=_cmd_constant)

    lf = subs.add_parser("local-factor", help="local factor with oracle comparison")
    _add_model_flags(lf, s_is_variable=True)
    lf.add_argument("--p", type=int, required=True)
    lf.add_argument("--in-s", dest="in_s", action="store_true")
    lf.add_argument("--oracle", choices=("shell",), default="shell")
    lf.add_argument("--depth", type=int, default=60)
    lf.set_defaults(func=_cmd_local_factor)

    f = subs.add_parser("fit", help="fit a count CSV against kappa B^a (log B)^(b-1)")
    f.add_argument("csv", help="CSV produced by the count subcommand")
    f.add_argument("--a", required=True, type=float)
    f.add_argument("--b", required=True, type=int)
    f.add_argument(
        "--column", choices=("darmon", "campana", "rational"), default="darmon"
    )
    f.add_argument("--window", default=None, help="lo,hi bound window")
    f.add_argument("--config", default=None)
    f.add_argument("--output", default=None)
    f.set_defaults(func=_cmd_fit)

    z = subs.add_parser("zeta", help="height-zeta partial sums / residue probe")
    _add_model_flags(z, s_is_variable=True)
    z.add_argument("--bound", required=True)
    z.add_argument(
        "--mode", choices=("darmon", "campana", "rational"), default="darmon"
    )
    z.add_argument("--probe", default=None, help="comma list of s values")
    z.set_defaults(func=_cmd_zeta)

    return parser


def _apply_config(args) -> None:
    path = getattr(args, "config", None)
    if not path:
        return
    overrides: Dict[str, str] = {}
    with open(path) as fh:
        for line in fh:
            line = line.strip()
            if not line or line.startswith("#"):
                continue
            if "=" not in line:
                raise DomainError(f"bad config line: {line!r}")
            key, _, value = line.partition("=")
            overrides[key.strip().replace("-", "_")] = value.strip()
    explicit = _explicit_flags(getattr(args, "_argv", sys.argv[1:]))
    for key, raw in overrides.items():
        if not hasattr(args, key) or key in explicit:
            continue
        coerce = _CONFIG_COERCERS.get(key, str)
        setattr(args, key, coerce(raw))


def _explicit_flags(argv: Sequence[str]) -> set:
    out = set()
    for token in argv:
        if token.startswith("--"):
            out.add(token[2:].split("=", 1)[0].replace("-", "_"))
    return out


def main(argv: Optional[Sequence[str]] = None) -> int:
    parser = _build_parser()
    args = parser.parse_args(argv)
    args._argv = list(argv) if argv is not None else sys.argv[1:]
    try:
        _apply_config(args)
        return args.func(args)
    except BudgetExceededError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 3
    except (DomainError, ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
