"""Command-line front end: ``exunits <verb> [options]``.

Exit codes: 0 ok, 1 error, 2 ok but the result carries a caveat
(saturated or heuristic unit-equation mode).
"""

from __future__ import annotations

import argparse
import csv
import hashlib
import io
import json
import os
import sys
import tempfile
import time
from pathlib import Path

from . import __version__
from .arith import DEFAULT_BUDGET as FACTOR_BUDGET
from .arith import factorize, is_prime
from .cyclofield import CyclicField, subfields_of_conductor
from .errors import CacheCorrupt, ExunitsError
from .sieve import _check_ell, candidate_conductors, compute_Rl, compute_Sl_detailed, evertse_bound
from .solver import (
    SolutionReport,
    SolveConfig,
    ramified_residue_check,
    nagell_cubic_check,
    solve_unit_equation,
    sophie_germain_check,
)
from .units import DEFAULT_PRECISION, UnitSystem, cyclotomic_units, saturate

EXIT_OK, EXIT_ERROR, EXIT_CAVEAT = 0, 1, 2
CACHE_SCHEMA = 1
DEFAULT_CACHE = ".ue-cache"


# ---------------------------------------------------------------- cache


class Cache:
    """Content-addressed JSON store with atomic writes."""

    def __init__(self, root: str | os.PathLike | None, enabled: bool = True):
        self.root = Path(root) if root else None
        self.enabled = enabled and self.root is not None

    @staticmethod
    def key(kind: str, **parts) -> str:
        blob = json.dumps({"kind": kind, "schema": CACHE_SCHEMA, "version": __version__, **parts},
                          sort_keys=True)
        return f"{kind}-{hashlib.sha256(blob.encode()).hexdigest()[:24]}"

    def _path(self, key: str) -> Path:
        assert self.root is not None
        return self.root / f"{key}.json"

    def get(self, key: str):
        if not self.enabled:
            return None
        path = self._path(key)
        if not path.exists():
            return None
        try:
            entry = json.loads(path.read_text())
            if entry.get("key") != key:
                raise CacheCorrupt(f"{path}: key mismatch")
            return entry["payload"]
        except (json.JSONDecodeError, KeyError) as exc:
            raise CacheCorrupt(f"{path}: {exc}") from exc

    def put(self, key: str, payload) -> None:
        if not self.enabled:
            return
        self.root.mkdir(parents=True, exist_ok=True)
        entry = {"key": key, "created_at": time.strftime("%Y-%m-%dT%H:%M:%SZ", time.gmtime()),
                 "payload": payload}
        _atomic_write(self._path(key), json.dumps(entry, sort_keys=True))


def _atomic_write(path: Path, text: str) -> None:
    path.parent.mkdir(parents=True, exist_ok=True)
    fd, tmp = tempfile.mkstemp(dir=path.parent, prefix=".tmp-", suffix=path.suffix)
    try:
        with os.fdopen(fd, "w") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def _cached(cache: Cache, key: str, build, dump, load):
    """Return load(payload) from the cache, validating it, or build and store."""
    payload = cache.get(key)
    if payload is not None:
        try:
            return load(payload)
        except (ExunitsError, ValueError, KeyError) as exc:
            raise CacheCorrupt(f"cache entry {key} failed validation: {exc}") from exc
    value = build()
    cache.put(key, dump(value))
    return value


# ---------------------------------------------------------------- pipeline helpers


def load_fields(cache: Cache, ell: int, n: int) -> list[CyclicField]:
    key = Cache.key("fields", ell=ell, N=n)
    return _cached(
        cache, key,
        lambda: subfields_of_conductor(ell, n),
        lambda fs: [f.to_json() for f in fs],
        lambda data: [CyclicField.from_json(d, verify=True) for d in data],
    )


def load_units(cache: Cache, fld: CyclicField, precision: int) -> UnitSystem:
    key = Cache.key("units", field=fld.digest(), precision=precision)
    return _cached(
        cache, key,
        lambda: saturate(cyclotomic_units(fld, precision)),
        lambda us: us.to_json(),
        lambda data: UnitSystem.from_json(fld, data, precision),
    )


def solve_cached(cache: Cache, fld: CyclicField, cfg: SolveConfig, units: UnitSystem) -> SolutionReport:
    key = Cache.key("solve", field=fld.digest(), units=units.digest(), mode=cfg.mode,
                    bound=cfg.heuristic_bound if cfg.mode == "heuristic" else cfg.initial_bound_override,
                    precision=list(cfg.precision_schedule))

    def load(data):
        rep = SolutionReport.from_json(fld, data)
        from .solver import verify_solution

        if not all(verify_solution(fld, s) for s in rep.solutions):
            raise ValueError("cached solution fails verification")
        return rep

    return _cached(cache, key, lambda: solve_unit_equation(fld, cfg, units), lambda r: r.to_json(), load)


def resolve_field(cache: Cache, spec: str) -> CyclicField:
    """A field file, or a label such as F_11 or F_341,2 (degree 5)."""
    path = Path(spec)
    if path.exists():
        data = json.loads(path.read_text())
        return CyclicField.from_json(data, verify=True)
    label = spec.strip()
    if label.startswith("F_"):
        body = label[2:]
        n_str, _, idx = body.partition(",")
        n = int(n_str)
        fields = load_fields(cache, 5, n)
        if idx:
            return fields[int(idx) - 1]
        if len(fields) != 1:
            raise ValueError(f"{label} is ambiguous: {len(fields)} fields of conductor {n}")
        return fields[0]
    raise ValueError(f"no such field file or label: {spec}")


# ---------------------------------------------------------------- output


def _emit(args, text: str, data) -> None:
    if args.json:
        print(json.dumps(data, indent=2, sort_keys=True))
    else:
        print(text)


def _csv(rows, header) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    w.writerows(rows)
    return buf.getvalue().rstrip("\n")


# ---------------------------------------------------------------- commands


def cmd_rl(args, cache) -> int:
    _check_ell(args.ell)
    rl = compute_Rl(args.ell)
    fac = factorize(rl, budget=args.budget, seed=args.seed)
    _emit(args, f"{rl} = {fac}", {
        "ell": args.ell, "R_ell": str(rl), "factorization": str(fac),
        "factors": [[p, e] for p, e in fac.factors], "sign": fac.sign, "probable": fac.probable,
    })
    return EXIT_OK


def cmd_sl(args, cache) -> int:
    res = compute_Sl_detailed(args.ell, budget=args.budget, seed=args.seed)
    body = ", ".join(map(str, res.primes))
    text = f"S_{args.ell} = {{{body}}}"
    if not res.complete:
        text += "  (incomplete: R_ell only partially factored)"
    _emit(args, text, {"ell": args.ell, "S_ell": res.primes, "complete": res.complete})
    return EXIT_OK if res.complete else EXIT_CAVEAT


def cmd_candidates(args, cache) -> int:
    rep = candidate_conductors(args.ell, budget=args.budget, seed=args.seed)
    rows = [("*".join(map(str, c.primes)), c.conductor, f"{c.conductor}^{args.ell - 1}", c.discriminant)
            for c in rep.candidates]
    if args.csv:
        text = _csv(rows, ["T", "N", "disc_formula", "disc"])
    else:
        text = "\n".join(f"T={t:<12} N={n:<8} disc={d} = {v}" for t, n, d, v in rows)
    _emit(args, text, rep.to_json())
    return EXIT_OK if rep.complete else EXIT_CAVEAT


def cmd_fields(args, cache) -> int:
    rep = candidate_conductors(args.ell, budget=args.budget, seed=args.seed)
    conductors = [c.conductor for c in rep.candidates]
    if args.conductor is not None:
        if args.conductor not in conductors:
            raise ValueError(f"{args.conductor} is not a candidate conductor for ell = {args.ell}")
        conductors = [args.conductor]
    fields = []
    for n in conductors:
        fields.extend(load_fields(cache, args.ell, n))
    out_dir = Path(args.out) if args.out else None
    rows, payload = [], []
    for f in fields:
        entry = f.to_json()
        entry["digest"] = f.digest()
        entry["discriminant"] = str(f.field_discriminant)
        if out_dir is not None:
            name = f.label.replace(",", "_") + ".json"
            _atomic_write(out_dir / name, json.dumps(f.to_json(), indent=2, sort_keys=True))
            entry["file"] = str(out_dir / name)
        payload.append(entry)
        rows.append((f.label, f.conductor, str(f.minpoly), f.field_discriminant, f.digest()))
    if args.csv:
        text = _csv(rows, ["label", "conductor", "minpoly", "disc", "digest"])
    else:
        text = "\n".join(f"{lab:<10} N={n:<6} {poly}" for lab, n, poly, _, _ in rows)
    _emit(args, text, {"ell": args.ell, "fields": payload})
    return EXIT_OK


def _solve_config(args, mode: str) -> SolveConfig:
    prec = args.precision or DEFAULT_PRECISION
    kw = {"mode": mode, "threads": args.threads, "precision_schedule": (prec, 2 * prec, 4 * prec)}
    bound = getattr(args, "bound", None)
    if mode == "heuristic" and bound is not None:
        kw["heuristic_bound"] = bound
    elif bound is not None:
        kw["initial_bound_override"] = bound
    return SolveConfig(**kw)


def _report_text(rep: SolutionReport) -> str:
    lines = [
        f"{rep.field.label or rep.field.conductor}: {rep.count} solutions, {len(rep.orbits)} orbits "
        f"[mode {rep.mode}{'' if rep.exhaustive else ', non-exhaustive'}]",
    ]
    b = rep.bounds
    if b.get("B_initial"):
        lines.append(f"  B0 = {b['B_initial']}, reduced {b['B_reduced_sequence']}, "
                     f"B_final = {b['B_final']}, H_final = {b['H_final']:.3f}")
    if rep.caveat:
        lines.append(f"  caveat: {rep.caveat}")
    return "\n".join(lines)


def cmd_solve(args, cache) -> int:
    fld = resolve_field(cache, args.field)
    prec = args.precision or DEFAULT_PRECISION
    if args.units:
        data = json.loads(Path(args.units).read_text())
        units = UnitSystem.from_json(fld, data, prec)
    else:
        if args.mode == "rigorous":
            raise ValueError("rigorous mode needs --units with asserted_mode 'user-fundamental'")
        units = load_units(cache, fld, prec)
    cfg = _solve_config(args, args.mode)
    rep = solve_cached(cache, fld, cfg, units)
    data = rep.to_json()
    if args.out:
        _atomic_write(Path(args.out), json.dumps(data, indent=2, sort_keys=True))
    if args.csv:
        print(rep.to_csv().rstrip("\n"))
    else:
        _emit(args, _report_text(rep), data)
    return EXIT_CAVEAT if rep.caveat else EXIT_OK


def cmd_survey(args, cache) -> int:
    rep = candidate_conductors(args.ell, budget=args.budget, seed=args.seed)
    fields = []
    for c in rep.candidates:
        fields.extend(load_fields(cache, args.ell, c.conductor))
    lines = [f"ell = {args.ell}: S = {rep.Sl}, {len(rep.candidates)} conductors, {len(fields)} fields"]
    payload = {"ell": args.ell, "candidates": rep.to_json(), "fields": [], "solved": False}
    solve = args.ell == 5 or args.deep
    caveat = False
    exceptional = []
    for f in fields:
        entry = {"label": f.label, "conductor": f.conductor, "minpoly": str(f.minpoly), "digest": f.digest()}
        if solve:
            units = load_units(cache, f, args.precision or DEFAULT_PRECISION)
            r = solve_cached(cache, f, _solve_config(args, "saturated"), units)
            entry["report"] = r.to_json()
            caveat = caveat or bool(r.caveat)
            if r.count:
                exceptional.append(f)
                entry["evertse_ok"] = r.count <= evertse_bound(f.degree, 0)
                entry["residue_check"] = ramified_residue_check(f, r.solutions)
            lines.append(f"  {f.label:<10} {r.count:>5} solutions  ({len(r.orbits)} orbits)")
        else:
            lines.append(f"  {f.label:<10} {f.minpoly}")
        payload["fields"].append(entry)
    if solve:
        payload["solved"] = True
        payload["exceptional"] = [f.label for f in exceptional]
        if len(exceptional) == 1:
            verdict = (f"exactly one exceptional field: {exceptional[0].label} "
                       f"(conductor {exceptional[0].conductor})")
        else:
            verdict = f"{len(exceptional)} exceptional fields: {[f.label for f in exceptional]}"
        payload["verdict"] = verdict
        lines.append("verdict: " + verdict)
        if caveat:
            lines.append("caveat: results are relative to saturated cyclotomic unit subgroups")
    else:
        lines.append("fields constructed; pass --deep to solve the unit equation in each")
    _emit(args, "\n".join(lines), payload)
    return EXIT_CAVEAT if caveat else EXIT_OK


def cmd_check_sg(args, cache) -> int:
    primes = list(args.p or [])
    if args.p_from is not None or args.p_to is not None:
        lo, hi = args.p_from or 5, args.p_to or args.p_from or 5
        primes.extend(q for q in range(lo, hi + 1) if is_prime(q))
    if not primes:
        raise ValueError("give --p or --p-from/--p-to")
    results = []
    for p in primes:
        if not is_prime(p):
            raise ValueError(f"{p} is not prime")
        results.append((p, sophie_germain_check(p)))
    text = "\n".join(f"p={p:<4} {str(ok).lower()}" for p, ok in results)
    _emit(args, text, [{"p": p, "exceptional": ok} for p, ok in results])
    return EXIT_OK if all(ok for _, ok in results) else EXIT_ERROR


def cmd_nagell(args, cache) -> int:
    recs = [nagell_cubic_check(k) for k in range(args.k_from, args.k_to + 1)]
    rows = [(r.k, str(r.exceptional).lower(), r.disc, (r.k * r.k + 3 * r.k + 9) ** 2) for r in recs]
    if args.csv:
        text = _csv(rows, ["k", "exceptional", "disc", "(k^2+3k+9)^2"])
    else:
        text = "\n".join(f"k={k:<4} exceptional={e:<5} disc={d}" for k, e, d, _ in rows)
    _emit(args, text, [r.to_json() for r in recs])
    return EXIT_OK


# ---------------------------------------------------------------- parser


def _common_flags(suppress: bool) -> argparse.ArgumentParser:
    """Global flags, accepted before or after the verb.

    The verb-level copy uses SUPPRESS defaults so it never overwrites a
    value given before the verb.
    """

    def d(value):
        return argparse.SUPPRESS if suppress else value

    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--json", action="store_true", default=d(False), help="machine-readable output")
    common.add_argument("--csv", action="store_true", default=d(False), help="CSV output for tables")
    common.add_argument("--seed", type=int, default=d(0), help="seed for randomised factoring")
    common.add_argument("--threads", type=int, default=d(None), help="worker processes (default: all cores)")
    common.add_argument("--precision", type=int, default=d(None), help="working precision in bits")
    common.add_argument("--budget", type=int, default=d(FACTOR_BUDGET), help="factoring iteration budget")
    common.add_argument("--cache-dir", default=d(None),
                        help=f"cache directory (default $UE_CACHE_DIR or {DEFAULT_CACHE})")
    common.add_argument("--no-cache", action="store_true", default=d(False))
    return common


def build_parser() -> argparse.ArgumentParser:
    common = _common_flags(suppress=False)
    verb = _common_flags(suppress=True)

    p = argparse.ArgumentParser(prog="exunits", description="Exceptional units in cyclic fields of prime degree.",
                                parents=[common])
    p.add_argument("--version", action="version", version=__version__)
    sub = p.add_subparsers(dest="cmd", required=True)

    s = sub.add_parser("rl", parents=[verb], help="R_ell and its factorization")
    s.add_argument("--ell", type=int, required=True)
    s.set_defaults(func=cmd_rl)

    s = sub.add_parser("sl", parents=[verb], help="primes of R_ell that are 1 mod ell")
    s.add_argument("--ell", type=int, required=True)
    s.set_defaults(func=cmd_sl)

    s = sub.add_parser("candidates", parents=[verb], help="candidate conductors and discriminants")
    s.add_argument("--ell", type=int, required=True)
    s.set_defaults(func=cmd_candidates)

    s = sub.add_parser("fields", parents=[verb], help="construct the candidate fields")
    s.add_argument("--ell", type=int, required=True)
    s.add_argument("--conductor", type=int, default=None)
    s.add_argument("--out", default=None, help="directory for field files")
    s.set_defaults(func=cmd_fields)

    s = sub.add_parser("solve", parents=[verb], help="solve lambda + mu = 1 in units")
    s.add_argument("--field", required=True, help="field file or label (F_11, F_341,2, ...)")
    s.add_argument("--mode", choices=("rigorous", "saturated", "heuristic"), default="saturated")
    s.add_argument("--units", default=None, help="unit system file")
    s.add_argument("--bound", type=int, default=None,
                   help="exponent box (heuristic) or initial bound override")
    s.add_argument("--out", default=None, help="write the JSON report here")
    s.set_defaults(func=cmd_solve)

    s = sub.add_parser("survey", parents=[verb], help="whole pipeline for one ell")
    s.add_argument("--ell", type=int, required=True)
    s.add_argument("--deep", action="store_true", help="solve even when ell != 5")
    s.set_defaults(func=cmd_survey)

    s = sub.add_parser("check-sg", parents=[verb], help="2 + zeta_p + zeta_p^-1 in Q(zeta_p)^+")
    s.add_argument("--p", type=int, action="append")
    s.add_argument("--p-from", type=int, default=None)
    s.add_argument("--p-to", type=int, default=None)
    s.set_defaults(func=cmd_check_sg)

    s = sub.add_parser("nagell", parents=[verb], help="Nagell's cubic family g_k")
    s.add_argument("--k-from", type=int, default=-1)
    s.add_argument("--k-to", type=int, default=50)
    s.set_defaults(func=cmd_nagell)
    return p


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    root = args.cache_dir or os.environ.get("UE_CACHE_DIR") or DEFAULT_CACHE
    cache = Cache(root, enabled=not args.no_cache)
    try:
        return args.func(args, cache)
    except (ExunitsError, ValueError, ZeroDivisionError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_ERROR


if __name__ == "__main__":
    sys.exit(main())
