"""btq command line: quotient, homology, symbols, verify, ghom, export-dot.

Exit status: 0 ok, 2 configuration error, 3 budget exceeded, 4 a checked
bound was violated.  BTQ_BUDGET_MS sets a global wall-clock budget.
"""
from __future__ import annotations

import argparse
import json
import os
import random
import sys
from importlib import resources
from typing import Sequence

from .exactring.poly import is_prime
from .grouphom import BudgetExceeded, corollary_bound_check, harvest, sign_characters
from .quotient import (GroupSpec, SearchBudgetExceeded, alpha_transition, build_quotient,
                       pair_homology)
from .quotient.build import quotient_to_dot, quotient_to_json, render_dot
from .simplicial import homology, relative_homology
from .symbols import (bound_constants, cocycle_sum, index_and_exponent, ms_lattice,
                      random_vectors)

EXIT_CONFIG, EXIT_BUDGET, EXIT_VIOLATION = 2, 3, 4

COMMANDS = ("quotient", "homology", "symbols", "verify", "ghom", "export-dot")
NEEDS_GROUP = {"quotient", "homology", "symbols", "verify"}
INT_KEYS = {"q", "d", "alpha", "max_deg", "seed", "jobs", "max_s", "max_order", "ar_checks"}


class ConfigError(ValueError):
    pass


def load_schemas() -> dict[str, dict]:
    """The bundled JSON schemas keyed by their $id (e.g. "btq/quotient.json")."""
    out = {}
    for entry in resources.files("btq").joinpath("schemas").iterdir():
        if entry.name.endswith(".json"):
            doc = json.loads(entry.read_text())
            out[doc["$id"]] = doc
    return out


def read_config(path: str) -> dict[str, str]:
    """Flat `key = value` lines; '#' starts a comment; dashes in keys become underscores."""
    out = {}
    try:
        fh = open(path)
    except OSError as exc:
        raise ConfigError("cannot read config %s: %s" % (path, exc)) from exc
    with fh:
        for n, line in enumerate(fh, 1):
            line = line.split("#", 1)[0].strip()
            if not line:
                continue
            if "=" not in line:
                raise ConfigError("%s:%d: expected key = value" % (path, n))
            k, v = (x.strip() for x in line.split("=", 1))
            out[k.replace("-", "_")] = v
    return out


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="btq", description="Quotients of Bruhat-Tits buildings over F_q[t], "
                                 "relative homology and modular symbols.")
    sub = ap.add_subparsers(dest="command", required=True)
    for name in COMMANDS:
        sp = sub.add_parser(name)
        sp.add_argument("--config", help="flat key = value file; flags override it")
        sp.add_argument("--q", type=int)
        sp.add_argument("--d", type=int)
        sp.add_argument("--ideal", help='ideal generator, e.g. "t^2+t+1" ("1" for GL_d(A))')
        sp.add_argument("--alpha", type=int)
        sp.add_argument("--out", help="write JSON here instead of stdout")
        sp.add_argument("--seed", type=int)
        sp.add_argument("--jobs", type=int)
        if name in ("quotient", "export-dot"):
            sp.add_argument("--dot", nargs="?", const="-", help="write a DOT graph (d = 2) to a file or stdout")
        if name in ("symbols", "verify"):
            sp.add_argument("--max-deg", dest="max_deg", type=int)
            sp.add_argument("--stream", choices=("unimodular", "all"))
        if name == "verify":
            sp.add_argument("--ar-checks", dest="ar_checks", type=int)
        if name in ("ghom", "export-dot"):
            sp.add_argument("--from-quotient", dest="from_quotient")
        if name == "ghom":
            sp.add_argument("--max-s", dest="max_s", type=int)
            sp.add_argument("--max-order", dest="max_order", type=int)
    return ap


DEFAULTS = {"ideal": None, "alpha": None, "max_deg": 1, "seed": 0, "jobs": 1, "max_s": 2,
            "max_order": 16, "stream": "unimodular", "ar_checks": 10}


def resolve(args: argparse.Namespace) -> dict:
    cfg: dict = dict(DEFAULTS)
    if args.config:
        for k, v in read_config(args.config).items():
            cfg[k] = v
    for k, v in vars(args).items():
        if v is not None and k not in ("config",):
            cfg[k] = v
    for k in INT_KEYS:
        if k in cfg and isinstance(cfg[k], str):
            try:
                cfg[k] = int(cfg[k])
            except ValueError as exc:
                raise ConfigError("%s must be an integer" % k) from exc
    cmd = cfg["command"]
    if cmd in NEEDS_GROUP or (cmd == "export-dot" and not cfg.get("from_quotient")):
        for k in ("q", "d", "ideal", "alpha"):
            if cfg.get(k) is None:
                raise ConfigError("missing --%s" % k)
        if not is_prime(cfg["q"]):
            raise ConfigError("q must be prime")
        if cfg["d"] < 1:
            raise ConfigError("d must be >= 1")
        if cfg["alpha"] <= cfg["d"] - 1:
            raise ConfigError("alpha must exceed d-1 = %d" % (cfg["d"] - 1))
        try:
            cfg["spec"] = GroupSpec.parse(cfg["q"], cfg["d"], str(cfg["ideal"]))
        except ValueError as exc:
            raise ConfigError("bad ideal %r: %s" % (cfg["ideal"], exc)) from exc
    if cmd == "ghom" and not cfg.get("from_quotient"):
        raise ConfigError("missing --from-quotient")
    if cfg["jobs"] < 1:
        raise ConfigError("jobs must be >= 1")
    return cfg


def dump(doc: dict, path: str | None) -> None:
    text = json.dumps(doc, sort_keys=True, indent=1) + "\n"
    if path and path != "-":
        with open(path, "w") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def _write_text(text: str, path: str) -> None:
    if path == "-":
        sys.stdout.write(text)
    else:
        with open(path, "w") as fh:
            fh.write(text)


# --- commands -------------------------------------------------------------------------

def cmd_quotient(cfg: dict) -> int:
    Q = build_quotient(cfg["spec"], cfg["alpha"])
    if cfg.get("dot"):
        _write_text(quotient_to_dot(Q), cfg["dot"])
        if cfg["dot"] == "-" and not cfg.get("out"):
            return 0
    dump(quotient_to_json(Q), cfg.get("out"))
    return 0


def _inv_json(g) -> dict:
    return {"free_rank": g.free, "torsion": list(g.torsion)}


def cmd_homology(cfg: dict) -> int:
    Q = build_quotient(cfg["spec"], cfg["alpha"])
    c = Q.complex
    ph = pair_homology(Q)
    doc = {
        "kind": "homology",
        "group": _group_json(cfg["spec"]),
        "alpha": Q.alpha,
        "counts": c.counts(),
        "euler_characteristic": c.euler_characteristic(),
        "quotient": [_inv_json(homology(c, i)) for i in range(c.dim + 1)],
        "pair": [_inv_json(relative_homology(c, Q.truncation, i, basis=False).invariants)
                 for i in range(c.dim + 1)],
        "top_rank": ph.rank,
        "relative_chambers": ph.n,
    }
    dump(doc, cfg.get("out"))
    return 0


def _group_json(spec: GroupSpec) -> dict:
    return {"q": spec.q, "d": spec.d, "ideal": spec.ideal_str()}


def cmd_symbols(cfg: dict) -> int:
    Q = build_quotient(cfg["spec"], cfg["alpha"])
    L = ms_lattice(Q, cfg["stream"], cfg["max_deg"], cfg["jobs"])
    H = pair_homology(Q)
    rep = index_and_exponent(L, H)
    doc = {
        "kind": "symbols",
        "group": _group_json(cfg["spec"]),
        "alpha": Q.alpha,
        "stream": L.stream,
        "max_deg": cfg["max_deg"] if L.stream == "all" else None,
        "generators": len(L.columns),
        "levels": L.levels,
        "stabilized": L.stabilized,
        "certificate": L.certificate,
        "rank_ms": rep.rank_ms,
        "rank_h": rep.rank_h,
        "divisors": [x for x in L.divisors if x > 1],
        "index": rep.index,
    }
    dump(doc, cfg.get("out"))
    return 0


def verify_case(spec: GroupSpec, alpha: int, stream: str = "unimodular", max_deg: int = 1,
                jobs: int = 1, ar_checks: int = 0, seed: int = 0) -> dict:
    """quotient -> pair homology -> symbols -> index/exponent -> bound checks."""
    Q = build_quotient(spec, alpha)
    H = pair_homology(Q)
    L = ms_lattice(Q, stream, max_deg, jobs)
    rep = index_and_exponent(L, H)
    e, N = bound_constants(spec.d, spec.q)
    bound = spec.q ** e * N
    divides = rep.exponent is not None and bound % rep.exponent == 0
    p_part = 1
    if rep.exponent:
        x = rep.exponent
        while x % spec.q == 0:
            x //= spec.q
            p_part *= spec.q
    verdict = {
        "group": _group_json(spec),
        "alpha": alpha,
        "rank_ms": rep.rank_ms,
        "rank_h": rep.rank_h,
        "rank_ok": rep.rank_ok,
        "index": rep.index,
        "exponent": rep.exponent,
        "e": e,
        "N": N,
        "bound": bound,
        "divides": divides,
        "p_part_divides": rep.exponent is not None and (spec.q ** e) % p_part == 0,
        "stream": L.stream,
        "certificate": L.certificate,
    }
    if spec.d == 2:
        verdict["index_one"] = rep.index == 1
    if alpha > spec.d - 1:
        tr = alpha_transition(spec, alpha, lo=Q)
        verdict["transition_iso"] = tr.iso
    if ar_checks:
        rng = random.Random(seed)
        ok = 0
        for _ in range(ar_checks):
            vs = random_vectors(rng, spec.q, spec.d, 1, spec.d + 1)
            ok += cocycle_sum(vs, Q).is_zero()
        verdict["ar_relations"] = {"checked": ar_checks, "passed": ok, "seed": seed}
    verdict["ok"] = bool(rep.rank_ok and divides and verdict.get("index_one", True)
                         and verdict.get("transition_iso", True)
                         and (not ar_checks or verdict["ar_relations"]["passed"] == ar_checks))
    return verdict


def cmd_verify(cfg: dict) -> int:
    v = verify_case(cfg["spec"], cfg["alpha"], cfg["stream"], cfg["max_deg"], cfg["jobs"],
                    cfg["ar_checks"], cfg["seed"])
    v["kind"] = "verify"
    dump(v, cfg.get("out"))
    if not v["ok"]:
        sys.stderr.write("btq: bound violated: %s\n" % json.dumps(v, sort_keys=True))
        return EXIT_VIOLATION
    return 0


def cmd_ghom(cfg: dict) -> int:
    try:
        with open(cfg["from_quotient"]) as fh:
            doc = json.load(fh)
    except (OSError, ValueError) as exc:
        raise ConfigError("cannot load quotient document: %s" % exc) from exc
    d = doc["group"]["d"]
    groups = harvest(doc, cfg["max_order"])
    rows = []
    skipped = []
    ok = True
    for name, G in groups:
        if G.prime_power() is None:
            # only p-group stabilizers carry the filtration the bound needs
            skipped.append(name)
            continue
        for chi_k, chi in enumerate(sign_characters(G)):
            for s in range(1, cfg["max_s"] + 1):
                v = corollary_bound_check(G, chi, s, d)
                row = {"stabilizer": name, "character": chi_k}
                row.update(v.to_json())
                rows.append(row)
                ok &= v.holds
    out = {"kind": "ghom", "group": doc["group"], "alpha": doc["alpha"], "max_s": cfg["max_s"],
           "max_order": cfg["max_order"], "groups": len(groups), "verdicts": rows, "skipped": skipped, "ok": ok}
    dump(out, cfg.get("out"))
    return 0 if ok else EXIT_VIOLATION


def dot_from_document(doc: dict) -> str:
    if doc["group"]["d"] != 2:
        raise ConfigError("DOT export is for d = 2")
    cells = doc["simplices"]
    verts = [(c["id"], c["stab_order"], c["splitting_type"][0], c["in_truncation"]) for c in cells if c["dim"] == 0]
    edges = [tuple(c["vertices"]) + (c["stab_order"],) for c in cells if c["dim"] == 1]
    return render_dot(verts, edges)


def cmd_export_dot(cfg: dict) -> int:
    if cfg.get("from_quotient"):
        try:
            with open(cfg["from_quotient"]) as fh:
                text = dot_from_document(json.load(fh))
        except (OSError, ValueError) as exc:
            raise ConfigError("cannot load quotient document: %s" % exc) from exc
    else:
        if cfg["spec"].d != 2:
            raise ConfigError("DOT export is for d = 2")
        text = quotient_to_dot(build_quotient(cfg["spec"], cfg["alpha"]))
    _write_text(text, cfg.get("dot") or cfg.get("out") or "-")
    return 0


HANDLERS = {"quotient": cmd_quotient, "homology": cmd_homology, "symbols": cmd_symbols,
            "verify": cmd_verify, "ghom": cmd_ghom, "export-dot": cmd_export_dot}


def main(argv: Sequence[str] | None = None) -> int:
    ap = build_parser()
    args = ap.parse_args(argv)
    try:
        if os.environ.get("BTQ_BUDGET_MS"):
            float(os.environ["BTQ_BUDGET_MS"])
        cfg = resolve(args)
    except (ConfigError, ValueError) as exc:
        ap.print_usage(sys.stderr)
        sys.stderr.write("btq: error: %s\n" % exc)
        return EXIT_CONFIG
    try:
        return HANDLERS[cfg["command"]](cfg)
    except ConfigError as exc:
        sys.stderr.write("btq: error: %s\n" % exc)
        return EXIT_CONFIG
    except (SearchBudgetExceeded, BudgetExceeded) as exc:
        sys.stderr.write("btq: budget exceeded: %s\n" % exc)
        return EXIT_BUDGET


if __name__ == "__main__":
    sys.exit(main())
