"""Command-line front end.

Every subcommand prints one report (JSON by default) and exits 0 on
success, 1 on a validation error and 2 on a usage error.
"""

from __future__ import annotations

import argparse
import hashlib
import json
import sys
from fractions import Fraction
from pathlib import Path

from . import construction as cons
from . import obstruction as obs
from .cyclic import CyclicSingularity, HJChain, dual, hj_eval, hj_expand
from .errors import InvalidParams, KContactError
from .lattice import FiniteAbelianGroup, as_rat
from .schema import dumps, emit_orbifold, model_from_dict, read_json, to_jsonable
from .seifert import (
    SeifertBundle,
    h1_vanishing_report,
    h2_total_space,
    smale_barden_label,
    spin_check,
)

COMMANDS = ("hjcf", "verify-monodromy", "homology", "classify", "build-construction", "certify", "diophantine")


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):  # keep argparse's exit code 2 but route through run()
        raise UsageError(f"{self.prog}: error: {message}")


def _fraction_arg(text: str) -> Fraction:
    try:
        return as_rat(text)
    except (ValueError, ZeroDivisionError):
        raise argparse.ArgumentTypeError(f"not a rational number: {text!r}") from None


def _pair_arg(text: str) -> tuple[int, int]:
    try:
        d, r = text.split("/")
        return int(d), int(r)
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected d/r, got {text!r}") from None


def _int_list(text: str) -> list[int]:
    try:
        return [int(x) for x in text.replace(" ", "").split(",") if x]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated integers, got {text!r}") from None


def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="kcontact", description="Seifert bundle invariants and construction replay.")
    p.add_argument("--format", choices=("json", "human"), default="json")
    # accept --format after the subcommand too
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--format", choices=("json", "human"), default=argparse.SUPPRESS)
    sub = p.add_subparsers(dest="command", metavar="COMMAND", parser_class=_Parser)
    sub.required = True

    h = sub.add_parser("hjcf", parents=[common], help="Hirzebruch-Jung continued fractions")
    g = h.add_mutually_exclusive_group(required=True)
    g.add_argument("--expand", type=_pair_arg, metavar="D/R", help="chain of the singularity (d, r)")
    g.add_argument("--eval", type=_int_list, metavar="B1,B2,...", help="evaluate a chain")
    g.add_argument("--dual", type=_pair_arg, metavar="D/R", help="dual singularity")

    sub.add_parser("verify-monodromy", parents=[common], help="check the I_9 + 3 A_1 monodromy relation")

    hm = sub.add_parser("homology", parents=[common], help="H_1 conditions, H_2 and spin of a Seifert bundle")
    hm.add_argument("file", help="orbifold JSON (schema 1)")

    c = sub.add_parser("classify", parents=[common], help="Smale-Barden label")
    c.add_argument("file", nargs="?", help="orbifold JSON; classify its Seifert bundle")
    c.add_argument("--rank", type=int, help="free rank of H_2")
    c.add_argument("--torsion", type=_int_list, default=[], help="cyclic orders, e.g. 3,3")
    c.add_argument("--non-spin", action="store_true")
    c.add_argument("--barden", type=int, help="Barden invariant j for non-spin input (omit for infinity)")

    b = sub.add_parser("build-construction", parents=[common], help="replay the explicit construction")
    b.add_argument("--N", type=int, required=True)
    b.add_argument("--emit-model", metavar="PATH", help="also write the orbifold as JSON")

    ce = sub.add_parser("certify", parents=[common], help="constants ledger and final N")
    ce.add_argument("--eps", type=_fraction_arg, default=obs.EPS_DEFAULT)
    ce.add_argument("--t5", type=_fraction_arg)
    ce.add_argument("--n-leq", type=int)
    ce.add_argument("--t0", type=int)
    ce.add_argument("--n-of-1", type=int)
    ce.add_argument("--g-a", type=int)

    d = sub.add_parser("diophantine", parents=[common], help="family vs brute force for x^2 + 8 q y^2 = z^2")
    d.add_argument("--q", type=int, required=True, help="check every q from 1 to this value")
    d.add_argument("--ymax", type=int, required=True)
    d.add_argument("--zmax", type=int, default=200, help="bound on |z| for the y = 0 solutions")
    return p


# ---------------------------------------------------------------------------
# commands


def _cmd_hjcf(args, files):
    if args.expand:
        s = CyclicSingularity(*args.expand)
        chain = hj_expand(s)
        return {"d": s.d, "r": s.r, "chain": list(chain.coeffs), "length": len(chain)}, []
    if args.eval:
        chain = HJChain.of(args.eval)
        d, r = hj_eval(chain)
        return {"chain": list(chain.coeffs), "d": d, "r": r}, []
    s = CyclicSingularity(*args.dual)
    t = dual(s)
    return {"d": s.d, "r": s.r, "dual": {"d": t.d, "r": t.r}, "chain": list(hj_expand(s).coeffs),
            "dual_chain": list(hj_expand(t).coeffs)}, []


def _cmd_monodromy(args, files):
    factors = [{"name": n, "cycle": list(pq), "power": k, "matrix": cons.vanishing_matrix(*pq).rows()}
               for n, pq, k in cons.MONODROMY_FACTORS]
    prod = cons.monodromy_product()
    return {"identity": cons.verify_monodromy(), "product": prod.rows(), "factors": factors}, []


def _load(path, files):
    data = read_json(path)
    files[str(path)] = hashlib.sha256(json.dumps(data, sort_keys=True).encode()).hexdigest()
    model, bg = model_from_dict(data)
    return SeifertBundle(model, bg)


def _bundle_outputs(bundle: SeifertBundle) -> dict:
    report = h1_vanishing_report(bundle)
    out = {"chern_class": bundle.chern, "mu": bundle.mu, "ell": bundle.ell, "h1": report}
    h2 = h2_total_space(bundle, report)
    out["h2"] = h2
    spin = spin_check(bundle)
    out["spin"] = spin
    if spin:
        out["smale_barden"] = smale_barden_label(h2, True)
    return out


def _cmd_homology(args, files):
    return _bundle_outputs(_load(args.file, files)), []


def _cmd_classify(args, files):
    if args.file:
        if args.rank is not None or args.torsion:
            raise UsageError("give either FILE or --rank/--torsion, not both")
        out = _bundle_outputs(_load(args.file, files))
        if not out["spin"]:
            raise InvalidParams("bundle is not spin; pass H_2 and --barden explicitly")
        return {"h2": out["h2"], "spin": True, "smale_barden": out["smale_barden"]}, []
    if args.rank is None:
        raise UsageError("classify needs FILE or --rank")
    h2 = FiniteAbelianGroup.from_cyclic_orders(args.torsion, free_rank=args.rank)
    label = smale_barden_label(h2, not args.non_spin, args.barden if args.non_spin else 0)
    return {"h2": h2, "spin": not args.non_spin, "smale_barden": label}, []


def _cmd_build(args, files):
    if args.N < 0:
        raise InvalidParams("N must be >= 0", field="N")
    con = cons.assemble_orbifold(args.N)
    report = h1_vanishing_report(con.bundle)
    h2 = h2_total_space(con.bundle, report)
    expected = FiniteAbelianGroup.from_cyclic_orders(cons.expected_h2_orders(con.scheme), free_rank=2)
    spin = spin_check(con.bundle)
    pi1 = cons.pi1_abelianization(args.N, con.scheme)
    control = cons.pi1_abelianization(args.N, con.scheme, isotropy_relations=False)
    a = cons.solve_A_system()
    outputs = {
        "N": args.N,
        "scheme": [list(r) for r in con.scheme.p],
        "multiplicities": {"T": list(con.m_T), "T'": list(con.m_Tp), "A": con.m_A},
        "curve_A": {"coeffs": list(a.coeffs), "A_sq": a.A_sq, "genus": a.genus},
        "base_gram": [list(r) for r in con.model.intersection.gram],
        "b0": con.b0, "j0": con.j0,
        "chern": {"c1": con.bundle.chern, "mu": con.bundle.mu, "ell": con.bundle.ell},
        "h1": report,
        "surjectivity_witnesses": {str(p): list(v) for p, v in cons.surjectivity_witnesses(con).items()},
        "h2": h2,
        "h2_matches_prediction": h2 == expected,
        "spin": spin,
        "smale_barden": smale_barden_label(h2, True) if spin else None,
        "pi1_orb_abelianized": {"group": pi1, "trivial": pi1.is_trivial,
                                "without_isotropy_relations": control},
    }
    audit = ["primes p_nm: least unused prime >= max(5, n+1, m+1), row-major",
             "b_n = b'_m = b_A = 1 except b_0, the least unit mod m_T0 making <mu c1, T_1> prime to 6",
             "background class c1(B) = 0; canonical class K = 0"]
    if args.emit_model:
        emit_orbifold(con.model, args.emit_model, con.bundle.background)
        outputs["emitted_model"] = str(Path(args.emit_model))
    return outputs, audit


def _cmd_certify(args, files):
    ledger = obs.constants_pipeline(N_of_1=args.n_of_1, T0=args.t0, eps=args.eps, g_a=args.g_a,
                                    T5=args.t5, N_leq=args.n_leq)
    cap = obs.hyperbolic_cap_check(ledger.T7_sq)
    packing = obs.packing_count_bound(ledger.T7_sq, ledger.eps)
    verdict = obs.eliminate_k2_nonpositive(ledger.k2_n, ledger.k2_n, ledger)
    outputs = {
        "ledger": {e.name: e.value for e in ledger.entries},
        "N": ledger.N_final,
        "hyperbolic_cap": {"identity_holds": cap.consistent, "width": cap.width, "R": cap.R,
                           "area": cap.area},
        "packing": {"exact_count": packing.count, "enclosure": packing.enclosure,
                    "approximation_48": packing.approximation},
        "k2_elimination": {"threshold_n": verdict.threshold, "bound": verdict.bound,
                           "positive_at_threshold": verdict.positive},
    }
    audit = [{"name": e.name, "formula": e.formula, "origin": e.origin} for e in ledger.entries]
    return outputs, audit


def _cmd_diophantine(args, files):
    if args.q < 1 or args.ymax < 0:
        raise InvalidParams("need q >= 1 and ymax >= 0")
    rows = [obs.completeness_check(q, args.ymax, args.zmax) for q in range(1, args.q + 1)]
    table = [{"q": r.q, "brute_force": r.brute, "family": r.family, "missing": r.missing,
              "extra": r.extra, "match": r.ok} for r in rows]
    return {"rows": table, "all_match": all(r.ok for r in rows)}, []


DISPATCH = {
    "hjcf": _cmd_hjcf,
    "verify-monodromy": _cmd_monodromy,
    "homology": _cmd_homology,
    "classify": _cmd_classify,
    "build-construction": _cmd_build,
    "certify": _cmd_certify,
    "diophantine": _cmd_diophantine,
}


def _digest(args, files) -> str:
    payload = {k: v for k, v in vars(args).items() if k not in ("format", "file", "emit_model")}
    payload["files"] = sorted(files.values())
    return hashlib.sha256(dumps(payload).encode()).hexdigest()


def _human(report: dict) -> str:
    lines = [f"{report['command']}: {report['status']}"]
    out = report.get("outputs") or {}
    if report["status"] == "error":
        err = report["error"]
        lines.append(f"  {err['type']}: {err['message']}")
        if err.get("rule"):
            lines.append(f"  rule: {err['rule']}")
        return "\n".join(lines) + "\n"
    for key in sorted(out):
        val = out[key]
        if isinstance(val, dict) and "text" in val:
            val = val["text"]
        elif isinstance(val, dict) and "notation" in val:
            val = f"{val['notation']}  ({val['connected_sum']})"
        elif isinstance(val, (dict, list)):
            val = json.dumps(val, sort_keys=True)
            if len(val) > 200:
                val = val[:197] + "..."
        lines.append(f"  {key}: {val}")
    return "\n".join(lines) + "\n"


def run(argv=None, stdout=None) -> int:
    stdout = stdout or sys.stdout
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except UsageError as exc:
        parser.print_usage(sys.stderr)
        print(str(exc), file=sys.stderr)
        return 2
    files: dict[str, str] = {}
    report = {"command": args.command}
    try:
        outputs, audit = DISPATCH[args.command](args, files)
        report.update(outputs=outputs, audit=audit, status="ok")
        code = 0
    except UsageError as exc:
        print(str(exc), file=sys.stderr)
        return 2
    except KContactError as exc:
        report.update(outputs=None, audit=[], status="error", error=exc.to_dict())
        code = 1
    report["inputs_digest"] = _digest(args, files)
    if args.format == "json":
        stdout.write(dumps(report))
    else:
        stdout.write(_human(to_jsonable(report)))
    return code


def main() -> None:
    sys.exit(run())
