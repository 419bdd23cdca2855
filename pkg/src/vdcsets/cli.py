"""Command-line interface: ``vdc <subcommand> [options]``.

Set and family descriptors accept a small mini-language or JSON:

  multiples:m          H = {m n : n >= 1}
  progression:a,b      H = {a n + b : n >= 1}
  poly:EXPR            H = {floor(P(n))}, e.g. poly:n^2
  primes-1^T           H = {floor((p - 1)^T)}; also primes+1^T
  powerlog:A,B         x_n = n^A log(n)^B
  kronecker:A1,A2,..  x_n = A1 n_1 + A2 n_2 + ... (index dimension = count)
  entire:EXPR,LAMBDA   x_n = f(p_n) for f given in the variable x
  {...} or @file.json  a serialized SequenceSpec / SetSpec

Exit codes: 0 success or consistent, 2 usage error, 3 spectrum violation,
4 bound violation, 5 refuted, 6 inconclusive, 7 precision or capacity error.
"""

from __future__ import annotations

import argparse
import json
import os
import re
import sys
from dataclasses import asdict, dataclass

from . import __version__
from .dynamics import Indicator, RotationSystem, birkhoff_average, recurrence_scan
from .equidist import (DEFAULT_MAX_FREQUENCY, DEFAULT_THRESHOLD_FACTOR, star_discrepancy, ud_test,
                       weyl_sum, weyl_sum_box)
from .errors import CapacityError, DomainError, EmptySetError, PrecisionError
from .generators import (DEFAULT_PRECISION_BITS, SequenceSpec, SetSpec, entire, fractional_parts,
                         generate_set, kronecker, polynomial, power_log, prime_power_shift,
                         set_elements_up_to, write_family_csv)
from .normal import champernowne, concat_stream, normality_report
from .serialize import dumps, write_csv
from .structural import (kmf_criterion, progression_verdict, refute_by_multiples,
                         shifted_prime_verdict, sufficient_condition_test)
from .witness import (Witness, enumerate_set, fejer_order, fejer_witness, lp_witness_search,
                      verify_witness)

EXIT_OK, EXIT_USAGE, EXIT_SPECTRUM, EXIT_BOUND = 0, 2, 3, 4
EXIT_REFUTED, EXIT_INCONCLUSIVE, EXIT_PRECISION = 5, 6, 7


@dataclass
class RunConfig:
    subcommand: str
    args: dict
    output: str | None
    precision_bits: int
    horizon: int
    threads: int
    seed: int

    def __post_init__(self):
        if self.precision_bits < 64:
            raise DomainError("precision must be >= 64 bits")
        if self.horizon < 1:
            raise DomainError("horizon must be >= 1")


def default_precision() -> int:
    env = os.environ.get("VDC_PRECISION_BITS")
    return int(env) if env else DEFAULT_PRECISION_BITS


# --- descriptor mini-language ------------------------------------------------------------

def _load_json(text: str):
    if text.startswith("@"):
        with open(text[1:], encoding="utf-8") as fh:
            return json.load(fh)
    return json.loads(text)


def parse_family(text: str, bits: int) -> SequenceSpec:
    text = text.strip()
    if text.startswith("{") or text.startswith("@"):
        data = _load_json(text)
        if "generator" in data:
            data = data["generator"]
        return SequenceSpec.from_json(data).with_precision(bits)
    kind, _, body = text.partition(":")
    m = re.fullmatch(r"primes([+-])1\^(.+)", text)
    if m:
        return prime_power_shift([m.group(2)], shift=1 if m.group(1) == "+" else -1,
                                 precision_bits=bits)
    if kind == "multiples":
        return polynomial(f"{int(body)}*n", precision_bits=bits)
    if kind == "progression":
        a, b = (int(x) for x in body.split(","))
        return polynomial(f"{a}*n+({b})", precision_bits=bits)
    if kind == "poly":
        return polynomial(body, precision_bits=bits)
    if kind == "powerlog":
        a, _, b = body.partition(",")
        return power_log([a], [b or "0"], precision_bits=bits)
    if kind == "kronecker":
        return kronecker([a.strip() for a in body.split(",")], precision_bits=bits)
    if kind == "entire":
        expr, _, lam = body.rpartition(",")
        return entire([expr], [lam], precision_bits=bits)
    raise DomainError(f"cannot parse descriptor {text!r}")


def parse_set(text: str, bits: int, horizon: int) -> SetSpec:
    return SetSpec(parse_family(text, bits), horizon)


def _multiples_of(text: str) -> int | None:
    m = re.fullmatch(r"\s*multiples:(-?\d+)\s*", text)
    return int(m.group(1)) if m else None


def set_membership(text: str, bits: int, horizon: int):
    """Membership predicate on integers for a one-dimensional set descriptor."""
    m = _multiples_of(text)
    if m is not None:
        return lambda h: h != 0 and h % m == 0
    elements = set(set_elements_up_to(parse_set(text, bits, horizon), horizon))
    return lambda h: h in elements


def _ints(text: str) -> list[int]:
    return [int(x) for x in text.split(",") if x.strip()]


# --- subcommands ---------------------------------------------------------------------------

def cmd_gen(args, cfg):
    if args.set:
        s = parse_set(args.set, cfg.precision_bits, cfg.horizon)
        sample = generate_set(s, args.count)
        result = {"set": s, "elements": [list(e) for e in sample.elements],
                  "indices": sample.indices, "dropped": sample.dropped}
        return EXIT_OK, result, f"{len(sample.elements)} elements ({sample.dropped} zero dropped)"
    spec = parse_family(args.family, cfg.precision_bits)
    if args.csv:
        with open(args.csv, "w", encoding="utf-8") as fh:
            write_family_csv(fh, spec, args.count)
    fr = fractional_parts(spec, args.count)
    return EXIT_OK, {"family": spec, "fractional_parts": fr}, f"{args.count} terms of {spec.kind}"


def cmd_weyl(args, cfg):
    spec = parse_family(args.family, cfg.precision_bits)
    if args.box:
        rep = weyl_sum_box(spec, _ints(args.h), _ints(args.box))
        return EXIT_OK, {"family": spec, "report": rep}, f"|S| = {rep.modulus:.6g}"
    if args.h:
        rep = weyl_sum(fractional_parts(spec, args.N), _ints(args.h))
        return EXIT_OK, {"family": spec, "report": rep}, f"|S| = {rep.modulus:.6g}"
    rep = ud_test(spec, args.N, threshold_factor=args.threshold_factor,
                  max_frequency=args.max_frequency)
    if args.csv:
        with open(args.csv, "w", encoding="utf-8") as fh:
            write_csv(fh, ["frequency", "modulus"],
                      ((" ".join(map(str, h)), v) for h, v in rep.moduli.items()))
    code = EXIT_OK if rep.consistent else EXIT_INCONCLUSIVE
    return code, {"family": spec, "report": rep}, (
        f"{rep.verdict}: max modulus {rep.max_modulus:.6g} at h={list(rep.worst_frequency)}, "
        f"threshold {rep.threshold:.6g}")


def cmd_disc(args, cfg):
    spec = parse_family(args.family, cfg.precision_bits)
    pts = fractional_parts(spec, args.N)
    if pts.shape[1] != 1:
        raise DomainError("star discrepancy is one-dimensional")
    rep = star_discrepancy(pts[:, 0], args.method)
    return EXIT_OK, {"family": spec, "report": rep}, f"D* = {rep.dstar:.6g} ({rep.method})"


def cmd_witness(args, cfg):
    m = _multiples_of(args.set)
    if m is not None and not args.lp:
        K = fejer_order(args.epsilon)
        w = fejer_witness(m, K)
        ver = verify_witness(w, lambda h: h % m == 0, args.epsilon)
        code = EXIT_OK if ver.ok else EXIT_BOUND
        return code, {"witness": w, "verification": ver, "method": "fejer", "K": K}, (
            f"Fejer witness K={K}, certified_min={w.certified_min:.6g}")
    member = set_membership(args.set, cfg.precision_bits, cfg.horizon)
    H = enumerate_set(member, 1, args.terms, max_norm=cfg.horizon)
    if not H:
        raise EmptySetError("no set elements found up to the horizon")
    res = lp_witness_search(H, args.epsilon)
    code = EXIT_OK if res.feasible else EXIT_INCONCLUSIVE
    summary = (f"feasible, certified_min={res.witness.certified_min:.6g}" if res.feasible
               else f"{res.status}: {res.reason}")
    return code, {"H": [list(h) for h in H], "result": res}, summary


def _find_witness(data: dict) -> dict:
    """Accept a bare witness or a ``vdc witness`` output document."""
    if "terms" in data:
        return data
    for key in ("result", "witness"):
        if isinstance(data.get(key), dict):
            found = _find_witness(data[key])
            if found is not None:
                return found
    raise DomainError("no witness found in the input document")


def cmd_verify(args, cfg):
    text = args.witness.strip()
    data = _load_json(text if text[:1] in "{@" else "@" + text)
    w = Witness.from_json(_find_witness(data))
    member = set_membership(args.set, cfg.precision_bits, cfg.horizon) if args.set else None
    ver = verify_witness(w, member, args.epsilon, args.fine_grid)
    code = {"ok": EXIT_OK, "spectrum_violation": EXIT_SPECTRUM,
            "normalization_violation": EXIT_SPECTRUM}.get(ver.status, EXIT_BOUND)
    return code, {"witness": w, "verification": ver}, ver.status


def cmd_refute(args, cfg):
    if args.progression:
        a, b = _ints(args.progression)
        v = progression_verdict(a, b)
    elif args.shifted_prime:
        a, b = _ints(args.shifted_prime)
        v = shifted_prime_verdict(a, b)
    else:
        s = parse_set(args.set, cfg.precision_bits, cfg.horizon)
        qs = range(1, args.qmax + 1)
        cert = refute_by_multiples(s, qs, cfg.horizon)
        if cert is None:
            return EXIT_INCONCLUSIVE, {"set": s, "certificate": None,
                                       "verdict": "no refutation found"}, "no refutation found"
        return EXIT_REFUTED, {"set": s, "verdict": "not_vdC", "certificate": cert}, (
            f"not vdC: finitely many multiples of {cert.params['q']} ({cert.proof_mode})")
    code = EXIT_OK if v.is_vdc else EXIT_REFUTED
    return code, v, v.verdict


def cmd_kmf(args, cfg):
    cv = kmf_criterion(args.poly, args.qmax)
    code = EXIT_REFUTED if cv.obstruction_q is not None else EXIT_OK
    summary = (f"obstruction at q={cv.obstruction_q}" if cv.obstruction_q is not None
               else f"all roots found up to q={cv.q_max}")
    return code, cv, summary


def cmd_dq(args, cfg):
    g = [polynomial(p.strip(), precision_bits=cfg.precision_bits) for p in args.g.split(";")]
    basis = _ints(args.basis) if args.basis else None
    xs = None
    if args.x:
        xs = [{"label": f"x{i}", "x": [c.strip() for c in grp.split(",")]}
              for i, grp in enumerate(args.x)]
    rep = sufficient_condition_test(g, basis, _ints(args.q), xs, N=args.N,
                                    horizon=args.dq_horizon, seed=cfg.seed,
                                    threshold_factor=args.threshold_factor,
                                    precision_bits=cfg.precision_bits, workers=cfg.threads)
    code = EXIT_OK if rep.verdict == "hypothesis consistent" else EXIT_INCONCLUSIVE
    return code, rep, f"{rep.verdict} (basis {rep.basis_used})"


def cmd_recur(args, cfg):
    u, v = args.interval.split(",")
    sys_ = RotationSystem(args.alpha, u, v, cfg.precision_bits)
    s = parse_set(args.set, cfg.precision_bits, cfg.horizon)
    scan = recurrence_scan(sys_, s, args.epsilon, args.max_n)
    if args.csv:
        with open(args.csv, "w", encoding="utf-8") as fh:
            scan.write_csv(fh)
    result = {"system": sys_, "set": s, "scan": scan}
    if args.birkhoff:
        result["birkhoff"] = birkhoff_average(sys_, Indicator(u, v), args.birkhoff)
    code = EXIT_OK if scan.hits else EXIT_INCONCLUSIVE
    first = scan.hits[0].n if scan.hits else None
    return code, result, f"{len(scan.hits)} hits, first n={first}"


def cmd_normal(args, cfg):
    if args.construction == "champernowne":
        stream = champernowne(args.q)
    else:
        stream = concat_stream(args.construction, args.q, args.g)
    if args.digits_out:
        with open(args.digits_out, "w", encoding="utf-8") as fh:
            fh.write(stream.text(args.N))
            fh.write("\n")
    rep = normality_report(stream, args.L_max, args.N)
    devs = ", ".join(f"L={L}: {d:.4g}" for L, d in rep.max_deviation.items())
    return EXIT_OK, {"stream": stream, "report": rep}, f"max deviation {devs}"


# --- parser --------------------------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--out", help="write canonical JSON here (default: stdout)")
    common.add_argument("--precision", type=int, default=None,
                        help="working precision in bits (env VDC_PRECISION_BITS)")
    common.add_argument("--horizon", type=int, default=10**6, help="set enumeration horizon")
    common.add_argument("--threads", type=int, default=os.cpu_count() or 1)
    common.add_argument("--seed", type=int, default=0)

    p = argparse.ArgumentParser(prog="vdc", description=__doc__,
                                formatter_class=argparse.RawDescriptionHelpFormatter)
    p.add_argument("--version", action="version", version=f"vdc {__version__}")
    sub = p.add_subparsers(dest="subcommand", required=True)

    s = sub.add_parser("gen", parents=[common], help="generate a family or a set")
    grp = s.add_mutually_exclusive_group(required=True)
    grp.add_argument("--family")
    grp.add_argument("--set")
    s.add_argument("--count", type=int, default=10)
    s.add_argument("--csv")
    s.set_defaults(func=cmd_gen)

    s = sub.add_parser("weyl", parents=[common], help="Weyl sums / u.d. screen")
    s.add_argument("--family", required=True)
    s.add_argument("--N", type=int, default=10**4)
    s.add_argument("--h", help="single frequency, comma separated")
    s.add_argument("--box", help="index box N1,N2,... (needs --h)")
    s.add_argument("--threshold-factor", type=float, default=DEFAULT_THRESHOLD_FACTOR)
    s.add_argument("--max-frequency", type=int, default=DEFAULT_MAX_FREQUENCY)
    s.add_argument("--csv")
    s.set_defaults(func=cmd_weyl)

    s = sub.add_parser("disc", parents=[common], help="star discrepancy")
    s.add_argument("--family", required=True)
    s.add_argument("--N", type=int, default=1000)
    s.add_argument("--method", choices=["fast", "oracle"], default="fast")
    s.set_defaults(func=cmd_disc)

    s = sub.add_parser("witness", parents=[common], help="construct a vdC witness")
    s.add_argument("--set", required=True)
    s.add_argument("--epsilon", type=float, required=True)
    s.add_argument("--terms", type=int, default=16, help="number of H elements for the LP")
    s.add_argument("--lp", action="store_true", help="use the LP even for multiples:m")
    s.set_defaults(func=cmd_witness)

    s = sub.add_parser("verify", parents=[common], help="verify a witness")
    s.add_argument("--witness", required=True, help="witness JSON, @file or file path")
    s.add_argument("--set")
    s.add_argument("--epsilon", type=float, required=True)
    s.add_argument("--fine-grid", type=int)
    s.set_defaults(func=cmd_verify)

    s = sub.add_parser("refute", parents=[common], help="structural refutation")
    grp = s.add_mutually_exclusive_group(required=True)
    grp.add_argument("--progression", help="a,b")
    grp.add_argument("--shifted-prime", help="a,b")
    grp.add_argument("--set")
    s.add_argument("--qmax", type=int, default=50)
    s.set_defaults(func=cmd_refute)

    s = sub.add_parser("kmf", parents=[common], help="congruence criterion")
    s.add_argument("--poly", required=True)
    s.add_argument("--qmax", type=int, default=100)
    s.set_defaults(func=cmd_kmf)

    s = sub.add_parser("dq-test", parents=[common], help="D_q sufficient-condition screen")
    s.add_argument("--g", required=True, help="polynomials separated by ';'")
    s.add_argument("--basis", help="0-based basis indices")
    s.add_argument("--q", default="1,2,3")
    s.add_argument("--x", action="append", help="sample vector, comma separated (repeatable)")
    s.add_argument("--N", type=int, default=10**4)
    s.add_argument("--dq-horizon", type=int, default=10**7)
    s.add_argument("--threshold-factor", type=float, default=DEFAULT_THRESHOLD_FACTOR)
    s.set_defaults(func=cmd_dq)

    s = sub.add_parser("recur", parents=[common], help="rotation recurrence scan")
    s.add_argument("--alpha", default="phi")
    s.add_argument("--interval", default="0,1/2")
    s.add_argument("--set", default="poly:n")
    s.add_argument("--epsilon", default="0.05")
    s.add_argument("--max-n", type=int, default=100)
    s.add_argument("--birkhoff", type=int)
    s.add_argument("--csv")
    s.set_defaults(func=cmd_recur)

    s = sub.add_parser("normal", parents=[common], help="normal-number statistics")
    s.add_argument("--construction", default="champernowne",
                   choices=["champernowne", "polynomial", "primes", "primes_with_polynomial"])
    s.add_argument("--g")
    s.add_argument("--q", type=int, default=10)
    s.add_argument("--N", type=int, default=10**5)
    s.add_argument("--L-max", type=int, default=2)
    s.add_argument("--digits-out")
    s.set_defaults(func=cmd_normal)
    return p


def run(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)      # exits with code 2 on usage errors
    raw = {k: v for k, v in sorted(vars(args).items())
           if k not in ("func", "subcommand", "out", "precision", "horizon", "threads", "seed")}
    try:
        cfg = RunConfig(args.subcommand, raw, args.out,
                        args.precision if args.precision is not None else default_precision(),
                        args.horizon, args.threads, args.seed)
        code, result, summary = args.func(args, cfg)
    except (PrecisionError, CapacityError) as exc:
        print(f"vdc: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_PRECISION
    except EmptySetError as exc:
        print(f"vdc: {exc}", file=sys.stderr)
        return EXIT_INCONCLUSIVE
    except (DomainError, ValueError, OSError) as exc:
        print(f"vdc: error: {exc}", file=sys.stderr)
        parser.print_usage(sys.stderr)
        return EXIT_USAGE
    doc = dumps({"version": __version__, "config": asdict(cfg), "exit_code": code,
                 "result": result})
    if args.out:
        with open(args.out, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(doc + "\n")
        print(summary)
    else:
        print(doc)
        print(summary, file=sys.stderr)
    return code


def main() -> None:
    sys.exit(run())


if __name__ == "__main__":
    main()
