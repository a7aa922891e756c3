"""Command-line interface: ``polybound <command> ...``.

Exit codes: 0 verified/complete, 1 counterexample, 2 inconclusive within
bounds, 3 usage, parse or guard errors.
"""

from __future__ import annotations

import argparse
import json
import random
import sys
import time
from pathlib import Path

from . import lab, structure
from . import polybounded as pb
from . import zariski as zr
from .io import SpecError, default_window, parse_elements, parse_spec
from .polynomial import render
from .search import DEFAULT_GUARD, SearchGuardExceeded
from .semigroup import SemigroupError, Window

OK, REFUTED, INCONCLUSIVE, USAGE = 0, 1, 2, 3
MAX_WINDOW = 5000
ASSOC_WINDOW = 200


class UsageError(Exception):
    pass


# --------------------------------------------------------------------------
# report helpers


def verdict_doc(v):
    if v is None:
        return None
    d = {"status": v.status, "exhaustive": v.exhaustive}
    if v.verified:
        d["scope"] = v.scope
    if v.witness is not None:
        d["witness"] = v.witness
    for k, val in v.info.items():
        d.setdefault(k, val)
    return d


def _plain(obj):
    if isinstance(obj, dict):
        return {str(k): _plain(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_plain(v) for v in obj]
    if isinstance(obj, (set, frozenset)):
        return [_plain(v) for v in sorted(obj)]
    if hasattr(obj, "item"):
        return obj.item()
    return obj


def emit(report, fmt, out):
    report = _plain(report)
    if fmt == "json":
        out.write(json.dumps(report, indent=2) + "\n")
        return
    for key, val in report.items():
        if isinstance(val, (dict, list)):
            val = json.dumps(val, separators=(",", ":"))
        out.write(f"{key}: {val}\n")


def _window(S, size, cap=MAX_WINDOW):
    size = default_window(S, size)
    if size > cap:
        raise SearchGuardExceeded(size, cap)
    return Window(S, size)


def _read(path):
    try:
        return Path(path).read_text()
    except OSError as exc:
        raise UsageError(f"cannot read {path}: {exc.strerror}") from None


def _coeffs(args, S, W, default_infinite="0..19"):
    if args.coeffs is not None:
        return parse_elements(args.coeffs, S)
    if S.is_finite:
        return list(range(S.order))
    return parse_elements(default_infinite, S)


def _base(args, S, command):
    return {"command": command, "spec": args.spec}


# --------------------------------------------------------------------------
# analyze


def cmd_analyze(args):
    S = parse_spec(args.spec)
    W = _window(S, args.window)
    A = Window(S, min(W.size, ASSOC_WINDOW))
    rep = _base(args, S, "analyze")
    rep["window"] = W.size
    rep["finite"] = S.is_finite
    rep["order"] = S.order if S.is_finite else "omega"
    rep["exhaustive"] = W.exhaustive
    assoc = structure.check_associative(A)
    rep["associative"] = verdict_doc(assoc)
    canc = structure.is_cancellative(W)
    rep["cancellative"] = canc.verified
    rep["cancellative_verdict"] = verdict_doc(canc)
    rep["finite_to_one_shifts"] = verdict_doc(structure.has_finite_to_one_shifts(W))
    idem = structure.idempotents(W)
    rep["idempotents"] = idem
    rep["center"] = structure.center(W)
    rep["regular"] = [[x, w] for x, w in structure.regular_elements(W)]
    n = structure.boundedness_exponent(W)
    rep["boundedness_exponent"] = n if n is not None else "not-bounded-within-window"
    group = (W.exhaustive and S.identity is not None
             and all(S.inverse(x) is not None for x in W.elements))
    rep["group"] = group
    if not assoc.verified:
        return rep, REFUTED
    return rep, OK


# --------------------------------------------------------------------------
# cover


def _load_cover(S, path):
    return pb.parse_cover(S, _read(path))


def _cover_or_trivial(args, S, path_attr="file"):
    path = getattr(args, path_attr, None)
    if path:
        return _load_cover(S, path)
    if getattr(args, "trivial", False) or S.is_finite:
        return pb.trivial_finite_cover(S)
    raise UsageError("a cover file is required for an infinite semigroup")


def _cover_doc(cover):
    return cover.lines()


def _write_cover(args, cover):
    if getattr(args, "out", None):
        Path(args.out).write_text(pb.format_cover(cover))


def cmd_cover(args):
    S = parse_spec(args.spec)
    action = args.action
    rep = _base(args, S, f"cover {action}")
    if action == "verify":
        W = _window(S, args.window)
        cover = _load_cover(S, args.file)
        target = parse_elements(args.target, S) if args.target else None
        v = pb.verify_cover(W, cover, target)
        rep["window"] = W.size
        rep.update(verdict_doc(v))
        return rep, OK if v.verified else REFUTED
    if action == "search":
        W = _window(S, args.window)
        coeffs = _coeffs(args, S, W)
        target = parse_elements(args.target, S) if args.target else None
        rep.update(window=W.size, degree_bound=args.deg, coeff_pool=coeffs,
                   size_bound=args.size)
        cover = pb.search_cover(W, args.deg, coeffs, args.size, target=target, guard=args.guard)
        if cover is None:
            rep["status"] = "none-within-bounds"
            return rep, INCONCLUSIVE
        v = pb.verify_cover(W, cover, target)
        rep.update(verdict_doc(v))
        rep["cover"] = _cover_doc(cover)
        _write_cover(args, cover)
        return rep, OK
    if action == "prune":
        W = _window(S, args.window)
        cover = _load_cover(S, args.file)
        out = pb.prune_cover(cover, W)
        rep["window"] = W.size
        rep.update(verdict_doc(pb.verify_cover(W, out)))
        rep["cover"] = _cover_doc(out)
        _write_cover(args, out)
        return rep, OK
    if action == "regularize":
        W = _window(S, args.window)
        cover = _cover_or_trivial(args, S)
        if not all(f.coeffs[0] is None and f.coeffs[-1] is None for f in cover.polys):
            cover = pb.prune_cover(cover, W)
        out = pb.regularize_cover(cover, W)
        rep["window"] = W.size
        rep.update(verdict_doc(pb.verify_cover(W, out)))
        rep["cover"] = _cover_doc(out)
        rep["witnesses"] = {b: w for b, (_, w) in pb.constant_witnesses(out).items()}
        _write_cover(args, out)
        return rep, OK
    if action == "transport":
        cover = _cover_or_trivial(args, S)
        if args.classes:
            classes = [parse_elements(c, S) for c in args.classes.split(";")]
            Q, q = structure.quotient_by_congruence(S, classes)
        elif args.ideal:
            Q, q = structure.quotient_by_ideal(S, parse_elements(args.ideal, S))
        else:
            raise UsageError("transport needs --classes or --ideal")
        out = pb.transport_quotient(cover, q, Q)
        rep["quotient_order"] = Q.order
        rep["map"] = q
        rep.update(verdict_doc(pb.verify_cover(Q.window(), out)))
        rep["cover"] = _cover_doc(out)
        _write_cover(args, out)
        return rep, OK
    if action == "product":
        if not args.spec2:
            raise UsageError("product needs a second spec")
        T = parse_spec(args.spec2)
        rep["spec2"] = args.spec2
        cX = _cover_or_trivial(args, S)
        cY = _cover_or_trivial(args, T, "file2")
        from .semigroup import product
        P = product(S, T)
        WX, WY = _window(S, args.window), _window(T, args.window)
        WP = _window(P, args.window)
        out = pb.product_cover(cX, cY, P, WX, WY, WP)
        rep["window"] = WP.size
        rep.update(verdict_doc(pb.verify_cover(WP, out)))
        rep["degrees"] = sorted({f.degree for f in out.polys})
        rep["pairs"] = len(out)
        rep["cover"] = _cover_doc(out)
        _write_cover(args, out)
        return rep, OK
    if action == "group-extract":
        W = _window(S, args.window)
        cover = _cover_or_trivial(args, S)
        g = pb.group_from_cover(W, cover)
        rep["window"] = W.size
        rep["identity"] = g.identity
        rep["inverse"] = dict(sorted(g.inverse.items()))
        return rep, OK
    raise UsageError(f"unknown cover action {action!r}")


# --------------------------------------------------------------------------
# zariski


def _cert_doc(cert):
    return None if cert is None else [f"{render(f)} = {b}" for f, b in cert.pairs]


def cmd_zariski(args):
    S = parse_spec(args.spec)
    W = _window(S, args.window)
    coeffs = _coeffs(args, S, W)
    deg = args.deg
    size = args.size if args.size is not None else (max(S.order - 1, 1) if S.is_finite else 6)
    rep = _base(args, S, f"zariski {args.action}")
    rep.update(window=W.size, degree_bound=deg, coeff_pool=coeffs, size_bound=size)
    if args.action == "isolate":
        if args.point is None:
            raise UsageError("isolate needs --point")
        cert = zr.search_isolation(W, args.point, deg, coeffs, size, guard=args.guard)
        rep["point"] = args.point
        if cert is None:
            rep["status"] = "none-within-bounds"
            return rep, INCONCLUSIVE
        rep.update(verdict_doc(zr.verify_isolation(W, cert)))
        rep["certificate"] = _cert_doc(cert)
        cover = zr.isolation_to_cover(W, cert)
        rep["cover"] = cover.lines()
        rep["cover_verdict"] = verdict_doc(pb.verify_cover(W, cover))
        if args.out:
            Path(args.out).write_text(zr.format_certificate(cert))
        return rep, OK
    if args.action == "verify":
        cert = zr.parse_certificate(S, _read(args.file))
        v = zr.verify_isolation(W, cert)
        rep["point"] = cert.point
        rep.update(verdict_doc(v))
        return rep, OK if v.verified else REFUTED
    if args.action == "report":
        points = parse_elements(args.points, S) if args.points else None
        r = zr.discreteness_report(W, deg, coeffs, size, points=points, guard=args.guard)
        rep["exhaustive"] = r.exhaustive
        rep["points"] = [{"point": p.point,
                          "isolated": "yes" if p.isolated else "unknown-within-bounds",
                          "certificate": _cert_doc(p.certificate)} for p in r.points]
        rep["all_isolated"] = r.all_isolated
        rep["note"] = r.note
        return rep, OK if r.all_isolated else INCONCLUSIVE
    raise UsageError(f"unknown zariski action {args.action!r}")


# --------------------------------------------------------------------------
# lab


def _avoider(S, steps, size):
    """Sequence, stop reason (None when complete)."""
    W = _window(S, size)
    try:
        res = lab.build_avoider_sequence(W, steps)
    except lab.WindowExhausted as exc:
        return exc.sequence, f"window exhausted at step {exc.step}"
    if isinstance(res, lab.PolyboundedObstruction):
        return res.sequence, f"polybounded obstruction at step {res.step}"
    return res, None


def _free_base(W, t):
    blocks = max(3, -(-W.size // max(t, 1)))
    step = -(-W.size // blocks)
    return lab.FilterBase(W, [lab.cofinite(W, range(k * step, min(W.size, (k + 1) * step)))
                              for k in range(blocks)])


def _random_base(W, t, count, seed):
    rng = random.Random(seed)
    return lab.FilterBase(W, [lab.cofinite(W, rng.sample(range(W.size), rng.randint(0, t)))
                              for _ in range(count)])


def cmd_lab(args):
    S = parse_spec(args.spec)
    rep = _base(args, S, f"lab {args.action}")
    if args.action == "avoider":
        seq, stop = _avoider(S, args.steps, args.window)
        rep["window"] = seq.window
        rep["steps_requested"] = args.steps
        rep["sequence"] = seq.elements
        rep["constraint_counts"] = [{"step": l.step, "x": l.element, "pool": l.pool_size,
                                     "words": l.words, "tuples": l.tuples,
                                     "rejected": l.rejected} for l in seq.log]
        problems = lab.reverify_avoider(seq)
        rep["reverified"] = not problems
        if problems:
            rep["problems"] = problems
        rep["status"] = "complete" if stop is None else stop
        if problems:
            return rep, REFUTED
        return rep, OK if stop is None else INCONCLUSIVE
    if args.action in ("family", "l0-check"):
        seq, stop = _avoider(S, args.from_avoider, args.avoider_window or args.window)
        pool = parse_elements(args.pool, S) if args.pool else list(range(5))
        K = lab.gen_family_K(seq, pool, args.blocks, args.max_entries)
        W = _window(S, args.window)
        rep.update(window=W.size, base=seq.elements, avoider_status=stop or "complete",
                   pool=pool, blocks=args.blocks, entries=len(K.entries), truncated=K.truncated)
        if args.action == "family":
            rep["family"] = [{"entry": ["id" if c is None else c for c in t],
                              "expansion_size": len(K.expansion(t, W.size))}
                             for t in K.entries]
            return rep, OK if stop is None else INCONCLUSIVE
        reports = lab.check_l0_conditions(K, W, args.fiber_bound)
        rep["conditions"] = [{"condition": r.condition, "holds": r.holds, "checked": r.checked,
                              "skipped": r.skipped, "witnessed_by_tuple": r.witnessed_by_tuple,
                              "witnessed_by_inclusion": r.witnessed_by_inclusion,
                              "unwitnessed": len(r.unwitnessed), "max_fiber": r.max_fiber,
                              "fiber_bound": r.bound} for r in reports]
        if not all(r.holds for r in reports):
            return rep, REFUTED
        return rep, OK if stop is None else INCONCLUSIVE
    if args.action == "filter":
        W = _window(S, args.window)
        t = args.threshold if args.threshold is not None else lab.default_threshold(W.size)
        if args.base == "cofinite":
            F = lab.FilterBase(W, [lab.cofinite(W)])
        elif args.base == "free":
            F = _free_base(W, t)
        elif args.base == "random":
            F = _random_base(W, t, args.count, args.seed)
        elif args.base.startswith("scenario:"):
            F = lab.parse_scenario(W, _read(args.base[len("scenario:"):]))
        else:
            raise UsageError(f"unknown base {args.base!r}")
        if args.shifts in (None, "none"):
            shifts = (None,) * (args.iterate + 2)
        else:
            shifts = tuple(None if s == "id" else S.check(int(s)) for s in args.shifts.split(","))
            if len(shifts) != args.iterate + 2:
                raise UsageError(f"--iterate {args.iterate} needs {args.iterate + 2} shifts")
        cls = lab.t1_witness_check(F, shifts, t)
        pair = (cls.core[0], cls.core[1]) if len(cls.core) >= 2 else None
        rep.update(window=W.size, threshold=t, base_sets=len(F.sets),
                   base_deficits=F.deficits(), copies=args.iterate + 1,
                   free_on_window=cls.free_on_window,
                   principal_on_window=cls.principal_on_window,
                   neither=cls.neither, witness_pair=pair,
                   core_size=len(cls.core), core_head=list(cls.core[:10]))
        return rep, OK
    raise UsageError(f"unknown lab action {args.action!r}")


# --------------------------------------------------------------------------
# argument parsing


def build_parser():
    p = argparse.ArgumentParser(prog="polybound",
                                description="Polybounded covers, Zariski isolation and "
                                            "filter witnesses for semigroups.")
    p.add_argument("--format", choices=("text", "json"), default="text")
    p.add_argument("--timing", action="store_true", help="add wall-clock time to the report")
    p.add_argument("-v", "--verbose", action="store_true")
    sub = p.add_subparsers(dest="command", required=True)

    def common(sp, window=True):
        sp.add_argument("spec")
        if window:
            sp.add_argument("--window", type=int, default=None)

    a = sub.add_parser("analyze", help="structural checks on a window")
    common(a)

    c = sub.add_parser("cover", help="polybounded cover certificates")
    c.add_argument("action", choices=("verify", "search", "prune", "regularize", "transport",
                                      "product", "group-extract"))
    common(c)
    c.add_argument("spec2", nargs="?")
    c.add_argument("--file")
    c.add_argument("--file2")
    c.add_argument("--trivial", action="store_true")
    c.add_argument("--target")
    c.add_argument("--deg", type=int, default=2)
    c.add_argument("--coeffs")
    c.add_argument("--size", type=int, default=3)
    c.add_argument("--guard", type=int, default=DEFAULT_GUARD)
    c.add_argument("--classes", help="congruence classes, e.g. '0,2;1,3'")
    c.add_argument("--ideal", help="ideal elements, e.g. '0,1'")
    c.add_argument("--out")

    z = sub.add_parser("zariski", help="isolation certificates")
    z.add_argument("action", choices=("isolate", "verify", "report"))
    common(z)
    z.add_argument("--point", type=int)
    z.add_argument("--points")
    z.add_argument("--file")
    z.add_argument("--deg", type=int, default=3)
    z.add_argument("--coeffs")
    z.add_argument("--size", type=int)
    z.add_argument("--guard", type=int, default=DEFAULT_GUARD)
    z.add_argument("--out")

    l = sub.add_parser("lab", help="avoider sequences, families and filters")
    l.add_argument("action", choices=("avoider", "family", "l0-check", "filter"))
    common(l)
    l.add_argument("--steps", type=int, default=5)
    l.add_argument("--from-avoider", type=int, default=5)
    l.add_argument("--avoider-window", type=int)
    l.add_argument("--blocks", type=int, default=2)
    l.add_argument("--pool")
    l.add_argument("--max-entries", type=int)
    l.add_argument("--fiber-bound", type=int, default=10)
    l.add_argument("--base", default="cofinite",
                   help="cofinite, free, random or scenario:<path>")
    l.add_argument("--shifts", default="none")
    l.add_argument("--iterate", type=int, default=1, help="number of filter products")
    l.add_argument("--threshold", type=int)
    l.add_argument("--count", type=int, default=5)
    l.add_argument("--seed", type=int, default=0)
    return p


COMMANDS = {"analyze": cmd_analyze, "cover": cmd_cover, "zariski": cmd_zariski, "lab": cmd_lab}


def main(argv=None, out=None):
    out = out or sys.stdout
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return USAGE if exc.code else OK
    if args.verbose:
        import logging
        logging.basicConfig(level=logging.DEBUG, format="%(name)s: %(message)s")
    start = time.perf_counter()
    try:
        rep, code = COMMANDS[args.command](args)
    except SearchGuardExceeded as exc:
        sys.stderr.write(f"polybound: guard exceeded: {exc}\n")
        return USAGE
    except (SpecError, UsageError) as exc:
        sys.stderr.write(f"polybound: {exc}\n")
        return USAGE
    except pb.CoverError as exc:
        sys.stderr.write(f"polybound: {exc}\n")
        return REFUTED
    except (SemigroupError, ValueError) as exc:
        sys.stderr.write(f"polybound: {exc}\n")
        return USAGE
    if args.timing:
        rep["seconds"] = round(time.perf_counter() - start, 4)
    rep["exit_code"] = code
    emit(rep, args.format, out)
    return code


if __name__ == "__main__":
    sys.exit(main())
