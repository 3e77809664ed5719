"""Command-line workbench: ``kitlab validate | kit | prof | species | laws``.

Exit codes: 0 success, 1 a check or validation failed, 2 usage error, 3 budget exceeded.
"""
from __future__ import annotations

import argparse
import sys
from pathlib import Path

from . import io
from .errors import BudgetExceeded, GroupTooLarge, KitlabError, ParseError, ProbeBudgetExceeded
from .groupoid import Groupoid
from .kits import (Kit, canonical_kit, double_orth, enumerate_boolean_kits, enumerate_kits, is_boolean,
                   limp_kit, orthogonal_kit, par_kit, plus_kit, tensor_kit, with_kit)
from .presheaf import Presheaf, apply_profunctor
from .profunctor import Profunctor, compose, find_iso, identity_profunctor, is_stabilized, sym_lift

EXIT_OK, EXIT_FAIL, EXIT_USAGE, EXIT_BUDGET = 0, 1, 2, 3
CANONICAL = ("trivial", "maximal")


class UsageError(Exception):
    pass


# ----------------------------------------------------------------- loading

def load_obj(ref):
    """A path, a bundled fixture name, or ``trivial:<G>`` / ``maximal:<G>`` for canonical kits."""
    if ":" in ref and ref.split(":", 1)[0] in CANONICAL:
        which, g = ref.split(":", 1)
        return canonical_kit(io.Resolver().groupoid(g), which)
    p = Path(ref)
    if p.is_file() or (io.FIXTURE_DIR / f"{ref}.json").is_file():
        return io.load(p)
    if ref.endswith(".json") and (io.FIXTURE_DIR / p.name).is_file():
        return io.load(io.FIXTURE_DIR / p.name)
    raise ParseError(f"cannot find {ref!r} (not a file and not a bundled fixture)")


def load_kind(ref, cls, what):
    obj = load_obj(ref)
    if not isinstance(obj, cls):
        raise UsageError(f"{ref} is a {type(obj).__name__}, expected a {what}")
    return obj


def load_kit_tokens(tokens):
    """``trivial C6`` (two tokens) or a single kit reference."""
    if len(tokens) == 2 and tokens[0] in CANONICAL:
        return canonical_kit(io.Resolver().groupoid(tokens[1]), tokens[0])
    if len(tokens) != 1:
        raise UsageError("expected one kit reference or '<trivial|maximal> <groupoid>'")
    return load_kind(tokens[0], Kit, "kit")


def load_groupoid(ref):
    obj = load_obj(ref) if not ref.startswith("sym(") else io.Resolver().groupoid(ref)
    if isinstance(obj, Kit):
        return obj.base
    if not isinstance(obj, Groupoid):
        raise UsageError(f"{ref} is not a groupoid")
    return obj


# ----------------------------------------------------------------- output

def emit(args, obj, text):
    if args.json:
        sys.stdout.write(io.dumps(obj if isinstance(obj, (dict, list)) else io.to_raw(obj)))
    else:
        print(text)


def kit_label(K: Kit):
    for which in CANONICAL:
        if K.family == canonical_kit(K.base, which).family:
            return which
    return None


def kit_text(K: Kit):
    lab = kit_label(K)
    return repr(K) + (f"  [{lab}]" if lab else "")


def prof_text(P: Profunctor):
    A, B = P.source, P.target
    lines = [f"profunctor with {len(P)} elements over {A.n_objects} x {B.n_objects} objects"]
    for (b, a), ps in sorted(P.cells().items()):
        lines.append(f"  {io._obj_name(B, b)}|{io._obj_name(A, a)}: {len(ps)}")
    return "\n".join(lines)


def sizes_text(G, sizes):
    return "\n".join(f"  {io._obj_name(G, b)}: {n}" for b, n in enumerate(sizes))


# --------------------------------------------------------------- commands

def cmd_validate(args):
    obj = load_obj(args.path)
    kind = type(obj).__name__
    extra = ""
    if isinstance(obj, Groupoid):
        extra = f" ({obj.n_objects} objects, {obj.n_morphisms} morphisms)"
    elif isinstance(obj, (Profunctor, Presheaf)):
        extra = f" ({len(obj)} elements)"
    emit(args, {"ok": True, "kind": kind}, f"ok: {kind}{extra}")
    return EXIT_OK


def cmd_kit(args):
    op = args.kit_cmd
    if op in ("orth", "dorth"):
        K = load_kit_tokens(args.kit)
        R = orthogonal_kit(K) if op == "orth" else double_orth(K)
        emit(args, R, kit_text(R))
        return EXIT_OK
    if op == "boolean":
        K = load_kit_tokens(args.kit)
        cert = is_boolean(K)
        emit(args, {"boolean": bool(cert)}, "boolean" if cert else "not boolean")
        return EXIT_OK if cert else EXIT_FAIL
    if op == "enumerate":
        G = load_groupoid(args.groupoid)
        kits = enumerate_boolean_kits(G) if args.boolean else enumerate_kits(G)
        if args.json:
            sys.stdout.write(io.dumps({"count": len(kits), "kits": [io.kit_to_raw(K)["family"] for K in kits]}))
        else:
            print(f"{len(kits)} {'Boolean ' if args.boolean else ''}kits")
            for K in kits:
                print("  " + kit_text(K))
        return EXIT_OK
    if op == "connect":
        return connect(args)
    raise UsageError(f"unknown kit command {op}")


def connect(args):
    from .sym import bang_kit, whynot_kit
    kits = [load_kit_tokens([r]) for r in args.kits]
    unary = {"bang": lambda K: bang_kit(K, args.length), "whynot": lambda K: whynot_kit(K, args.length)}
    binary = {"tensor": tensor_kit, "par": par_kit, "limp": limp_kit}
    nary = {"with": with_kit, "plus": plus_kit}
    c = args.connective
    if c in unary:
        if len(kits) != 1:
            raise UsageError(f"{c} takes one kit")
        R = unary[c](kits[0])
    elif c in binary:
        if len(kits) != 2:
            raise UsageError(f"{c} takes two kits")
        R = binary[c](*kits)
    else:
        if not kits:
            raise UsageError(f"{c} takes at least one kit")
        R = nary[c](*kits)
    emit(args, R, kit_text(R))
    return EXIT_OK


def _prof_or_identity(ref, other, side):
    if ref == "id":
        if other is None:
            raise UsageError("at most one side of compose may be 'id'")
        return identity_profunctor(other.target if side == "left" else other.source)
    return load_kind(ref, Profunctor, "profunctor")


def cmd_prof(args):
    op = args.prof_cmd
    if op == "compose":
        P = None if args.p == "id" else load_kind(args.p, Profunctor, "profunctor")
        Q = None if args.q == "id" else load_kind(args.q, Profunctor, "profunctor")
        if P is None:
            P = _prof_or_identity("id", Q, "right")
        if Q is None:
            Q = _prof_or_identity("id", P, "left")
        R = compose(P, Q)
        text = prof_text(R)
        if args.p == "id" or args.q == "id":
            other = Q if args.p == "id" else P
            iso = find_iso(R, other) is not None
            text += f"\nisomorphic to the non-identity argument: {'yes' if iso else 'no'}"
            if args.json:
                sys.stdout.write(io.dumps({"iso": iso, "size": len(R)}))
                return EXIT_OK if iso else EXIT_FAIL
            print(text)
            return EXIT_OK if iso else EXIT_FAIL
        emit(args, R, text)
        return EXIT_OK
    if op == "dual":
        P = load_kind(args.p, Profunctor, "profunctor")
        D = P.dual()
        emit(args, D, prof_text(D))
        return EXIT_OK
    if op == "stabilized":
        P = load_kind(args.p, Profunctor, "profunctor")
        KA, KB = load_kit_tokens([args.ka]), load_kit_tokens([args.kb])
        r = is_stabilized(P, KA.on(P.source), KB.on(P.target))
        if r:
            emit(args, {"stabilized": True}, "stabilized")
            return EXIT_OK
        a, b, p, alpha, beta, clause = r.witness
        A, B = P.source, P.target
        w = {"a": io._obj_name(A, a), "b": io._obj_name(B, b), "element": P.names[p],
             "alpha": io._mor_name(A, alpha), "beta": io._mor_name(B, beta), "clause": clause}
        emit(args, {"stabilized": False, "witness": w},
             f"not stabilized: {w['alpha']}·{w['element']}·{w['beta']} = {w['element']} "
             f"violates the {clause} clause at ({w['b']}, {w['a']})")
        return EXIT_FAIL
    if op == "apply":
        P = load_kind(args.p, Profunctor, "profunctor")
        X = load_kind(args.x, Presheaf, "presheaf")
        kits = [load_kit_tokens([r]) for r in args.kits] if args.kits else [None, None]
        Y = apply_profunctor(P, X, *kits)
        sizes = Y.sizes()
        emit(args, {"sizes": {io._obj_name(P.target, b): int(n) for b, n in enumerate(sizes)}},
             "P#(X) sizes:\n" + sizes_text(P.target, sizes))
        return EXIT_OK
    if op == "symlift":
        P = load_kind(args.p, Profunctor, "profunctor")
        S = sym_lift(P, args.length)
        emit(args, S, prof_text(S))
        return EXIT_OK
    raise UsageError(f"unknown prof command {op}")


def _species(ref):
    from .sym import SymGroupoid
    P = load_kind(ref, Profunctor, "species")
    if not isinstance(P.source, SymGroupoid):
        raise UsageError(f"{ref} is not a species (its source is not a Sym groupoid)")
    return P


def _int_list(text):
    try:
        return [int(x) for x in text.split(",") if x.strip()]
    except ValueError:
        raise UsageError(f"expected comma-separated integers, got {text!r}") from None


def cmd_species(args):
    from .presheaf import set_presheaf
    from .species import (SetSpecies, derivative, is_free_species, parallel_or_fixture, parallel_or_sizes,
                          polynomial_coefficients, species_eval, trace_roundtrip)
    op = args.species_cmd
    if op == "por":
        sizes = _int_list(args.sizes)
        if len(sizes) != 4:
            raise UsageError("--sizes takes four integers X_f,X_t,Y_f,Y_t")
        out = parallel_or_sizes(parallel_or_fixture(), sizes)
        emit(args, {"f": out[0], "t": out[1]}, f"({out[0]},{out[1]})")
        return EXIT_OK
    P = _species(args.s)
    if op == "eval":
        G = P.source.base
        if args.presheaf:
            X = load_kind(args.presheaf, Presheaf, "presheaf")
        else:
            sizes = _int_list(args.set_size)
            if len(sizes) != G.n_objects or not G.is_discrete():
                raise UsageError("--set-size needs one size per object of a discrete base")
            X = set_presheaf(G, sizes)
        Y = species_eval(P, X)
        sizes = Y.sizes()
        total = int(sum(sizes))
        emit(args, {"total": total, "sizes": {io._obj_name(P.target, b): int(n) for b, n in enumerate(sizes)}},
             f"{total}" if P.target.n_objects == 1 else f"total {total}\n" + sizes_text(P.target, sizes))
        return EXIT_OK
    if op in ("free", "poly"):
        F = SetSpecies.from_species(P)
        if op == "free":
            ok = is_free_species(F)
            emit(args, {"free": ok}, "free" if ok else "not free")
            return EXIT_OK if ok else EXIT_FAIL
        r = polynomial_coefficients(F)
        if r:
            emit(args, {"polynomial": True, "coefficients": {str(n): c for n, c in r.coefficients.items()}},
                 "polynomial: " + " + ".join(f"{c}·X^{n}" for n, c in r.coefficients.items() if c) or "0")
            return EXIT_OK
        n, x, sigma = r.witness
        emit(args, {"polynomial": False, "witness": {"n": n, "element": x, "permutation": list(sigma)}},
             f"not polynomial: permutation {list(sigma)} fixes element {x} of F({n})")
        return EXIT_FAIL
    if op == "derive":
        D = derivative(P)
        emit(args, D, prof_text(D))
        return EXIT_OK
    if op in ("trace", "roundtrip"):
        r = trace_roundtrip(P, probes=args.probes)
        S = P.source
        if op == "trace":
            rows = {f"{io._obj_name(P.target, b)}|{io._obj_name(S, u)}": t for (b, u), (_, t) in sorted(r.sizes.items()) if t}
            emit(args, {"sizes": rows}, "\n".join(f"  {k}: {v}" for k, v in rows.items()) or "  (empty)")
            return EXIT_OK
        emit(args, {"ok": r.ok, "witness": None if r.ok else [str(x) for x in r.witness]},
             "roundtrip ok" if r.ok else f"roundtrip failed: {r.witness}")
        return EXIT_OK if r.ok else EXIT_FAIL
    raise UsageError(f"unknown species command {op}")


def cmd_laws(args):
    from .laws import run_laws
    if args.budget < 0:
        raise UsageError("--budget must be non-negative")
    rep = run_laws(args.suite, args.seed, args.budget)
    if args.json:
        sys.stdout.write(io.dumps(rep.to_dict(times=not args.omit_times)))
    else:
        print(rep.table())
    if not rep.ok:
        return EXIT_FAIL
    return EXIT_BUDGET if rep.any_budget else EXIT_OK


# ------------------------------------------------------------------ parser

def build_parser():
    from .laws import SUITES
    from .sym import DEFAULT_L
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--json", action="store_true", help="canonical JSON on stdout")

    p = argparse.ArgumentParser(prog="kitlab", description="Finite groupoids, kits and stable species.")
    sub = p.add_subparsers(dest="cmd", required=True)

    v = sub.add_parser("validate", parents=[common], help="parse and validate a JSON file")
    v.add_argument("path")
    v.set_defaults(fn=cmd_validate)

    k = sub.add_parser("kit", help="kit algebra")
    ks = k.add_subparsers(dest="kit_cmd", required=True)
    for name in ("orth", "dorth", "boolean"):
        x = ks.add_parser(name, parents=[common])
        x.add_argument("kit", nargs="+", help="kit file/fixture, or '<trivial|maximal> <groupoid>'")
    e = ks.add_parser("enumerate", parents=[common])
    e.add_argument("groupoid")
    e.add_argument("--boolean", action="store_true")
    c = ks.add_parser("connect", parents=[common])
    c.add_argument("connective", choices=["tensor", "par", "limp", "with", "plus", "bang", "whynot"])
    c.add_argument("kits", nargs="+", help="kit files/fixtures or trivial:<G> / maximal:<G>")
    c.add_argument("--length", type=int, default=DEFAULT_L, help="sequence bound for bang/whynot")
    k.set_defaults(fn=cmd_kit)

    pr = sub.add_parser("prof", help="profunctors and presheaves")
    ps = pr.add_subparsers(dest="prof_cmd", required=True)
    x = ps.add_parser("compose", parents=[common], help="Q∘P; either side may be 'id'")
    x.add_argument("p")
    x.add_argument("q")
    x = ps.add_parser("dual", parents=[common])
    x.add_argument("p")
    x = ps.add_parser("stabilized", parents=[common])
    x.add_argument("p")
    x.add_argument("ka")
    x.add_argument("kb")
    x = ps.add_parser("apply", parents=[common])
    x.add_argument("p")
    x.add_argument("x")
    x.add_argument("--kits", nargs=2, metavar=("KA", "KB"))
    x = ps.add_parser("symlift", parents=[common])
    x.add_argument("p")
    x.add_argument("--length", type=int, default=DEFAULT_L)
    pr.set_defaults(fn=cmd_prof)

    s = sub.add_parser("species", help="species and their traces")
    ss = s.add_subparsers(dest="species_cmd", required=True)
    x = ss.add_parser("eval", parents=[common])
    x.add_argument("s")
    g = x.add_mutually_exclusive_group(required=True)
    g.add_argument("--set-size", help="comma-separated sizes, one per base object")
    g.add_argument("--presheaf")
    for name in ("free", "poly", "derive"):
        x = ss.add_parser(name, parents=[common])
        x.add_argument("s")
    for name in ("trace", "roundtrip"):
        x = ss.add_parser(name, parents=[common])
        x.add_argument("s")
        x.add_argument("--probes", choices=["canonical", "full"], default="canonical")
    x = ss.add_parser("por", parents=[common])
    x.add_argument("--sizes", required=True, help="X_f,X_t,Y_f,Y_t")
    s.set_defaults(fn=cmd_species)

    la = sub.add_parser("laws", parents=[common], help="run the law suites")
    la.add_argument("--suite", choices=("all",) + SUITES, default="all")
    la.add_argument("--seed", type=int, default=0)
    la.add_argument("--budget", type=int, default=3, help="sequence-length bound for exponential laws")
    la.add_argument("--omit-times", action="store_true", help="drop wall times from --json output")
    la.set_defaults(fn=cmd_laws)
    return p


def main(argv=None):
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.fn(args)
    except UsageError as exc:
        print(f"kitlab: usage: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (BudgetExceeded, GroupTooLarge, ProbeBudgetExceeded) as exc:
        print(f"kitlab: budget exceeded: {exc}", file=sys.stderr)
        return EXIT_BUDGET
    except KitlabError as exc:
        print(f"kitlab: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_FAIL


if __name__ == "__main__":
    sys.exit(main())
