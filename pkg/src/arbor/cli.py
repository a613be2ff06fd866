"""Command-line entry point.

Exit codes: 0 success, 1 usage or parse error, 2 capacity, 3 internal
consistency failure.
"""

from __future__ import annotations

import argparse
import sys
from typing import Sequence

from . import perm as P
from .config import DEFAULT_LIMITS, Limits
from .errors import ArborError, CapacityError, InvalidInputError
from .families import FAMILY_NAMES, FamilySpec
from .quotients import (
    chain_report,
    discriminant_tower,
    fingerprint,
    level_quotient,
    stability_probe,
    stabilizer,
)
from .recursion import (
    RecursionSystem,
    apply,
    parse_system,
    portrait_dot,
    portrait_of,
    render_portrait,
    section,
)
from .tree import EventuallyPeriodicPath, parse_path, parse_word, render_word
from . import wildness as W


class UsageError(ArborError):
    exit_code = 1


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(message)


# ---------------------------------------------------------------- plumbing


def _bound(text: str) -> int:
    """A positive integer, also written exactly as 1e100 or 10^100."""
    t = text.strip().lower()
    try:
        if "^" in t:
            base, exp = t.split("^", 1)
            value = int(base) ** int(exp)
        elif "e" in t:
            mant, exp = t.split("e", 1)
            value = int(mant) * 10 ** int(exp)
        else:
            value = int(t)
    except ValueError:
        raise argparse.ArgumentTypeError(f"not an integer bound: {text!r}") from None
    if value < 1:
        raise argparse.ArgumentTypeError(f"bound must be positive: {text!r}")
    return value


def _add_globals(p: argparse.ArgumentParser, suppress: bool) -> None:
    d = argparse.SUPPRESS if suppress else None
    p.add_argument("--max-depth", type=int, default=d, help="deepest level any computation may touch")
    p.add_argument("--max-order", type=_bound, default=d, help="largest group order the stabilizer chain may reach (e.g. 10^100)")
    p.add_argument("--max-points", type=_bound, default=d, help="widest level a quotient may act on")
    p.add_argument("--format", choices=["table", "kv", "dot"], default=d)
    p.add_argument("--basepoint", default=d, help="eventually periodic path such as 0* or 1(01)*")


def _add_system(p: argparse.ArgumentParser) -> None:
    p.add_argument("--system", metavar="FILE", help="recursion-system file, - for stdin")
    p.add_argument("--family", choices=FAMILY_NAMES)
    _add_family_params(p)


def _add_family_params(p: argparse.ArgumentParser) -> None:
    p.add_argument("--d", type=int)
    p.add_argument("--r", type=int)
    p.add_argument("--s", type=int)
    p.add_argument("--rexp", type=int)


def _limits(a) -> Limits:
    for name in ("max_depth", "max_order", "max_points"):
        v = getattr(a, name, None)
        if v is not None and v < 1:
            raise UsageError(f"--{name.replace('_', '-')} must be positive")
    return DEFAULT_LIMITS.with_(max_depth=a.max_depth, max_order=a.max_order, max_points=a.max_points)


def _system(a) -> RecursionSystem:
    if (a.system is None) == (a.family is None):
        raise UsageError("give exactly one of --system FILE or --family NAME")
    if a.system is not None:
        if a.system == "-":
            return parse_system(sys.stdin.read())
        try:
            with open(a.system, encoding="utf-8") as fh:
                return parse_system(fh.read())
        except OSError as exc:
            raise UsageError(f"cannot read {a.system}: {exc.strerror}") from None
    return FamilySpec(a.family, a.d, a.r, a.s, a.rexp).build()


def _basepoint(a, s: RecursionSystem) -> EventuallyPeriodicPath:
    if a.basepoint is None:
        return s.basepoint
    return parse_path(a.basepoint).check(s.index)


def _gens(a, s: RecursionSystem):
    if not getattr(a, "gens", None):
        return None
    return [s.element(w.strip()) for w in a.gens.split(",")]


def _positive(a, *names):
    for n in names:
        if getattr(a, n) < 1:
            raise UsageError(f"--{n} must be positive")


def _table(headers: list[str], rows: list[list]) -> str:
    cells = [headers] + [[str(c) for c in r] for r in rows]
    widths = [max(len(r[i]) for r in cells) for i in range(len(headers))]
    lines = ["  ".join(c.ljust(w) for c, w in zip(r, widths)).rstrip() for r in cells]
    return "\n".join(lines) + "\n"


def _kv(pairs: list[tuple[str, object]]) -> str:
    return " ".join(f"{k}={_kv_value(v)}" for k, v in pairs)


def _kv_value(v) -> str:
    s = str(v)
    return s.replace(" ", "")


def _bounds(lim: Limits, **extra) -> str:
    parts = [f"{k.replace('_', '-')}={v}" for k, v in extra.items()]
    parts += [f"max-depth={lim.max_depth}", f"max-points={lim.max_points}", f"max-order={lim.max_order}"]
    return "# bounds: " + " ".join(parts)


def _no_dot(a, cmd: str) -> None:
    if a.format == "dot":
        raise UsageError(f"{cmd} has no DOT output")


# ---------------------------------------------------------------- commands


def cmd_apply(a, out) -> int:
    s = _system(a)
    lim = _limits(a)
    e = s.element(a.element)
    out.write((render_word(apply(e, parse_word(a.vertex), lim)) or "e") + "\n")
    return 0


def cmd_section(a, out) -> int:
    s = _system(a)
    lim = _limits(a)
    e = s.element(a.element)
    out.write(str(section(e, parse_word(a.vertex), lim)) + "\n")
    return 0


def cmd_portrait(a, out) -> int:
    s = _system(a)
    lim = _limits(a)
    _positive(a, "depth")
    if a.depth > lim.max_depth:
        raise CapacityError(f"depth {a.depth} exceeds max depth {lim.max_depth}")
    p = portrait_of(s.element(a.element), a.depth, lim)
    if a.format == "dot":
        out.write(portrait_dot(p))
    else:
        out.write(f"# portrait of {a.element} to depth {a.depth}\n")
        out.write(render_portrait(p))
    return 0


def cmd_quotient(a, out) -> int:
    _no_dot(a, "quotient")
    s = _system(a)
    lim = _limits(a)
    _positive(a, "level")
    q = level_quotient(s, _gens(a, s), a.level, lim)
    fp = fingerprint(q.group(), lim, strict=False)
    bp = _basepoint(a, s)
    st = stabilizer(q, bp.truncate(a.level))
    out.write(_bounds(lim, level=a.level) + "\n")
    if a.format == "kv":
        out.write("# quotient\n")
        out.write(_kv([("n", a.level), ("width", q.width), ("order", q.order()), ("stabilizer", st.order), ("fingerprint", fp.render())]) + "\n")
        for name, p in zip(q.gens, q.perms):
            out.write(_kv([("gen", name), ("perm", P.format_perm(tuple(int(x) for x in p)))]) + "\n")
    else:
        out.write(_table(["level", "width", "order", "stabilizer", "fingerprint"], [[a.level, q.width, q.order(), st.order, fp.render()]]))
        out.write(_table(["generator", "permutation"], [[n, P.format_perm(tuple(int(x) for x in p))] for n, p in zip(q.gens, q.perms)]))
    return 0


def cmd_chain(a, out) -> int:
    _no_dot(a, "chain")
    s = _system(a)
    lim = _limits(a)
    _positive(a, "levels")
    bp = _basepoint(a, s)
    rows = chain_report(s, _gens(a, s), bp, a.levels, lim)
    out.write(_bounds(lim, levels=f"1..{a.levels}", basepoint=bp.render()) + "\n")
    if a.format == "kv":
        out.write("# chain\n")
        for r in rows:
            out.write(_kv([("n", r.n), ("index", r.index), ("quotient", r.quotient_order), ("stabilizer", r.stabilizer_order)]) + "\n")
    else:
        out.write(_table(["n", "|G:G_n|", "|G/C_n|", "|G_n/C_n|"], [[r.n, r.index, r.quotient_order, r.stabilizer_order] for r in rows]))
    return 0


def _tower(a, s, lim):
    if a.M < 0 or a.N < 1 or a.M > a.N:
        raise UsageError("need 0 <= M <= N and N >= 1")
    bp = _basepoint(a, s)
    return bp, discriminant_tower(s, _gens(a, s), bp, a.M, a.N, lim)


def _write_tower(a, out, t) -> None:
    if a.format == "kv":
        out.write("# levels\n")
        for (m, n), lev in sorted(t.levels.items()):
            out.write(_kv([("m", m), ("n", n), ("orbit", len(lev.orbit)), ("order", lev.order), ("fingerprint", lev.fingerprint.render())]) + "\n")
        out.write("# maps\n")
        for r in t.row_maps + t.column_maps:
            out.write(_kv([("kind", r.kind), ("source", f"{r.source[0]},{r.source[1]}"), ("target", f"{r.target[0]},{r.target[1]}"), ("image", r.image_order), ("kernel", r.kernel_order), ("injective", int(r.injective)), ("surjective", int(r.surjective))]) + "\n")
        return
    out.write(_table(["m", "n", "orbit", "order", "fingerprint"], [[m, n, len(l.orbit), l.order, l.fingerprint.render()] for (m, n), l in sorted(t.levels.items())]))
    maps = t.row_maps + t.column_maps
    if maps:
        out.write(_table(["map", "source", "target", "image", "kernel", "injective", "surjective"], [[r.kind, f"D({r.source[0]},{r.source[1]})", f"D({r.target[0]},{r.target[1]})", r.image_order, r.kernel_order, "yes" if r.injective else "no", "yes" if r.surjective else "no"] for r in maps]))


def cmd_discriminant(a, out) -> int:
    _no_dot(a, "discriminant")
    s = _system(a)
    lim = _limits(a)
    bp, t = _tower(a, s, lim)
    out.write(_bounds(lim, window=f"{a.M}..{a.N}", basepoint=bp.render()) + "\n")
    _write_tower(a, out, t)
    return 0


def cmd_classify(a, out) -> int:
    _no_dot(a, "classify")
    s = _system(a)
    lim = _limits(a)
    bp, t = _tower(a, s, lim)
    v = stability_probe(t, a.burn_in)
    out.write(_bounds(lim, window=f"{a.M}..{a.N}", basepoint=bp.render(), burn_in=a.burn_in) + "\n")
    out.write("# finite-depth evidence only\n")
    _write_tower(a, out, t)
    for note in v.notes:
        out.write(f"# {note}\n")
    out.write(v.line() + "\n")
    if v.fingerprint is not None:
        out.write(f"fingerprint={v.fingerprint.render()}\n")
    return 0


def _emit_certificate(out, cert, lim) -> int:
    out.write(W.dump_certificate(cert))
    rep = W.check_certificate(cert, lim)
    depth = cert.check_depth if isinstance(cert, W.LqaWitness) else cert.depth
    out.write(f"# replay={'pass' if rep.ok else 'fail'} depth={depth}\n")
    return 0 if rep.ok else 1


def cmd_witness(a, out) -> int:
    lim = _limits(a)
    if a.kind == "periodic":
        w = W.periodic_witness(a.r, a.n, a.depth, lim)
        return _emit_certificate(out, w, lim)
    if a.kind == "nonhausdorff":
        if a.family != "preperiodic":
            raise UsageError("nonhausdorff certificates are built for --family preperiodic")
        cert = W.preperiodic_certificate(a.r, a.s, a.gen, a.depth, lim)
        return _emit_certificate(out, cert, lim)
    try:
        with open(a.file, encoding="utf-8") as fh:
            text = fh.read()
    except OSError as exc:
        raise UsageError(f"cannot read {a.file}: {exc.strerror}") from None
    cert = W.load_certificate(text)
    rep = W.check_certificate(cert, lim)
    for f in rep.failures:
        out.write(f"# {f}\n")
    out.write(f"check={'pass' if rep.ok else 'fail'}\n")
    return 0 if rep.ok else 1


def cmd_build_nh(a, out) -> int:
    lim = _limits(a)
    index = W.parse_index(a.index)
    g, cert = W.theorem4_builder(index, lambda n: P.parse_perm(a.perm, index.entry(n)), a.depth, lim)
    if a.format == "dot":
        out.write(portrait_dot(g, "builder"))
        return 0
    return _emit_certificate(out, cert, lim)


def cmd_family(a, out) -> int:
    s = FamilySpec(a.name, a.d, a.r, a.s, a.rexp).build()
    if a.emit:
        out.write(s.emit())
        return 0
    out.write(f"# family {a.name}\n")
    out.write(_table(["generator", "perm"] + [f"|_{x}" for x in range(s.arity)], [[n, P.format_perm(s.perms[2 * i])] + [s.render_word(s.sections[2 * i][x]) for x in range(s.arity)] for i, n in enumerate(s.names)]))
    return 0


# ---------------------------------------------------------------- parser


def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="arbor", description="Self-similar tree actions: evaluation, quotients and wildness certificates.")
    _add_globals(p, suppress=False)
    sub = p.add_subparsers(dest="cmd", parser_class=_Parser, required=True)

    def add(name, func, help_):
        sp = sub.add_parser(name, help=help_)
        _add_globals(sp, suppress=True)
        sp.set_defaults(func=func)
        return sp

    for name, func, help_ in (("apply", cmd_apply, "image of a vertex"), ("section", cmd_section, "section at a vertex")):
        sp = add(name, func, help_)
        _add_system(sp)
        sp.add_argument("-e", "--element", required=True)
        sp.add_argument("-v", "--vertex", required=True)

    sp = add("portrait", cmd_portrait, "portrait to a depth")
    _add_system(sp)
    sp.add_argument("-e", "--element", required=True)
    sp.add_argument("--depth", type=int, required=True)

    sp = add("quotient", cmd_quotient, "level quotient G/C_n")
    _add_system(sp)
    sp.add_argument("-n", "--level", type=int, required=True)
    sp.add_argument("--gens", help="comma-separated generator words")

    sp = add("chain", cmd_chain, "chain table up to a level")
    _add_system(sp)
    sp.add_argument("-N", "--levels", type=int, required=True)
    sp.add_argument("--gens")

    for name, func, help_ in (("discriminant", cmd_discriminant, "discriminant tower"), ("classify", cmd_classify, "tower plus stability verdict")):
        sp = add(name, func, help_)
        _add_system(sp)
        sp.add_argument("-M", type=int, default=2)
        sp.add_argument("-N", type=int, default=6)
        sp.add_argument("--gens")
        if name == "classify":
            sp.add_argument("--burn-in", type=int, default=2)

    sp = add("witness", cmd_witness, "build or check certificates")
    wsub = sp.add_subparsers(dest="kind", parser_class=_Parser, required=True)
    wp = wsub.add_parser("periodic")
    _add_globals(wp, suppress=True)
    wp.add_argument("--r", type=int, required=True)
    wp.add_argument("--n", type=int, required=True)
    wp.add_argument("--depth", type=int)
    wn = wsub.add_parser("nonhausdorff")
    _add_globals(wn, suppress=True)
    wn.add_argument("--family", required=True)
    wn.add_argument("--r", type=int, required=True)
    wn.add_argument("--s", type=int, required=True)
    wn.add_argument("--gen")
    wn.add_argument("--depth", type=int, default=10)
    wc = wsub.add_parser("check")
    _add_globals(wc, suppress=True)
    wc.add_argument("file")

    sp = add("build-nh", cmd_build_nh, "wreath-product non-Hausdorff builder")
    sp.add_argument("--index", required=True, help='"3" or "2 | 3 2"')
    sp.add_argument("--perm", required=True, help="cycles such as (0 1 2)")
    sp.add_argument("--depth", type=int, required=True)

    sp = add("family", cmd_family, "show or emit a built-in family")
    sp.add_argument("name", choices=FAMILY_NAMES)
    _add_family_params(sp)
    sp.add_argument("--emit", action="store_true")
    return p


def main(argv: Sequence[str] | None = None, out=None) -> int:
    out = out or sys.stdout
    try:
        a = build_parser().parse_args(argv)
        if a.format is None:
            a.format = "table"
        return a.func(a, out)
    except ArborError as exc:
        sys.stderr.write(f"error: {exc}\n")
        return exc.exit_code
    except RecursionError:
        sys.stderr.write("error: recursion depth exhausted\n")
        return CapacityError.exit_code
    except MemoryError:
        sys.stderr.write("error: out of memory\n")
        return CapacityError.exit_code


if __name__ == "__main__":
    sys.exit(main())
