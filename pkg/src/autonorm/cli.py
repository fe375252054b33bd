"""Command-line interface: ``autonorm <group> <command> [options]``.

Exit status is 0 on success, 2 on invalid input and 3 when a numerical
result cannot be trusted.
"""

from __future__ import annotations

import argparse
import json
import sys
from dataclasses import dataclass
from typing import Callable

from . import gg as ggmod
from .flows import IntegrationError, MapSpecError, Trajectory, eggbeater, ode_flow, parse_map, shear_h, shear_v
from .qmorph import (
    BUILTIN_KLEIN_INVARIANT,
    HomogenizedQM,
    QuasimorphismSpecError,
    check_klein_invariance,
    defect_scan,
    homogenize,
    parse_qm,
    word_sampler,
)
from .winding import BasepointConfig, BraidRejected, braid_from_paths
from .words import NotPrimitiveError, WordSyntaxError, format_word, is_primitive, palindrome_factor, parse_word

EXIT_OK, EXIT_INVALID, EXIT_UNSOUND = 0, 2, 3


@dataclass
class Output:
    data: dict
    text: str
    status: int = EXIT_OK


def _num(x: float):
    """Integers print without a trailing .0."""
    x = float(x)
    return int(x) if x.is_integer() else x


def _seed(args) -> int:
    return ggmod.fresh_seed() if args.seed is None else args.seed


def _point(text: str) -> tuple[float, float]:
    try:
        x, y = (float(v) for v in text.split(","))
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected a point 'x,y', got {text!r}") from None
    return x, y


def _homog(spec: str):
    q = parse_qm(spec)
    return q if isinstance(q, HomogenizedQM) else HomogenizedQM(q)


# qm -------------------------------------------------------------------------------


def cmd_qm_eval(args) -> Output:
    q, w = parse_qm(args.qm), parse_word(args.word)
    v = _num(q(w))
    return Output({"qm": q.spec, "word": format_word(w), "value": v}, str(v))


def cmd_qm_homogenize(args) -> Output:
    q, w = parse_qm(args.qm), parse_word(args.word)
    r = homogenize(q, w, args.n_max, args.tol)
    d = {"qm": q.spec, "word": format_word(w), **r.to_json(), "value": _num(r.value)}
    text = f"{_num(r.value)} exact" if r.exact else f"{r.value!r} approximate (residual {r.residual:g}, n={r.n_used})"
    return Output(d, text)


def cmd_qm_defect(args) -> Output:
    q = parse_qm(args.qm)
    seed = _seed(args)
    worst = defect_scan(q, word_sampler(seed, args.mean_length, args.max_length), args.trials, seed)
    ok = worst <= q.defect
    d = {"qm": q.spec, "trials": args.trials, "observed": _num(worst), "bound": _num(q.defect), "within_bound": ok, "seed": seed}
    text = f"observed defect {_num(worst)} (bound {_num(q.defect)}) seed={seed}"
    return Output(d, text, EXIT_OK if ok else EXIT_UNSOUND)


def cmd_qm_invariance(args) -> Output:
    q = parse_qm(args.qm)
    seed = _seed(args)
    rep = check_klein_invariance(q, word_sampler(seed, args.mean_length, args.max_length), args.trials)
    d = {
        "qm": q.spec,
        "trials": args.trials,
        "invariant": rep.invariant,
        "per_element": rep.per_element,
        "counterexample": None if rep.counterexample is None else format_word(rep.counterexample),
        "seed": seed,
    }
    lines = [f"{g}: {'invariant' if ok else 'not invariant'}" for g, ok in rep.per_element.items()]
    if rep.counterexample is not None:
        lines.append(f"counterexample: {format_word(rep.counterexample)}")
    lines.append(f"seed={seed}")
    return Output(d, "\n".join(lines))


# words ----------------------------------------------------------------------------


def cmd_words_factor(args) -> Output:
    w = parse_word(args.word)
    u, v = palindrome_factor(w)
    d = {"word": format_word(w), "u": format_word(u), "v": format_word(v)}
    return Output(d, f"u = {format_word(u) or '1'}\nv = {format_word(v) or '1'}")


def cmd_words_primitive(args) -> Output:
    w = parse_word(args.word)
    ok, moves = is_primitive(w)
    names = None if moves is None else [m.kind + ("^-1" if m.inverse else "") for m in moves]
    d = {"word": format_word(w), "primitive": ok, "moves": names}
    text = "primitive" if ok else "not primitive"
    if ok:
        text += "\nmoves: " + (" ".join(names) if names else "(none)")
    return Output(d, text)


# braid ----------------------------------------------------------------------------


def cmd_braid_from_csv(args) -> Output:
    tx, ty = Trajectory.from_csv(args.x_csv), Trajectory.from_csv(args.y_csv)
    bp = BasepointConfig(args.z1, args.z2, args.delta)
    b = braid_from_paths(tx, ty, bp)
    return Output(b.to_json(), json.dumps(b.to_json()))


# gg -------------------------------------------------------------------------------


def _gg_config(args, seed: int, samples: int | None = None) -> ggmod.GGConfig:
    return ggmod.GGConfig(
        samples=samples or args.samples,
        seed=seed,
        delta=args.delta,
        eta=args.eta,
        power=args.power,
        nonfixed_cap=args.nonfixed_cap,
    )


def cmd_gg_estimate(args) -> Output:
    q, m = _homog(args.qm), parse_map(args.map)
    seed = _seed(args)
    e = ggmod.gg_estimate(q, m, _gg_config(args, seed), threads=args.threads)
    d = e.to_json()
    return Output(d, json.dumps(d, sort_keys=True))


def _autonomous_maps(args) -> dict[str, object]:
    if args.map:
        return {spec: parse_map(spec) for spec in args.map}
    return {
        f"shear-v:{args.s}:{args.eps}": shear_v(args.s, args.eps),
        f"shear-h:{args.s}:{args.eps}": shear_h(args.s, args.eps),
        "ode:cellular": ode_flow("cellular"),
    }


def cmd_gg_autonomous(args) -> Output:
    qs = [parse_qm(s) for s in (args.qm or BUILTIN_KLEIN_INVARIANT)]
    qs = [q if isinstance(q, HomogenizedQM) else HomogenizedQM(q) for q in qs]
    seed = _seed(args)
    rows, lines, ok_all = [], [], True
    for name, m in _autonomous_maps(args).items():
        for q, e in zip(qs, ggmod.gg_estimate_many(qs, m, _gg_config(args, seed), threads=args.threads)):
            tol = 3 * e.stderr + 10 * args.eps
            ok = abs(e.value) <= tol
            ok_all &= ok
            rows.append({"map": name, "qm": q.spec, **e.to_json(), "tolerance": tol, "pass": ok})
            lines.append(f"{'PASS' if ok else 'FAIL'} {name} {q.spec} value={e.value:.6g} stderr={e.stderr:.3g} mode={e.mode}")
    lines.append(f"seed={seed}")
    return Output({"seed": seed, "results": rows, "pass": ok_all}, "\n".join(lines), EXIT_OK if ok_all else EXIT_UNSOUND)


def cmd_gg_oracle(args) -> Output:
    q = _homog(args.qm)
    r = ggmod.region_oracle(parse_word(args.word), args.s, q)
    d = r.to_json()
    lines = [f"{k}: {v:.6g}" for k, v in d["regions"].items() if v]
    lines.append(f"total: {r.total!r}")
    return Output(d, "\n".join(lines))


# norm and demo ----------------------------------------------------------------------


def cmd_norm_lower_bound(args) -> Output:
    b = ggmod.aut_norm_lower_bound(args.psi, args.defect)
    return Output({"psi": args.psi, "defect": args.defect, "lower_bound": b}, str(b))


def cmd_demo_eggbeater(args) -> Output:
    q = _homog(args.qm)
    word = parse_word(args.word)
    g = eggbeater(word, args.s, args.eps)
    seed = _seed(args)
    cfg = ggmod.GGConfig(samples=args.samples, seed=seed)
    oracle = ggmod.region_oracle(word, args.s, q)
    rows = []
    lines = [
        f"eggbeater {format_word(word)} (s={args.s}, eps={args.eps}), quasimorphism {q.spec}, defect bound {_num(q.defect)}",
        f"region oracle for k=1: {oracle.total:.6g}",
        f"{'k':>4} {'estimate':>12} {'stderr':>10} {'nonfixed':>9} {'norm >=':>8}",
    ]
    for k in range(1, args.K + 1):
        e = ggmod.gg_estimate(q, g.power(k), cfg, threads=args.threads)
        b = ggmod.aut_norm_lower_bound(e.value, q.defect)
        rows.append({"k": k, **e.to_json(), "lower_bound": b})
        lines.append(f"{k:>4} {e.value:>12.6g} {e.stderr:>10.3g} {e.samples_nonfixed:>9} {b:>8}")
    lines.append(f"seed={seed}")
    d = {"word": format_word(word), "s": args.s, "eps": args.eps, "qm": q.spec, "defect": q.defect, "oracle": oracle.total, "seed": seed, "rows": rows}
    return Output(d, "\n".join(lines))


# parser ---------------------------------------------------------------------------


def _add_common(p: argparse.ArgumentParser, seed: bool = False) -> None:
    p.add_argument("--format", choices=("text", "json"), default="text")
    p.add_argument("--output", "-o", help="write the result here instead of stdout")
    if seed:
        p.add_argument("--seed", type=int, help="random seed (drawn from entropy and echoed when omitted)")


def _add_sampling(p: argparse.ArgumentParser) -> None:
    p.add_argument("--trials", type=int, default=1000)
    p.add_argument("--mean-length", type=float, default=20.0)
    p.add_argument("--max-length", type=int, default=200)


def _add_gg(p: argparse.ArgumentParser, samples: int) -> None:
    p.add_argument("--samples", "-N", type=int, default=samples)
    p.add_argument("--power", type=int, help="direct_power mode with this power (default: shortcut for shear words)")
    p.add_argument("--delta", type=float, default=1e-6)
    p.add_argument("--eta", type=float, default=1e-9)
    p.add_argument("--nonfixed-cap", type=float, default=0.05)
    p.add_argument("--threads", type=int, help=f"worker threads (default ${ggmod.THREADS_ENV} or 1)")


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="autonorm", description="Quasimorphisms on F2, torus braids and Gambaudo-Ghys estimates.")
    groups = ap.add_subparsers(dest="group", required=True)

    def command(group, name: str, fn: Callable, help: str, seed: bool = False):
        p = group.add_parser(name, help=help)
        _add_common(p, seed)
        p.set_defaults(fn=fn)
        return p

    qm = groups.add_parser("qm", help="quasimorphisms on F2").add_subparsers(dest="cmd", required=True)
    p = command(qm, "eval", cmd_qm_eval, "evaluate a quasimorphism on a word")
    p.add_argument("--qm", required=True)
    p.add_argument("--word", required=True)
    p = command(qm, "homogenize", cmd_qm_homogenize, "homogenization by eventual-affine detection")
    p.add_argument("--qm", required=True)
    p.add_argument("--word", required=True)
    p.add_argument("--n-max", type=int, default=32)
    p.add_argument("--tol", type=float, default=0.0)
    p = command(qm, "defect", cmd_qm_defect, "empirical defect on random pairs", seed=True)
    p.add_argument("--qm", required=True)
    _add_sampling(p)
    p = command(qm, "invariance", cmd_qm_invariance, "Klein-group invariance on random words", seed=True)
    p.add_argument("--qm", required=True)
    _add_sampling(p)

    words = groups.add_parser("words", help="words in F2").add_subparsers(dest="cmd", required=True)
    p = command(words, "factor-palindromes", cmd_words_factor, "write a primitive element as two palindromes")
    p.add_argument("--word", required=True)
    p = command(words, "primitive", cmd_words_primitive, "decide primitivity")
    p.add_argument("--word", required=True)

    braid = groups.add_parser("braid", help="pure braids on the torus").add_subparsers(dest="cmd", required=True)
    p = command(braid, "from-csv", cmd_braid_from_csv, "braid of two trajectory CSV files (t,x,y)")
    p.add_argument("x_csv")
    p.add_argument("y_csv")
    p.add_argument("--z1", type=_point, default=(0.25, 0.75))
    p.add_argument("--z2", type=_point, default=(0.75, 0.25))
    p.add_argument("--delta", type=float, default=1e-6)

    gg = groups.add_parser("gg", help="Gambaudo-Ghys estimates").add_subparsers(dest="cmd", required=True)
    p = command(gg, "estimate", cmd_gg_estimate, "Monte Carlo estimate on a map", seed=True)
    p.add_argument("--qm", required=True, help="homogenized automatically when needed")
    p.add_argument("--map", required=True)
    _add_gg(p, 100_000)
    p = command(gg, "autonomous-check", cmd_gg_autonomous, "vanishing on autonomous maps", seed=True)
    p.add_argument("--qm", action="append", help="repeatable; default: the built-in Klein-invariant ones")
    p.add_argument("--map", action="append", help="repeatable; default: shear-v, shear-h and ode:cellular")
    p.add_argument("--s", type=float, default=0.1)
    p.add_argument("--eps", type=float, default=5e-5)
    _add_gg(p, 50_000)
    p = command(gg, "oracle", cmd_gg_oracle, "region oracle for an eggbeater")
    p.add_argument("--word", default="a^4 b^3 a^2 b")
    p.add_argument("--s", type=float, default=0.1)
    p.add_argument("--qm", default="cm:2")

    norm = groups.add_parser("norm", help="autonomous norm").add_subparsers(dest="cmd", required=True)
    p = command(norm, "lower-bound", cmd_norm_lower_bound, "floor(|psi|/defect) + 1, or 0")
    p.add_argument("--psi", type=float, required=True)
    p.add_argument("--defect", type=float, required=True)

    demo = groups.add_parser("demo", help="end-to-end runs").add_subparsers(dest="cmd", required=True)
    p = command(demo, "eggbeater", cmd_demo_eggbeater, "estimate on eggbeater powers and norm bounds", seed=True)
    p.add_argument("--word", default="a^4 b^3 a^2 b")
    p.add_argument("--s", type=float, default=0.1)
    p.add_argument("--eps", type=float, default=5e-5)
    p.add_argument("--qm", default="cm:2")
    p.add_argument("--samples", "-N", type=int, default=100_000)
    p.add_argument("--K", type=int, default=5)
    p.add_argument("--threads", type=int)
    return ap


_INVALID = (WordSyntaxError, QuasimorphismSpecError, MapSpecError, NotPrimitiveError, ValueError, OSError)
_UNSOUND = (ggmod.GGSoundnessError, BraidRejected, IntegrationError)


def run(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        out = args.fn(args)
    except _UNSOUND as exc:
        print(f"autonorm: numerical failure: {exc}", file=sys.stderr)
        return EXIT_UNSOUND
    except FileNotFoundError as exc:
        print(f"autonorm: missing file: {exc.filename}", file=sys.stderr)
        return EXIT_INVALID
    except _INVALID as exc:
        print(f"autonorm: invalid input: {exc}", file=sys.stderr)
        return EXIT_INVALID
    body = json.dumps(out.data, sort_keys=True) if args.format == "json" else out.text
    if args.output:
        try:
            with open(args.output, "w") as fh:
                fh.write(body + "\n")
        except OSError as exc:
            print(f"autonorm: cannot write {args.output}: {exc}", file=sys.stderr)
            return EXIT_INVALID
    else:
        print(body)
    return out.status


def main() -> None:
    sys.exit(run())


if __name__ == "__main__":
    main()
