"""Command-line interface: ``gwords <command> ...``.

Every command prints one JSON report. Exit status: 0 success, 1 when the
mathematics says no (a suite fails, an asserted positivity is refuted, no
witness is found), 2 for usage errors (bad syntax, unreadable or invalid
input files).
"""
from __future__ import annotations

import argparse
import hashlib
import json
import sys
from importlib import resources
from pathlib import Path

from . import __version__
from .certify import check_certificate, sturm_decide
from .constructions import HIJO_WORD
from .errors import GWordsError, SweepExhausted
from .linalg_core import RationalMatrix, Spectrum, sym_matrix
from .matfile import matrix_from_dict
from .projections import OrthoProjection, halmos_form
from .reduction import Status, applicable_cancellations, classify, reduced_class
from .search import SearchConfig, epsilon_sweep, hijo_witness, random_search, thfour_witness
from .suites import SUITES, run_suite
from .words import Verdict, canonicalize, evaluate, format_word

EXIT_OK, EXIT_MATH, EXIT_USAGE = 0, 1, 2


class UsageError(Exception):
    pass


def _spectrum(spec: Spectrum) -> list:
    return [[float(z.real), float(z.imag)] for z in spec]


def bundled_matrix_path(name: str) -> Path:
    return Path(str(resources.files("gwords") / "data" / name))


def _load(path: str) -> tuple:
    """Matrix and raw document from a matrix file; ``eq2-A`` / ``eq2-B`` name the bundled pair."""
    bundled = {"eq2-A": "eq2_A.json", "eq2-B": "eq2_B.json"}
    p = bundled_matrix_path(bundled[path]) if path in bundled else Path(path)
    try:
        doc = json.loads(p.read_text())
        return matrix_from_dict(doc), doc
    except (OSError, json.JSONDecodeError, KeyError, ValueError, TypeError) as exc:
        raise UsageError(f"cannot read matrix file {path}: {exc}") from exc


def _digest(obj) -> str:
    return hashlib.sha256(json.dumps(obj, sort_keys=True).encode()).hexdigest()


def _report(command: str, inputs: dict, results, seed=None) -> dict:
    return {
        "command": command,
        "inputs": inputs,
        "inputs_digest": _digest(inputs),
        "tool_version": __version__,
        "seed": seed,
        "results": results,
    }


# ---------------------------------------------------------------------------
# commands; each returns (report, exit status)
# ---------------------------------------------------------------------------

def cmd_reduce(word: str, beta_cyclic: bool = False) -> tuple:
    seq = canonicalize(word)
    red = reduced_class(seq, beta_cyclic)
    results = {
        "sequence": format_word(seq),
        "N": seq.N,
        "sign_pattern": seq.sign_pattern(),
        "applicable": [[r.value, j] for r, j in applicable_cancellations(seq, beta_cyclic)],
        "trace": [{"rule": s.rule.value, "j": s.j, "after": format_word(s.after) if s.after.N else ""}
                  for s in red.trace.steps],
        "terminal": format_word(red.trace.terminal) if red.trace.terminal.N else "",
        "reachable": sorted(red.reachable),
        "m": red.m,
        "beta_cyclic": beta_cyclic,
    }
    return _report("reduce", {"word": word, "beta_cyclic": beta_cyclic}, results), EXIT_OK


def cmd_classify(word: str, beta_cyclic: bool = False) -> tuple:
    c = classify(canonicalize(word), beta_cyclic)
    return _report("classify", {"word": word, "beta_cyclic": beta_cyclic}, c.to_dict()), EXIT_OK


def cmd_eval(word: str, a_file: str, b_file: str, exact: bool = False,
             assert_positive: bool = False) -> tuple:
    seq = canonicalize(word)
    A, docA = _load(a_file)
    B, docB = _load(b_file)
    inputs = {"word": word, "A": docA, "B": docB, "exact": exact}
    Af = A.to_float() if isinstance(A, RationalMatrix) else sym_matrix(A)
    Bf = B.to_float() if isinstance(B, RationalMatrix) else sym_matrix(B)
    r = evaluate(seq, Af, Bf)
    results = {"sequence": format_word(seq), "spectrum": _spectrum(r.spectrum),
               "numeric_verdict": str(r.verdict), "reason": r.verdict.reason}
    verdict = r.verdict.kind
    if exact:
        Ar = A if isinstance(A, RationalMatrix) else RationalMatrix.from_float(A)
        Br = B if isinstance(B, RationalMatrix) else RationalMatrix.from_float(B)
        if not seq.integer:
            raise UsageError("--exact needs integer exponents")
        cert = sturm_decide(seq, Ar, Br)
        verdict = Verdict.NOT_ALL_POSITIVE if cert.refutes else Verdict.ALL_POSITIVE
        results["certificate"] = cert.to_dict()
        results["certificate_checked"] = check_certificate(results["certificate"])
    results["verdict"] = verdict.value
    status = EXIT_MATH if assert_positive and verdict is not Verdict.ALL_POSITIVE else EXIT_OK
    return _report("eval", inputs, results), status


def cmd_witness(word: str | None, recipe: str = "auto", seed: int = 0, n: int = 3,
                trials: int = 10000) -> tuple:
    inputs = {"word": word, "recipe": recipe, "seed": seed, "n": n, "trials": trials}
    if recipe == "hijo-eq2":
        w = hijo_witness()
    elif recipe == "thfour":
        w = thfour_witness()
    else:
        if word is None:
            raise UsageError(f"recipe {recipe!r} needs a word")
        seq = canonicalize(word)
        cls = classify(seq)
        if recipe == "epsilon" or (recipe == "auto" and cls.verdict is Status.PROVABLY_BAD):
            try:
                w = epsilon_sweep(seq)
            except SweepExhausted as exc:
                return _report("witness", inputs, {"witness": None, "finding": str(exc)}, seed), EXIT_MATH
        elif recipe == "auto" and seq == canonicalize(HIJO_WORD) and n == 3:
            w = hijo_witness()
        else:
            res = random_search(seq, SearchConfig(n=n, trials=trials, seed=seed))
            w = res.witness
            if w is None:
                return _report("witness", inputs, res.payload(), seed), EXIT_MATH
    return _report("witness", inputs, {"witness": w.to_dict()}, seed), EXIT_OK


def cmd_search(word: str, n: int = 2, trials: int = 1000, seed: int = 0, refine: bool = False,
               threads: int = 1, lam_min: float = 1e-2, lam_max: float = 1e2) -> tuple:
    cfg = SearchConfig(n=n, trials=trials, seed=seed, refine=refine, workers=threads,
                       lam_min=lam_min, lam_max=lam_max)
    res = random_search(canonicalize(word), cfg)
    inputs = {"word": word, **cfg.echo()}
    rep = _report("search", inputs, res.payload(), seed)
    rep["timing"] = {"wall_time_s": res.wall_time}
    return rep, EXIT_OK


def cmd_verify(suite: str, seed: int = 0) -> tuple:
    names = sorted(SUITES) if suite == "all" else [suite]
    results, ok, timing = [], True, {}
    for name in names:
        kwargs = {} if name in ("identities", "hijo-eq2") else {"seed": seed}
        r = run_suite(name, **kwargs)
        results.append(r.to_dict())
        timing[name] = r.wall_time
        ok &= r.passed
    rep = _report("verify", {"suite": suite, "seed": seed}, results, seed)
    rep["timing"] = timing
    return rep, EXIT_OK if ok else EXIT_MATH


def cmd_halmos(p_file: str, q_file: str) -> tuple:
    P, docP = _load(p_file)
    Q, docQ = _load(q_file)
    Pf = P.to_float() if isinstance(P, RationalMatrix) else P
    Qf = Q.to_float() if isinstance(Q, RationalMatrix) else Q
    try:
        Pp, Qp = OrthoProjection.of(Pf), OrthoProjection.of(Qf)
    except ValueError as exc:
        raise UsageError(str(exc)) from exc
    form = halmos_form(Pp, Qp)
    return _report("halmos", {"P": docP, "Q": docQ}, form.report(Pp, Qp)), EXIT_OK


# ---------------------------------------------------------------------------
# argument parsing
# ---------------------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--out", help="write the report to this file instead of stdout")
    common.add_argument("--no-timing", action="store_true", help="omit wall-clock fields from the report")
    ap = argparse.ArgumentParser(prog="gwords", description=__doc__.splitlines()[0])
    ap.add_argument("--version", action="version", version=__version__)
    sub = ap.add_subparsers(dest="command", required=True)

    p = sub.add_parser("reduce", parents=[common], help="cancellation trace and reduced class")
    p.add_argument("word")
    p.add_argument("--beta-cyclic", action="store_true")

    p = sub.add_parser("classify", parents=[common], help="2-goodness classification")
    p.add_argument("word")
    p.add_argument("--beta-cyclic", action="store_true")

    p = sub.add_parser("eval", parents=[common], help="evaluate a word on matrices from files")
    p.add_argument("word")
    p.add_argument("a_file", help="matrix file for A (or eq2-A)")
    p.add_argument("b_file", help="matrix file for B (or eq2-B)")
    p.add_argument("--exact", action="store_true")
    p.add_argument("--assert-positive", action="store_true", help="exit 1 unless the verdict is AllPositive")

    p = sub.add_parser("witness", parents=[common], help="constructive or searched counterexample")
    p.add_argument("word", nargs="?")
    p.add_argument("--recipe", choices=["auto", "hijo-eq2", "epsilon", "thfour"], default="auto")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--n", type=int, default=3)
    p.add_argument("--trials", type=int, default=10000)

    p = sub.add_parser("search", parents=[common], help="randomized counterexample search")
    p.add_argument("word")
    p.add_argument("--n", type=int, default=2)
    p.add_argument("--trials", type=int, default=1000)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--refine", action="store_true")
    p.add_argument("--threads", type=int, default=1)
    p.add_argument("--lam-min", type=float, default=1e-2)
    p.add_argument("--lam-max", type=float, default=1e2)

    p = sub.add_parser("verify", parents=[common], help="run a property suite")
    p.add_argument("suite", choices=sorted(SUITES) + ["all"])
    p.add_argument("--seed", type=int, default=0)

    p = sub.add_parser("halmos", parents=[common], help="joint block form of two orthoprojections")
    p.add_argument("p_file")
    p.add_argument("q_file")
    return ap


def dispatch(args) -> tuple:
    c = args.command
    if c == "reduce":
        return cmd_reduce(args.word, args.beta_cyclic)
    if c == "classify":
        return cmd_classify(args.word, args.beta_cyclic)
    if c == "eval":
        return cmd_eval(args.word, args.a_file, args.b_file, args.exact, args.assert_positive)
    if c == "witness":
        return cmd_witness(args.word, args.recipe, args.seed, args.n, args.trials)
    if c == "search":
        return cmd_search(args.word, args.n, args.trials, args.seed, args.refine, args.threads,
                          args.lam_min, args.lam_max)
    if c == "verify":
        return cmd_verify(args.suite, args.seed)
    if c == "halmos":
        return cmd_halmos(args.p_file, args.q_file)
    raise UsageError(f"unknown command {c!r}")  # pragma: no cover


def render(report: dict) -> str:
    return json.dumps(report, indent=2) + "\n"


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        report, status = dispatch(args)
    except (UsageError, GWordsError, ValueError) as exc:
        print(f"gwords: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    if args.no_timing:
        report.pop("timing", None)
    text = render(report)
    if args.out:
        Path(args.out).write_text(text)
    else:
        sys.stdout.write(text)
    return status


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
