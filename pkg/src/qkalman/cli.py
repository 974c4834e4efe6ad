"""Command-line front end.

Exit codes: 0 all requested checks passed, 1 a check failed, 2 input error,
3 internal consistency failure (two independent tests disagree).
"""
import argparse
import hashlib
import json
import sys
from pathlib import Path

import numpy as np

from . import __version__
from .analysis import analyze, corollary_applies, decompose, resolve
from .bae import rational_sample_oracle, realized_pair, theorem_bae_check, corollary_bae_check
from .corpus import EXAMPLE_IDS, fixture_bytes, run_example
from .errors import (ModelFormatError, QKalmanError, UnknownExample, VerdictDisagreement)
from .io import read_document
from .linalg import Tolerance
from .model import HGammaParams
from .parameterization import build_from_hgamma, check_theorem_co, split_gamma_co
from .realizability import check_pr_blockwise

EXIT_OK, EXIT_FAIL, EXIT_INPUT, EXIT_INTERNAL = 0, 1, 2, 3


class InputError(Exception):
    pass


def _matrix_out(X):
    X = np.asarray(X)
    if np.iscomplexobj(X):
        return [[[float(v.real), float(v.imag)] for v in row] for row in X]
    return [[float(v) for v in row] for row in X]


def _load(args):
    try:
        data = Path(args.model).read_bytes()
    except OSError as e:
        raise InputError(f"cannot read {args.model}: {e.strerror}") from None
    doc = read_document(args.model)
    return doc, hashlib.sha256(data).hexdigest()


def _need_params(doc, tol, what):
    r = resolve(doc, tol)
    if r.params is None:
        raise InputError(f"{what} needs Kalman block sizes; add a 'block_dims' section to the model")
    return r


def cmd_check_pr(args, tol):
    doc, digest = _load(args)
    rep = analyze(doc, tol)
    sec = {"pr": rep["pr"]}
    r = resolve(doc, tol)
    if r.kalman is not None:
        sec["blockwise"] = check_pr_blockwise(r.kalman, tol).as_dict()
    return digest, sec, rep["pr"]["passed"]


def cmd_spectrum(args, tol):
    doc, digest = _load(args)
    rep = analyze(doc, tol)
    return digest, {"spectrum": rep["spectrum"], "co": rep["co"],
                    "hurwitz_theorem": rep["hurwitz_theorem"]}, rep["hurwitz_theorem"]["respected"]


def cmd_kalman(args, tol):
    doc, digest = _load(args)
    r = _need_params(doc, tol, "kalman")
    p, k = r.params, r.kalman
    if isinstance(doc.model, HGammaParams):
        k = build_from_hgamma(p)
        out = {"direction": "build", "blocks": {n: _matrix_out(v) for n, v in k.blocks().items()}}
    else:
        out = {"direction": "extract", "blocks": {n: _matrix_out(v) for n, v in p.blocks().items()}}
    pr = check_pr_blockwise(k, tol)
    tc = check_theorem_co(p, tol)
    out["dims"] = p.dims.as_dict()
    out["pr_blockwise"] = pr.as_dict()
    out["theorem_co"] = tc.as_dict()
    return digest, {"kalman": out}, pr.passed and bool(tc)


def cmd_bae(args, tol):
    doc, digest = _load(args)
    r = _need_params(doc, tol, "bae")
    p = r.params
    dirs = ("pq", "qp") if args.direction == "both" else (args.direction,)
    sec = {"direction": args.direction, "method": args.method,
           "ignored_blocks": [b for b, v in (("h", p.dims.n3), ("cbo", p.dims.n2)) if v]}
    if args.method == "corollary":
        if not corollary_applies(p):
            raise InputError("corollary method needs H_co = [[0, I], [I, 0]]")
        Gq, Gp = split_gamma_co(p.Gamma_co, tol)
        c = corollary_bae_check(Gq, Gp, p.dims.n1, tol)
        verdict = {"pq": c["pq_bae_and_co"], "qp": c["qp_bae_and_co"]}
        sec["corollary"] = c
    else:
        method = "markov_on_JH" if args.method == "theorem" else "markov_on_A"
        rep = theorem_bae_check(p, args.direction, tol, cross_check=True, method=method)
        verdict = {"pq": rep.pin_to_qout_zero, "qp": rep.qin_to_pout_zero}
        sec.update(rep.as_dict())
        sec["method"] = args.method
        k = build_from_hgamma(p)
        oracle = {d: rational_sample_oracle(*realized_pair(k, d), seed=args.seed, tol=tol) for d in dirs}
        for d in dirs:
            if oracle[d] != verdict[d]:
                raise VerdictDisagreement(f"{d}: Markov test says {verdict[d]}, sampling oracle says {oracle[d]}")
        sec["sample_oracle"] = oracle
    sec["verdict"] = {d: bool(verdict[d]) for d in dirs}
    if args.direction == "both":
        ok = all(verdict[d] for d in dirs) if args.require_both else any(verdict[d] for d in dirs)
    else:
        ok = verdict[args.direction]
    return digest, {"bae": sec}, bool(ok)


def cmd_decompose(args, tol):
    doc, digest = _load(args)
    r = _need_params(doc, tol, "decompose")
    sec = decompose(r.params, doc.transforms, args.search_cap, tol)
    return digest, {"decomposition": sec}, bool(sec["found"])


def cmd_verify_examples(args, tol):
    ids = args.id or list(EXAMPLE_IDS)
    h = hashlib.sha256()
    results = []
    for eid in ids:
        try:
            h.update(fixture_bytes(eid))
        except UnknownExample:
            raise InputError(f"unknown example id {eid!r}; known: {', '.join(EXAMPLE_IDS)}") from None
        rep, diff = run_example(eid, tol=tol)
        results.append({"id": eid, "passed": not diff, "diff": diff, "report": rep.as_dict()})
    return h.hexdigest(), {"examples": results}, all(x["passed"] for x in results)


COMMANDS = {
    "check-pr": cmd_check_pr,
    "spectrum": cmd_spectrum,
    "kalman": cmd_kalman,
    "bae": cmd_bae,
    "decompose": cmd_decompose,
    "verify-examples": cmd_verify_examples,
}


def build_parser():
    ap = argparse.ArgumentParser(prog="qkalman", description="Structural analysis of quantum linear systems.")
    ap.add_argument("--version", action="version", version=f"qkalman {__version__}")
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--tol", type=float, default=1e-10, help="absolute and relative tolerance")
    common.add_argument("--seed", type=int, default=0, help="seed for sampling oracles")
    common.add_argument("--json", metavar="PATH", help="write the JSON report here ('-' for stdout)")
    sub = ap.add_subparsers(dest="command", required=True)
    for name, helptext in (("check-pr", "physical realizability residuals"),
                           ("spectrum", "poles, symmetry and Hurwitz/controllability verdicts"),
                           ("kalman", "build Kalman blocks from (H, Gamma) or extract (H, Gamma)")):
        s = sub.add_parser(name, parents=[common], help=helptext)
        s.add_argument("model")
    s = sub.add_parser("bae", parents=[common], help="back-action-evading measurement verdicts")
    s.add_argument("model")
    s.add_argument("--direction", choices=("pq", "qp", "both"), default="both")
    s.add_argument("--method", choices=("theorem", "corollary", "markov"), default="theorem")
    s.add_argument("--require-both", action="store_true", help="with --direction both, fail unless both hold")
    s = sub.add_parser("decompose", parents=[common], help="verify or search subsystem decompositions")
    s.add_argument("model")
    s.add_argument("--search-cap", type=int, default=4, help="largest block size the search accepts")
    s = sub.add_parser("verify-examples", parents=[common], help="run the bundled examples")
    s.add_argument("--id", action="append", help="example id (repeatable); default all")
    return ap


def _text(sections, prefix=""):
    lines = []
    for k, v in sections.items():
        if isinstance(v, dict):
            lines.append(f"{prefix}{k}:")
            lines += _text(v, prefix + "  ")
        elif isinstance(v, list) and v and isinstance(v[0], dict):
            lines.append(f"{prefix}{k}:")
            for item in v:
                sub = _text(item, prefix + "    ")
                if sub:
                    sub[0] = prefix + "  - " + sub[0][len(prefix) + 4:]
                lines += sub
        else:
            lines.append(f"{prefix}{k}: {json.dumps(v)}")
    return lines


def main(argv=None):
    ap = build_parser()
    args = ap.parse_args(argv)
    tol = Tolerance(args.tol, args.tol)
    try:
        digest, sections, ok = COMMANDS[args.command](args, tol)
        status = EXIT_OK if ok else EXIT_FAIL
    except VerdictDisagreement as e:
        print(f"internal consistency failure: {e}", file=sys.stderr)
        return EXIT_INTERNAL
    except (InputError, ModelFormatError, QKalmanError) as e:
        print(f"input error: {e}", file=sys.stderr)
        return EXIT_INPUT
    doc = {"tool": "qkalman", "version": __version__, "command": args.command,
           "input_digest": digest, "tol": args.tol, "seed": args.seed,
           "sections": sections, "passed": bool(ok), "exit_status": status}
    print("\n".join(_text({"command": args.command, "passed": bool(ok), **sections})))
    if args.json:
        text = json.dumps(doc, indent=2) + "\n"
        if args.json == "-":
            sys.stdout.write(text)
        else:
            Path(args.json).write_text(text)
    return status


if __name__ == "__main__":
    sys.exit(main())
