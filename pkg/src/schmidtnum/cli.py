"""Command-line front end.

Exit codes: 0 success, 1 a check failed, 2 bad input.
"""

import argparse
import json
import sys
import time
from pathlib import Path

import numpy as np

from . import __version__, ces, states, tensor_core, verify
from .certify import Budget, bsn_bounds, decomposition_search, eof_bound, sn_bounds
from .errors import InputError, PreconditionError, SchmidtError
from .fileio import dumps_state, emit_report, parse_state_file
from .multipartite import (
    bipartitions,
    expansion_chain_check,
    jsn,
    multipartite_ppt_check,
    tensor_rank_bounds,
)
from .ppt import birank, lowdim_separability, ppt_check, reduction_check, violates_reduction
from .projections import LocalProjector, check_proj_bounds, rank_sweep, snminmax_estimate
from .tensor_core import Bipartition, DensityOp, PureState, as_bipartite, hermitian_rank, local_ranks
from .witness import pairing, reduction_choi, th00_bound, transpose_choi

EXIT_OK, EXIT_FAIL, EXIT_INPUT = 0, 1, 2


class CheckFailed(Exception):
    """Raised to turn a completed report into exit code 1."""

    def __init__(self, results):
        super().__init__("check failed")
        self.results = results


# ---------------------------------------------------------------------------
# argument helpers


def _param_value(text: str):
    try:
        return json.loads(text)
    except json.JSONDecodeError:
        return text


def parse_params(items) -> dict:
    out = {}
    for item in items or ():
        if "=" not in item:
            raise InputError(f"parameter {item!r} must look like key=value")
        k, v = item.split("=", 1)
        out[k] = _param_value(v)
    return out


def load_state(spec: str, params=None):
    """A state file path, or a registry name built with ``params``.

    Returns ``(state, members)`` where ``members`` are the UPB product vectors
    for registered UPB complements loaded by name.
    """
    p = Path(spec)
    if p.exists() or spec.endswith(".json") or spec.endswith(".state"):
        if params:
            raise InputError("--param applies to registry names, not files")
        return parse_state_file(p), None
    state = states.construct(spec, **(params or {}))
    return state, states.upb_members(spec)


def parse_cut(text: str | None, n: int) -> Bipartition | None:
    if text is None:
        return None
    try:
        left = [int(x) for x in text.split(",") if x.strip()]
    except ValueError:
        raise InputError(f"--cut expects comma-separated party indices, got {text!r}") from None
    return Bipartition.of(n, left)


def budget_from(args) -> Budget:
    kw = {"seed": args.seed}
    if args.restarts is not None:
        kw["restarts"] = args.restarts
    if args.iters is not None:
        kw["iters"] = args.iters
    if args.tol is not None:
        kw["tol_cert"] = args.tol
    return Budget(**kw)


def _density(s):
    return s.to_density() if isinstance(s, PureState) else s


def _members_for(members, cut: Bipartition | None, n: int):
    if members is None or cut is None or n == 2:
        return members
    return ces.group_members(members, [list(cut.left), list(cut.right)])


# ---------------------------------------------------------------------------
# subcommands


def cmd_construct(args):
    if args.list:
        return {"states": {name: {"params": e.params, "doc": e.doc} for name, e in sorted(states.REGISTRY.items())}}
    if not args.name:
        raise InputError("construct needs a state name or --list")
    params = parse_params(args.param)
    s = states.construct(args.name, **params)
    text = dumps_state(s, name=args.name, seed=params.get("seed"), params=params or None)
    return {"_raw": text}


def cmd_analyze(args):
    s, members = load_state(args.state, parse_params(args.param))
    rho = _density(s)
    n = len(rho.dims)
    cut = parse_cut(args.cut, n)
    budget = budget_from(args)
    rb = as_bipartite(rho, cut)
    v = ppt_check(rb)
    br = birank(rb)
    snb = sn_bounds(rb, budget=budget, members=_members_for(members, cut, n))
    red = reduction_check(rb)
    return {
        "dims": list(rho.dims),
        "cut_dims": list(rb.dims),
        "trace": rho.trace,
        "rank": hermitian_rank(rho.matrix),
        "local_ranks": list(local_ranks(rb)),
        "birank": [br.rank_rho, br.rank_gamma],
        "ppt": {"is_ppt": v.is_ppt, "min_eig_gamma": v.min_eig_gamma, "tolerance": v.tolerance},
        "reduction": {"min_eigs": list(red), "violated": violates_reduction(rb)},
        "lowdim_separability": lowdim_separability(rb),
        "sn_bounds": snb,
        "eof_upper_bound": eof_bound(snb),
    }


def cmd_witness(args):
    s, _ = load_state(args.state, parse_params(args.param))
    rho = as_bipartite(_density(s), parse_cut(args.cut, len(s.dims)))
    restarts = args.restarts if args.restarts is not None else 32
    iters = args.iters if args.iters is not None else 500
    tol = args.tol if args.tol is not None else 1e-9
    out = {}
    m, nb = rho.dims
    if m == nb:
        res, lb = th00_bound(rho, restarts, iters, args.seed, tol)
        out["overlap"] = {"value": res.value, "iterations": res.iterations, "restarts": res.restarts,
                          "converged": res.converged, "sn_lower": lb}
    else:
        out["overlap"] = None
    if m == nb:
        choi = {"reduction": reduction_choi(m), "transpose": transpose_choi(m)}[args.choi]
        val = pairing(rho, choi)
        out["pairing"] = {"map": args.choi, "value": val, "fires": val < -tol * rho.trace}
    return out


def cmd_certify(args):
    s, members = load_state(args.state, parse_params(args.param))
    rho = _density(s)
    n = len(rho.dims)
    cut = parse_cut(args.cut, n)
    budget = budget_from(args)
    members = _members_for(members, cut, n)
    rb = as_bipartite(rho, cut)
    if args.bsn:
        return {"bsn_bounds": bsn_bounds(rb, budget=budget, members=members)}
    if args.k is not None:
        d = decomposition_search(rb, args.k, restarts=budget.restarts, iters=budget.iters, seed=budget.seed,
                                 tol_cert=budget.tol_cert, max_m_factor=budget.max_m_factor)
        res = {"k": args.k, "certified_sn_at_most_k": d is not None, "decomposition": d}
        if d is None:
            raise CheckFailed(res)
        return res
    return {"sn_bounds": sn_bounds(rb, budget=budget, members=members)}


def cmd_project(args):
    s, _ = load_state(args.state, parse_params(args.param))
    rho = as_bipartite(s)
    budget = budget_from(args)
    m = rho.dims[0 if args.side == "A" else 1]
    if args.keep is not None:
        keep = [int(x) for x in args.keep.split(",") if x.strip()]
        if any(not 0 <= i < m for i in keep):
            raise InputError(f"--keep indices must lie in [0, {m - 1}]")
        rep = check_proj_bounds(rho, LocalProjector.basis(m, keep), args.side, budget)
        if not rep.ok:
            raise CheckFailed({"report": rep})
        return {"report": rep}
    if args.k is not None:
        rng = np.random.default_rng([args.seed, args.k])
        rep = check_proj_bounds(rho, LocalProjector.haar(m, args.k, rng), args.side, budget)
        out = {"report": rep}
        if 1 <= args.k <= m - 1:
            out["estimate"] = snminmax_estimate(rho, args.k, samples=args.samples, seed=args.seed,
                                                side=args.side, budget=budget)
        if not rep.ok:
            raise CheckFailed(out)
        return out
    sw = rank_sweep(rho, samples=args.samples, seed=args.seed, budget=budget)
    return {"sweep": sw}


def cmd_multi(args):
    s, members = load_state(args.state, parse_params(args.param))
    budget = budget_from(args)
    out = {"dims": list(s.dims)}
    n = len(s.dims)
    if isinstance(s, PureState) and n >= 2:
        out["jsn"] = list(jsn(s).ranks)
        out["tensor_rank"] = tensor_rank_bounds(s, budget)
    rho = _density(s)
    if n >= 2:
        verdicts, all_ppt = multipartite_ppt_check(rho)
        out["ppt"] = {str(c): v.is_ppt for c, v in verdicts.items()}
        out["all_ppt"] = all_ppt
        out["rank"] = hermitian_rank(rho.matrix)
        if n > 2:
            out["sn_by_cut"] = {str(c): sn_bounds(rho, c, budget, _members_for(members, c, n))
                                for c in bipartitions(n)}
    if n == 2:
        rep = expansion_chain_check(rho, budget)
        out["expansion_chain"] = rep
        if not all(rep.inequalities_ok):
            raise CheckFailed(out)
    return out


def cmd_verify(args):
    budget = budget_from(args)
    results = verify.run_suite(args.suite, seed=args.seed, deep=args.deep, budget=budget)
    out = {"suites": results, "passed": all(r.passed for r in results)}
    if not out["passed"]:
        raise CheckFailed(out)
    return out


def _random_ppt_state(rng):
    """A random PPT state on 3 x 3: a locally rotated Tiles state mixed with separable noise."""
    t = states.tiles_state()
    u = np.kron(tensor_core.random_unitary(3, rng), tensor_core.random_unitary(3, rng))
    noise = tensor_core.random_separable((3, 3), int(rng.integers(1, 4)), rng)
    p = float(rng.uniform(0.5, 1.0))
    return DensityOp(p * (u @ t.matrix @ u.conj().T) + (1 - p) * noise.matrix / noise.trace, (3, 3))


def cmd_explore_bsn(args):
    rng = np.random.default_rng([args.seed, 99])
    budget = budget_from(args)
    rows, candidates = [], []
    for i in range(args.samples):
        rho = _random_ppt_state(rng)
        b = bsn_bounds(rho, budget=budget)
        row = {"sample": i, "sn_rho": [b.sn_rho.lo, b.sn_rho.hi], "sn_gamma": [b.sn_gamma.lo, b.sn_gamma.hi],
               "consistent": b.consistent}
        rows.append(row)
        if b.sn_rho.hi < b.sn_gamma.lo or b.sn_gamma.hi < b.sn_rho.lo:
            candidates.append(row)
    return {"samples": rows, "candidates": candidates}


COMMANDS = {
    "construct": cmd_construct,
    "analyze": cmd_analyze,
    "witness": cmd_witness,
    "certify": cmd_certify,
    "project": cmd_project,
    "multi": cmd_multi,
    "verify": cmd_verify,
    "explore-bsn": cmd_explore_bsn,
}


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--seed", type=int, default=0)
    common.add_argument("--tol", type=float, default=None, help="certification tolerance")
    common.add_argument("--restarts", type=int, default=None)
    common.add_argument("--iters", type=int, default=None)
    common.add_argument("--deep", action="store_true", help="include slow checks")
    common.add_argument("--format", choices=("json", "table"), default="json")
    common.add_argument("-o", "--output", default=None, help="write the report here instead of stdout")
    common.add_argument("--timing", action="store_true", help="add wall time to the report")

    p = argparse.ArgumentParser(prog="schmidtnum", description="Certified Schmidt-number tools.")
    p.add_argument("--version", action="version", version=__version__)
    sub = p.add_subparsers(dest="command", required=True)

    def state_cmd(name, help_text):
        sp = sub.add_parser(name, parents=[common], help=help_text)
        sp.add_argument("state", help="state file or registry name")
        sp.add_argument("--param", action="append", metavar="KEY=VALUE", help="registry parameter")
        return sp

    c = sub.add_parser("construct", parents=[common], help="write a registered state as a state file")
    c.add_argument("name", nargs="?")
    c.add_argument("--list", action="store_true")
    c.add_argument("--param", action="append", metavar="KEY=VALUE")

    a = state_cmd("analyze", "ranks, PPT, reduction and Schmidt-number bounds")
    a.add_argument("--cut", help="comma-separated parties on the left of the cut")
    w = state_cmd("witness", "see-saw overlap bound and witness pairing")
    w.add_argument("--cut")
    w.add_argument("--choi", choices=("reduction", "transpose"), default="reduction")
    ce = state_cmd("certify", "certified Schmidt-number interval")
    ce.add_argument("--cut")
    ce.add_argument("--k", type=int, help="only search for a decomposition with Schmidt rank <= k")
    ce.add_argument("--bsn", action="store_true", help="bound (sn(rho), sn(rho^Gamma))")
    pr = state_cmd("project", "local projection bounds")
    pr.add_argument("--side", choices=("A", "B"), default="A")
    grp = pr.add_mutually_exclusive_group()
    grp.add_argument("--keep", help="coordinate projector keeping these basis indices")
    grp.add_argument("--k", type=int, help="random projector with this kernel dimension")
    pr.add_argument("--samples", type=int, default=6)
    state_cmd("multi", "joint Schmidt numbers, tensor rank, per-cut checks")
    v = sub.add_parser("verify", parents=[common], help="run a named verification suite")
    v.add_argument("suite", choices=sorted(verify.SUITES) + ["all"])
    e = sub.add_parser("explore-bsn", parents=[common], help="random search over PPT states for sn(rho) != sn(rho^Gamma)")
    e.add_argument("--samples", type=int, default=10)
    return p


def _tolerances(args) -> dict:
    return {
        "rank": tensor_core.TOL_RANK,
        "psd": tensor_core.TOL_PSD,
        "herm": tensor_core.TOL_HERM,
        "recon": tensor_core.TOL_RECON,
        "cert": args.tol if args.tol is not None else Budget().tol_cert,
    }


def _echo(argv) -> list:
    """The command line without the output destination."""
    out, skip = [], False
    for a in argv:
        if skip:
            skip = False
        elif a in ("-o", "--output"):
            skip = True
        elif not a.startswith("--output="):
            out.append(a)
    return out


def run_command(argv) -> tuple[bytes, int]:
    """Parse ``argv``, run the subcommand and return ``(output bytes, exit code)``."""
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as e:
        return b"", EXIT_INPUT if e.code else EXIT_OK
    t0 = time.perf_counter()
    code = EXIT_OK
    try:
        results = COMMANDS[args.command](args)
    except CheckFailed as e:
        results, code = e.results, EXIT_FAIL
    except (InputError, PreconditionError, KeyError) as e:
        msg = e.args[0] if e.args else str(e)
        return f"error: {msg}\n".encode(), EXIT_INPUT
    except SchmidtError as e:
        return f"error: {e}\n".encode(), EXIT_INPUT
    if "_raw" in results:
        return results["_raw"].encode(), code
    report = {
        "command": _echo(argv),
        "version": __version__,
        "seed": args.seed,
        "tolerances": _tolerances(args),
        "results": results,
    }
    if args.timing:
        report["wall_time_s"] = time.perf_counter() - t0
    return emit_report(report, args.format), code


def main(argv=None) -> int:
    argv = list(sys.argv[1:] if argv is None else argv)
    out, code = run_command(argv)
    try:
        opts = build_parser().parse_known_args(argv)[0]
        dest = getattr(opts, "output", None)
    except SystemExit:
        dest = None
    if code == EXIT_INPUT:
        sys.stderr.write(out.decode())
        return code
    if dest:
        Path(dest).write_bytes(out)
    else:
        sys.stdout.buffer.write(out)
        sys.stdout.flush()
    return code


if __name__ == "__main__":
    sys.exit(main())
