"""Command-line interface.

Every command writes its outputs plus ``<first output>.manifest.json``
recording argv, parameters, seeds, tool version, input/output hashes and
wall-clock time.  ``replay`` re-runs a manifest and checks the output hashes.

Exit codes: 0 success, 1 a verification or stability check found a
violation (or a replay mismatch), 2 unreadable input or bad configuration,
3 a mathematical precondition failed, 4 internal invariant breach.
"""

from __future__ import annotations

import argparse
import logging
import os
import sys
import time
from pathlib import Path
from typing import List, Optional

import numpy as np

from . import __version__
from . import io as mio
from .datasets import make_shape_dataset
from .errors import (
    ConfigurationError,
    ContractError,
    DataError,
    DomainError,
    InvariantError,
    ManistabError,
    ParseError,
    PreconditionError,
)
from .filters import (
    FilterCoefficients,
    apply_filter,
    continuity_constants,
    default_range,
    design_filter,
    verify_fdt_frt,
)
from .geometry import DeformationSpec, GaussianBump, deform, evaluate_signal, sample_manifold
from .graph import build_graph, laplacian
from .mnn import MnnConfig, TrainConfig, error_rate, init_model, train
from .spectral import eigendecompose, partition_spectrum
from .stability import (
    GraphInput,
    run_convergence_experiment,
    run_filter_stability_experiment,
    run_mnn_stability_experiment,
)
from .verify import SUITES, run_suite

log = logging.getLogger("manistab")

EXIT_OK, EXIT_VIOLATION, EXIT_PARSE, EXIT_PRECONDITION, EXIT_INVARIANT = 0, 1, 2, 3, 4
THRESHOLD_KINDS = {"alpha": "alpha_difference", "gamma": "gamma_ratio"}


class UsageError(Exception):
    """Bad flags or config keys; reported with exit code 2."""


# ---------------------------------------------------------------------------
# flag types
# ---------------------------------------------------------------------------


def float_list(text: str) -> List[float]:
    try:
        return [float(v) for v in text.split(",") if v.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated numbers, got {text!r}") from None


def int_list(text: str) -> List[int]:
    try:
        return [int(v) for v in text.split(",") if v.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated integers, got {text!r}") from None


def seed_type(text: str) -> int:
    try:
        v = int(text, 0)
    except ValueError:
        raise argparse.ArgumentTypeError(f"invalid seed {text!r}") from None
    if not 0 <= v < 2**64:
        raise argparse.ArgumentTypeError("seed must be a 64-bit unsigned integer")
    return v


def flag_bool(text: str) -> bool:
    t = text.strip().lower()
    if t in ("1", "true", "yes", "on"):
        return True
    if t in ("0", "false", "no", "off"):
        return False
    raise argparse.ArgumentTypeError(f"expected a boolean, got {text!r}")


def _fmt_of(path: str, explicit: Optional[str], choices, default: str) -> str:
    if explicit:
        return explicit
    suffix = Path(path).suffix.lstrip(".")
    return suffix if suffix in choices else default


# ---------------------------------------------------------------------------
# manifests
# ---------------------------------------------------------------------------


class Run:
    """Collects inputs/outputs of one command and writes the manifest."""

    def __init__(self, args, argv):
        self.args = args
        self.argv = list(argv)
        self.inputs: List[str] = []
        self.outputs: List[str] = []
        self.seeds = {}
        self.start = time.perf_counter()

    def input(self, path):
        if path is not None:
            self.inputs.append(str(path))
        return path

    def output(self, path):
        self.outputs.append(str(path))
        return path

    def manifest(self):
        if not self.outputs:
            return None
        params = {k: v for k, v in vars(self.args).items() if k not in ("func",)}
        doc = {
            "schema_version": mio.SCHEMA_VERSION,
            "tool": "manistab",
            "version": __version__,
            "command": self.args.command,
            "argv": self.argv,
            "cwd": str(Path.cwd()),
            "parameters": params,
            "seeds": self.seeds,
            "inputs": [{"path": p, "sha256": mio.sha256_file(p)} for p in self.inputs if Path(p).exists()],
            "outputs": [{"path": p, "sha256": mio.sha256_file(p)} for p in self.outputs],
            "duration_seconds": time.perf_counter() - self.start,
        }
        path = self.outputs[0] + ".manifest.json"
        mio.write_json(path, doc)
        return path


# ---------------------------------------------------------------------------
# commands
# ---------------------------------------------------------------------------


def cmd_sample(args, run):
    cloud = sample_manifold(args.manifold, args.n, args.seed)
    run.seeds["seed"] = args.seed
    mio.write_cloud(run.output(args.out), cloud, _fmt_of(args.out, args.format, ("csv", "json"), "csv"))
    return EXIT_OK


def _read_cloud(args, run, path):
    return mio.read_cloud(run.input(path), args.intrinsic_dim)


def cmd_deform(args, run):
    cloud = _read_cloud(args, run, args.cloud)
    spec = DeformationSpec(args.kind, args.eps, args.seed, args.bandlimit)
    run.seeds["seed"] = args.seed
    out = deform(cloud, spec)
    mio.write_cloud(run.output(args.out), out, _fmt_of(args.out, args.format, ("csv", "json"), "csv"))
    return EXIT_OK


def cmd_graph(args, run):
    cloud = _read_cloud(args, run, args.cloud)
    adj = build_graph(cloud, args.alpha_kernel, args.t_n)
    op = adj if args.adjacency else laplacian(adj)
    mio.write_operator(run.output(args.out), op, _fmt_of(args.out, args.format, ("bin", "csv"), "bin"))
    return EXIT_OK


def _partition(dec, args):
    if args.threshold is None:
        return None
    return partition_spectrum(dec, THRESHOLD_KINDS[args.threshold_kind], args.threshold, args.exclude_zero)


def cmd_spectrum(args, run):
    op = mio.read_operator(run.input(args.operator))
    dec = eigendecompose(op)
    part = _partition(dec, args)
    mio.write_spectrum(run.output(args.out), dec, part, _fmt_of(args.out, args.format, ("json", "csv"), "json"))
    return EXIT_OK


def _operator_from_args(args, run):
    """Operator from --operator, or built from --manifold/--n/--sample-seed."""
    if getattr(args, "operator", None):
        return mio.read_operator(run.input(args.operator))
    if getattr(args, "manifold", None):
        run.seeds["sample_seed"] = args.sample_seed
        cloud = sample_manifold(args.manifold, args.n, args.sample_seed)
        return laplacian(build_graph(cloud, args.alpha_kernel))
    raise UsageError("give --operator or --manifold")


def _design(dec, args):
    kind = THRESHOLD_KINDS[args.threshold_kind]
    part = partition_spectrum(dec, kind, args.threshold, exclude_zero=(kind == "gamma_ratio"))
    targets = args.targets
    if len(targets) != part.group_count:
        raise ContractError(f"{len(targets)} targets given but the spectrum has {part.group_count} groups")
    lr = tuple(args.range) if args.range else None
    return part, design_filter(dec, part, targets, args.K, lambda_range=lr)


def cmd_filter_design(args, run):
    op = _operator_from_args(args, run)
    dec = eigendecompose(op)
    part, res = _design(dec, args)
    extra = {
        "residual": res.residual,
        "zero_filter": res.zero_filter,
        "threshold_kind": part.threshold_kind,
        "threshold": part.threshold,
        "group_count": part.group_count,
    }
    mio.write_filter(run.output(args.out), res.filter, not res.zero_filter, res.lambda_range, extra)
    return EXIT_OK


def cmd_filter_apply(args, run):
    h = mio.read_filter(run.input(args.filter))
    op = mio.read_operator(run.input(args.operator))
    x = mio.read_signal(run.input(args.signal))
    z = apply_filter(h, eigendecompose(op), x)
    mio.write_signal(run.output(args.out), z)
    return EXIT_OK


def cmd_filter_analyze(args, run):
    h = mio.read_filter(run.input(args.filter))
    doc = {"schema_version": mio.SCHEMA_VERSION, "K": h.K}
    dec = None
    if args.operator:
        dec = eigendecompose(mio.read_operator(run.input(args.operator)))
    if args.range:
        rng_ = tuple(args.range)
    elif dec is not None:
        rng_ = default_range(dec.eigenvalues[-1])
    else:
        raise UsageError("give --range or --operator")
    cc = continuity_constants(h, rng_, args.grid)
    doc["continuity"] = {
        "lipschitz": cc.lipschitz,
        "integral_lipschitz": cc.integral_lipschitz,
        "sup_abs_response": cc.sup_abs_response,
        "lambda_range": list(cc.lambda_range),
        "non_amplifying": cc.non_amplifying,
    }
    if dec is not None and args.threshold is not None:
        kind = THRESHOLD_KINDS[args.threshold_kind]
        part = partition_spectrum(dec, kind, args.threshold, exclude_zero=(kind == "gamma_ratio"))
        rep = verify_fdt_frt(h, part, dec, args.delta if args.delta is not None else np.inf)
        doc["threshold_check"] = {
            "threshold_kind": kind,
            "threshold": args.threshold,
            "delta": args.delta,
            "holds": rep.holds,
            "worst_group": rep.worst_group,
            "worst_deviation": rep.worst_deviation,
            "group_deviations": list(rep.group_deviations),
        }
    mio.write_json(run.output(args.out), doc)
    return EXIT_OK


def cmd_train(args, run):
    run.seeds.update(seed=args.seed, data_seed=args.data_seed)
    train_set = make_shape_dataset(args.train_count, args.n, args.data_seed, args.alpha_kernel)
    test_set = make_shape_dataset(args.test_count, args.n, args.data_seed + 1, args.alpha_kernel) if args.test_count else []
    cfg = MnnConfig(tuple(args.widths), args.K, args.nonlinearity)
    tcfg = TrainConfig(
        learning_rate=args.lr,
        adam_beta1=args.beta1,
        adam_beta2=args.beta2,
        batch_size=args.batch,
        epochs=args.epochs,
        regularizer_weight=args.reg_weight,
        lipschitz_target=args.a_target,
        integral_lipschitz_target=args.b_target,
        seed=args.seed,
    )
    res = train(init_model(cfg, args.seed), [it.sample for it in train_set], tcfg)
    mio.write_model(run.output(args.out), res.model)
    mio.write_train_log(run.output(args.log or str(Path(args.out).with_suffix(".log.csv"))), res.loss_curve, res.error_history)
    if test_set:
        log.info("test error %.4f", error_rate(res.model, [it.sample for it in test_set]))
    return EXIT_OK


def _signal_from_args(args, run, cloud, n):
    if args.signal:
        return mio.read_signal(run.input(args.signal)).values
    if cloud is not None:
        return evaluate_signal(cloud, args.signal_spec).values
    raise UsageError("give --signal")


def cmd_stability(args, run):
    run.seeds["seed"] = args.seed
    if args.kind != "deformation":
        if args.threshold is None:
            raise UsageError("--threshold is required for operator perturbations")
        too_big = [e for e in args.eps if e >= args.threshold]
        if too_big:
            raise PreconditionError(f"perturbation sizes {too_big} are not below the threshold {args.threshold}")
    if args.model:
        model = mio.read_model(run.input(args.model))
        if args.kind == "deformation":
            cloud = _read_cloud(args, run, args.cloud) if args.cloud else None
            if cloud is None:
                raise UsageError("deformation experiments need --cloud")
            op = laplacian(build_graph(cloud, args.alpha_kernel))
            X = _signal_from_args(args, run, cloud, cloud.n)
            inputs = [GraphInput(cloud, op, eigendecompose(op), X)]
        else:
            op = _operator_from_args(args, run)
            cloud = sample_manifold(args.manifold, args.n, args.sample_seed) if args.manifold and not args.operator else None
            X = _signal_from_args(args, run, cloud, op.n)
            inputs = [GraphInput(cloud, op, eigendecompose(op), X)]
        report = run_mnn_stability_experiment(
            model, inputs, args.kind, args.eps, args.trials, args.seed, args.threshold, args.alpha_kernel, threads=args.threads
        )
    else:
        if args.kind == "deformation":
            raise UsageError("deformation experiments need --model")
        op = _operator_from_args(args, run)
        dec = eigendecompose(op)
        if args.filter:
            h = mio.read_filter(run.input(args.filter))
        else:
            _, res = _design(dec, args)
            if res.zero_filter:
                raise DomainError("designed filter is identically zero")
            h = res.filter
        report = run_filter_stability_experiment(
            op, h, args.kind, args.eps, args.trials, args.seed, args.threshold, dec=dec, threads=args.threads
        )
    mio.write_report(run.output(args.out), report, "json")
    csv_path = args.csv or str(Path(args.out).with_suffix(".csv"))
    mio.write_report(run.output(csv_path), report, "csv")
    log.info("violations %d, max ratio %.4g", report.violation_count, report.max_ratio)
    return EXIT_VIOLATION if report.violation_count else EXIT_OK


def cmd_converge(args, run):
    run.seeds["seed"] = args.seed
    h = mio.read_filter(run.input(args.filter)) if args.filter else FilterCoefficients(args.taps)
    spec = args.signal_spec
    if spec == "gaussian_bump":
        spec = GaussianBump(tuple(args.bump_center), args.bump_width)
    rows = run_convergence_experiment(args.manifold, args.n_list, h, spec, args.seed, args.alpha_kernel, args.reference)
    mio.write_convergence(run.output(args.out), rows, _fmt_of(args.out, args.format, ("csv", "json"), "csv"))
    return EXIT_OK


def cmd_verify(args, run):
    run.seeds["seed"] = args.seed
    res = run_suite(args.suite, args.trials, args.n, args.seed)
    if args.out:
        mio.write_json(run.output(args.out), res)
    log.info("verification violations: %d", res["violations"])
    return EXIT_VIOLATION if res["violations"] else EXIT_OK


def cmd_replay(args, run):
    doc = mio.read_json(args.manifest)
    try:
        argv = doc["argv"]
        recorded = {o["path"]: o["sha256"] for o in doc["outputs"]}
    except (KeyError, TypeError):
        raise ParseError("not a run manifest", args.manifest) from None
    prev = Path.cwd()
    os.chdir(doc.get("cwd", prev))
    try:
        code = main(argv)
    finally:
        os.chdir(prev)
    if code not in (EXIT_OK, EXIT_VIOLATION):
        return code
    base = Path(doc.get("cwd", prev))
    bad = [p for p, h in recorded.items() if not (base / p).exists() or mio.sha256_file(base / p) != h]
    for p in bad:
        log.error("output differs from manifest: %s", p)
    if not bad:
        log.info("replay reproduced %d outputs", len(recorded))
    return EXIT_VIOLATION if bad else EXIT_OK


# ---------------------------------------------------------------------------
# parser
# ---------------------------------------------------------------------------


def _common(p):
    p.add_argument("--config", help="key = value file; explicit flags take precedence")
    p.add_argument("--threads", type=int, default=1, help="worker threads for independent trials")
    p.add_argument("-v", "--verbose", action="store_true")


def _graph_source(p):
    p.add_argument("--operator", help="operator file (.bin or .csv)")
    p.add_argument("--manifold", choices=["sphere2", "torus2", "plane_patch"], help="sample the graph instead of reading one")
    p.add_argument("--n", type=int, default=60)
    p.add_argument("--sample-seed", type=seed_type, default=0)
    p.add_argument("--alpha-kernel", type=float, default=1.0)


def _threshold(p, required=False):
    p.add_argument("--threshold-kind", choices=sorted(THRESHOLD_KINDS), default="alpha")
    p.add_argument("--threshold", type=float, required=required, help="alpha or gamma")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="manistab", description=__doc__.split("\n")[0])
    parser.add_argument("--version", action="version", version=f"manistab {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("sample", help="sample a point cloud")
    _common(p)
    p.add_argument("--manifold", required=True, choices=["sphere2", "torus2", "plane_patch"])
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--seed", type=seed_type, default=0)
    p.add_argument("--out", required=True)
    p.add_argument("--format", choices=["csv", "json"])
    p.set_defaults(func=cmd_sample)

    p = sub.add_parser("deform", help="deform a point cloud")
    _common(p)
    p.add_argument("--cloud", required=True)
    p.add_argument("--intrinsic-dim", type=int, default=2)
    p.add_argument("--kind", choices=["gaussian_coordinate", "smooth_field"], default="gaussian_coordinate")
    p.add_argument("--eps", type=float, required=True)
    p.add_argument("--bandlimit", type=int, default=2)
    p.add_argument("--seed", type=seed_type, default=0)
    p.add_argument("--out", required=True)
    p.add_argument("--format", choices=["csv", "json"])
    p.set_defaults(func=cmd_deform)

    p = sub.add_parser("graph", help="build the kernel graph Laplacian of a cloud")
    _common(p)
    p.add_argument("--cloud", required=True)
    p.add_argument("--intrinsic-dim", type=int, default=2)
    p.add_argument("--alpha-kernel", type=float, default=1.0)
    p.add_argument("--t-n", type=float, help="override the kernel bandwidth")
    p.add_argument("--adjacency", action="store_true", help="write the adjacency instead of the Laplacian")
    p.add_argument("--out", required=True)
    p.add_argument("--format", choices=["bin", "csv"])
    p.set_defaults(func=cmd_graph)

    p = sub.add_parser("spectrum", help="eigenvalues and optional partition")
    _common(p)
    p.add_argument("--operator", required=True)
    _threshold(p)
    p.add_argument("--exclude-zero", action="store_true")
    p.add_argument("--out", required=True)
    p.add_argument("--format", choices=["json", "csv"])
    p.set_defaults(func=cmd_spectrum)

    fp = sub.add_parser("filter", help="design, apply or analyze a filter")
    fsub = fp.add_subparsers(dest="filter_command", required=True)
    p = fsub.add_parser("design")
    _common(p)
    _graph_source(p)
    _threshold(p, required=True)
    p.add_argument("--targets", type=float_list, required=True, help="one response per spectrum group")
    p.add_argument("--K", type=int, default=5)
    p.add_argument("--range", type=float_list, help="normalization range lo,hi")
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_filter_design)
    p = fsub.add_parser("apply")
    _common(p)
    p.add_argument("--filter", required=True)
    p.add_argument("--operator", required=True)
    p.add_argument("--signal", required=True)
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_filter_apply)
    p = fsub.add_parser("analyze")
    _common(p)
    p.add_argument("--filter", required=True)
    p.add_argument("--operator")
    p.add_argument("--range", type=float_list)
    p.add_argument("--grid", type=int, default=2000)
    _threshold(p)
    p.add_argument("--delta", type=float)
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_filter_analyze)

    p = sub.add_parser("train", help="train a network on synthetic spheres versus tori")
    _common(p)
    p.add_argument("--train-count", type=int, default=200)
    p.add_argument("--test-count", type=int, default=60)
    p.add_argument("--n", type=int, default=300)
    p.add_argument("--alpha-kernel", type=float, default=1.0)
    p.add_argument("--widths", type=int_list, default=[3, 64, 32])
    p.add_argument("--K", type=int, default=5)
    p.add_argument("--nonlinearity", choices=["relu", "abs", "tanh_normalized"], default="relu")
    p.add_argument("--lr", type=float, default=0.005)
    p.add_argument("--beta1", type=float, default=0.9)
    p.add_argument("--beta2", type=float, default=0.999)
    p.add_argument("--batch", type=int, default=10)
    p.add_argument("--epochs", type=int, default=40)
    p.add_argument("--reg-weight", type=float, default=0.0)
    p.add_argument("--a-target", type=float, default=1.0)
    p.add_argument("--b-target", type=float, default=1.0)
    p.add_argument("--seed", type=seed_type, default=0)
    p.add_argument("--data-seed", type=seed_type, default=0)
    p.add_argument("--out", required=True)
    p.add_argument("--log", help="training log CSV (default: <out>.log.csv)")
    p.set_defaults(func=cmd_train)

    p = sub.add_parser("stability", help="perturbation experiment against the closed-form bound")
    _common(p)
    _graph_source(p)
    p.add_argument("--kind", choices=["absolute", "relative", "deformation"], required=True)
    p.add_argument("--eps", type=float_list, required=True)
    p.add_argument("--trials", type=int, default=100)
    p.add_argument("--seed", type=seed_type, default=0)
    _threshold(p)
    p.add_argument("--filter", help="filter JSON; designed from --targets when absent")
    p.add_argument("--targets", type=float_list)
    p.add_argument("--K", type=int, default=5)
    p.add_argument("--range", type=float_list)
    p.add_argument("--model", help="network JSON; switches to the network experiment")
    p.add_argument("--cloud")
    p.add_argument("--intrinsic-dim", type=int, default=2)
    p.add_argument("--signal", help="signal CSV")
    p.add_argument("--signal-spec", default="first_harmonic", choices=["coordinates", "first_harmonic", "constant"])
    p.add_argument("--out", required=True)
    p.add_argument("--csv", help="per-trial CSV (default: <out>.csv)")
    p.set_defaults(func=cmd_stability)

    p = sub.add_parser("converge", help="self-convergence of a filter as n grows")
    _common(p)
    p.add_argument("--manifold", choices=["sphere2", "torus2", "plane_patch"], default="sphere2")
    p.add_argument("--n-list", type=int_list, default=[250, 500, 1000, 2000])
    p.add_argument("--filter")
    p.add_argument("--taps", type=float_list, default=[0.0, 1.0])
    p.add_argument("--signal-spec", default="first_harmonic", choices=["coordinates", "first_harmonic", "constant", "gaussian_bump"])
    p.add_argument("--bump-center", type=float_list, default=[0.0, 0.0, 1.0])
    p.add_argument("--bump-width", type=float, default=0.5)
    p.add_argument("--alpha-kernel", type=float, default=1.0)
    p.add_argument("--reference", choices=["successive", "finest"], default="successive")
    p.add_argument("--seed", type=seed_type, default=0)
    p.add_argument("--out", required=True)
    p.add_argument("--format", choices=["csv", "json"])
    p.set_defaults(func=cmd_converge)

    p = sub.add_parser("verify", help="run the lemma / filter / gradient self-checks")
    _common(p)
    p.add_argument("--suite", choices=SUITES, default="all")
    p.add_argument("--trials", type=int, default=100)
    p.add_argument("--n", type=int, default=50)
    p.add_argument("--seed", type=seed_type, default=0)
    p.add_argument("--out")
    p.set_defaults(func=cmd_verify)

    p = sub.add_parser("replay", help="re-run a manifest and compare output hashes")
    p.add_argument("manifest")
    p.add_argument("-v", "--verbose", action="store_true")
    p.set_defaults(func=cmd_replay)
    return parser


def _leaf_parser(parser, argv):
    """The subparser that handles ``argv`` (for applying config defaults)."""
    node = parser
    for tok in argv:
        subs = [a for a in node._actions if isinstance(a, argparse._SubParsersAction)]
        if not subs:
            break
        if tok in subs[0].choices:
            node = subs[0].choices[tok]
    return node


def _apply_config(parser, argv):
    """Install ``--config`` values as defaults of the subcommand's parser."""
    pre = argparse.ArgumentParser(add_help=False)
    pre.add_argument("--config")
    path = pre.parse_known_args(argv)[0].config
    if not path:
        return
    cfg = mio.read_config(path)
    leaf = _leaf_parser(parser, argv)
    known = {a.dest for a in leaf._actions}
    for key in cfg:
        if key not in known or key in ("config", "help", "func"):
            raise ParseError(f"unknown key {key!r} for this command", path, mio.config_line_of(path, key))
    # config values act as defaults, so flags given on the command line win;
    # drop required-ness for keys the config supplies
    typed = {}
    for a in leaf._actions:
        if a.dest in cfg:
            try:
                typed[a.dest] = _convert(a, cfg[a.dest])
            except (argparse.ArgumentTypeError, ValueError) as exc:
                raise ParseError(f"bad value for {a.dest!r}: {exc}", path, mio.config_line_of(path, a.dest)) from None
            a.required = False
    leaf.set_defaults(**typed)


def _convert(action, text):
    if action.nargs == 0:
        return flag_bool(text)
    value = action.type(text) if action.type else text
    if action.choices is not None and value not in action.choices:
        raise ValueError(f"{value!r} is not one of {sorted(action.choices)}")
    return value


def main(argv=None) -> int:
    argv = list(sys.argv[1:] if argv is None else argv)
    logging.basicConfig(
        level=logging.DEBUG if ("-v" in argv or "--verbose" in argv) else logging.INFO,
        format="%(levelname)s %(message)s",
        stream=sys.stderr,
        force=True,
    )
    parser = build_parser()
    try:
        if not argv or argv[0] != "replay":
            _apply_config(parser, argv)
        args = parser.parse_args(argv)
        run = Run(args, argv)
        run.input(getattr(args, "config", None))
        code = args.func(args, run)
        if args.command != "replay":
            run.manifest()
        return code
    except SystemExit as exc:
        return EXIT_OK if exc.code in (0, None) else EXIT_PARSE
    except (ParseError, ConfigurationError, DataError, UsageError) as exc:
        log.error("%s", exc)
        return EXIT_PARSE
    except (PreconditionError, DomainError, ContractError) as exc:
        log.error("%s", exc)
        return EXIT_PRECONDITION
    except InvariantError as exc:
        log.error("internal invariant breached: %s", exc)
        return EXIT_INVARIANT
    except ManistabError as exc:
        log.error("%s", exc)
        return EXIT_INVARIANT
    except Exception:
        log.exception("unexpected internal error")
        return EXIT_INVARIANT


def entry() -> None:
    sys.exit(main())


if __name__ == "__main__":
    entry()
