"""Command-line entry point: ``imro <subcommand> [flags]``.

Exit codes: 0 success, 1 runtime error, 2 usage error.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import sys
from pathlib import Path

import numpy as np

from . import bayes, datasets, metrics, ml, planner, sweep
from .influence import make_params
from .netgraph import GraphError, generate_random_graph, load_graph, save_edge_list


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(f"{self.prog}: {message}")


def _prob(text):
    v = float(text)
    if not 0.0 <= v <= 1.0:
        raise argparse.ArgumentTypeError(f"{text} is not a probability")
    return v


def _nonneg(text):
    v = float(text)
    if v < 0:
        raise argparse.ArgumentTypeError(f"{text} must be non-negative")
    return v


def _posint(text):
    v = int(text)
    if v < 1:
        raise argparse.ArgumentTypeError(f"{text} must be a positive integer")
    return v


def _values(text):
    try:
        vals = sweep.parse_values(text)
    except ValueError as exc:
        raise argparse.ArgumentTypeError(str(exc)) from None
    if not vals:
        raise argparse.ArgumentTypeError("empty value list")
    return vals


def _prior(text):
    try:
        lo, hi = (float(x) for x in text.split(","))
    except ValueError:
        raise argparse.ArgumentTypeError(f"prior {text!r} must be LOW,HIGH") from None
    return lo, hi


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--seed", type=int, default=1, help="master seed (default 1)")
    common.add_argument("--out", help="output file (stdout when omitted)")

    model = argparse.ArgumentParser(add_help=False)
    model.add_argument("--graph", default="synth1", help="synth1|synth2|synth3 or an edge-list path")
    model.add_argument("--model", choices=["gim", "nim"], default="gim")
    model.add_argument("--p0", type=_prob, default=0.25)
    model.add_argument("--alpha", type=_nonneg, default=0.25)
    model.add_argument("--beta", type=_nonneg, default=0.0)
    model.add_argument("--budget", type=_posint, default=5)
    model.add_argument("--stages", type=_posint, default=3)

    labeled = argparse.ArgumentParser(add_help=False)
    labeled.add_argument("--data", required=True, help="labeled CSV with a header row")
    labeled.add_argument("--label-column", default="label")
    labeled.add_argument("--mapping-out", help="write the category index map here")
    labeled.add_argument("--smoothing", type=_nonneg, default=1.0, help="NBC additive smoothing")
    labeled.add_argument("--max-depth", type=_posint, default=5)
    labeled.add_argument("--trees", type=_posint, default=20)
    labeled.add_argument("--hard-vote", action="store_true", help="RFC votes instead of averaging")

    p = _Parser(prog="imro", description=__doc__.splitlines()[0])
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    s = sub.add_parser("plan", parents=[common, model], help="optimal/heuristic impression plan")
    s.add_argument("--method", choices=["sdp", "ldh", "single"], default="sdp")

    s = sub.add_parser("sweep", parents=[common, model], help="one-parameter sensitivity sweep")
    s.add_argument("--param", choices=list(sweep.SWEEPABLE), required=True)
    s.add_argument("--values", type=_values, required=True, help="lo:hi:step or comma list")
    s.add_argument("--method", choices=["sdp", "ldh"], default="sdp")
    s.add_argument("--repeats", type=_posint, default=1, help="rerun and require identical output")
    s.add_argument("--workers", type=_posint, default=1)

    s = sub.add_parser("estimate-alpha", parents=[common], help="MCMC posterior for alpha")
    s.add_argument("--data", help="CSV post_id,reposts,outcome (empty dataset when omitted)")
    s.add_argument("--name", help="dataset label in the summary (default: file stem)")
    s.add_argument("--avg-friends", type=float, help="F; defaults to mean reposts")
    s.add_argument("--p0", type=_prob, default=0.05)
    s.add_argument("--prior", type=_prior, help="LOW,HIGH of the uniform prior")
    s.add_argument("--prior-low", type=float)
    s.add_argument("--prior-high", type=float)
    s.add_argument("--chains", type=_posint, default=3)
    s.add_argument("--iters", type=_posint, default=10_000)
    s.add_argument("--burn-in", type=int, default=1_000)
    s.add_argument("--thin", type=_posint, default=5)
    s.add_argument("--proposal-sd", type=float)
    s.add_argument("--lag-max", type=_posint, default=50)
    s.add_argument("--draws-out", help="write kept draws (chain,draw,alpha) here")

    s = sub.add_parser("estimate-p0", parents=[common, labeled], help="classifier-based p0")
    s.add_argument("--classifier", choices=["nbc", "dtc", "rfc"], default="rfc")
    s.add_argument("--samples", type=_posint, default=100)
    s.add_argument("--model-out", help="write a JSON summary of the trained model here")

    s = sub.add_parser("crossval", parents=[common, labeled], help="k-fold AUC/accuracy")
    s.add_argument("--folds", type=_posint, default=5)
    s.add_argument("--classifiers", default="nbc,dtc,rfc")
    s.add_argument("--threshold", type=_prob, default=0.5)

    s = sub.add_parser("generate", parents=[common], help="synthetic datasets and graphs")
    s.add_argument("--kind", choices=["repost", "planted", "graph"], required=True)
    s.add_argument("--size", type=_posint, default=1000, help="rows (repost/planted)")
    s.add_argument("--alpha-true", type=_nonneg, default=1.5)
    s.add_argument("--p0", type=_prob, default=0.05)
    s.add_argument("--avg-friends", type=float, default=20.0)
    s.add_argument("--mean-reposts", type=_nonneg, default=1.0)
    s.add_argument("--features", type=_posint, default=10)
    s.add_argument("--informative", type=_posint, default=3)
    s.add_argument("--noise", type=_nonneg, default=0.1)
    s.add_argument("--nodes", type=_posint, default=2000)
    s.add_argument("--edge-prob", type=_prob, default=4.0 / 1999)
    return p


def _emit(text: str, path) -> None:
    if path:
        Path(path).write_text(text)
    else:
        sys.stdout.write(text)


def _csv(rows) -> str:
    buf = io.StringIO()
    csv.writer(buf, lineterminator="\n").writerows(rows)
    return buf.getvalue()


def _cmd_plan(a):
    graph = load_graph(a.graph)
    cfg = planner.CampaignConfig(a.stages, a.budget, make_params(a.model, a.p0, a.alpha, a.beta))
    res = planner.plan_value(a.method, cfg, graph)
    alloc = " ".join(str(i) for i in res.first_stage_allocation)
    print(f"expected_clicks: {res.expected_clicks!r}")
    print(f"stage1_allocation: {alloc}")
    if a.out:
        _emit(_csv([["method", "model", "expected_clicks", "stage1_allocation"],
                    [res.method, a.model.upper(), repr(res.expected_clicks), alloc]]), a.out)


def _cmd_sweep(a):
    spec = a.sweep_spec
    graph = load_graph(a.graph)
    if a.method == "sdp":
        planner.DEFAULT_GUARD.check(planner.CampaignConfig(a.stages, a.budget, spec.params_at(a.values[0])), graph)
    rows = sweep.run_sweep(spec, graph, workers=a.workers)
    for _ in range(a.repeats - 1):
        if sweep.run_sweep(spec, graph, workers=a.workers) != rows:
            raise RuntimeError("repeated sweep produced different results")
    _emit(sweep.sweep_csv(spec, rows), a.out)


def _cmd_estimate_alpha(a):
    prior, cfg = a.prior_spec, a.mcmc
    if a.data:
        data = datasets.read_repost_csv(a.data, a.avg_friends, a.p0)
        name = a.name or Path(a.data).stem
    else:
        data = datasets.RepostDataset.empty(a.avg_friends or 1.0, a.p0)
        name = a.name or "empty"
    run = bayes.sample_posterior(data, prior, cfg, lag_max=a.lag_max)
    if run.low_acceptance:
        print(f"warning: acceptance rate {run.acceptance_rate:.4f} below 1%", file=sys.stderr)
    _emit(_csv([bayes.SUMMARY_HEADER, bayes.summary_row(name, run)]), a.out)
    if a.draws_out:
        rows = [["chain", "draw", "alpha"]]
        for c, chain in enumerate(run.draws):
            rows.extend([c, k, repr(float(v))] for k, v in enumerate(chain))
        Path(a.draws_out).write_text(_csv(rows))


def _train(name, data, a, seed):
    if name == "nbc":
        return ml.train_nbc(data, a.smoothing)
    if name == "dtc":
        return ml.train_dtc(data, a.max_depth)
    return ml.train_rfc(data, a.trees, a.max_depth, seed, hard_vote=a.hard_vote)


def _cmd_estimate_p0(a):
    data = datasets.read_labeled_csv(a.data, a.label_column)
    if a.mapping_out:
        datasets.write_category_map(data, a.mapping_out)
    model = _train(a.classifier, data, a, a.seed)
    rng = np.random.default_rng(a.seed)
    idx = rng.choice(len(data), size=a.samples, replace=a.samples > len(data))
    p0 = ml.estimate_p0(model, data.X[idx])
    _emit(_csv([["classifier", "samples", "p0"], [a.classifier.upper(), a.samples, repr(p0)]]), a.out)
    if a.model_out:
        Path(a.model_out).write_text(json.dumps(model.to_dict(), indent=1, sort_keys=True) + "\n")


def _cmd_crossval(a):
    names = a.classifier_list
    data = datasets.read_labeled_csv(a.data, a.label_column)
    if a.mapping_out:
        datasets.write_category_map(data, a.mapping_out)
    rows = [["classifier", "fold", "auc", "accuracy"]]
    for n in names:
        res = metrics.cross_validate(data, a.folds, lambda d, n=n: _train(n, d, a, a.seed), a.seed, a.threshold)
        for k, (au, ac) in enumerate(zip(res.fold_auc, res.fold_accuracy)):
            rows.append([n.upper(), k, repr(au), repr(ac)])
        rows.append([n.upper(), "mean", repr(res.mean_auc), repr(res.mean_accuracy)])
    _emit(_csv(rows), a.out)


def _cmd_generate(a):
    if a.kind == "graph":
        g = generate_random_graph(a.nodes, a.edge_prob, a.seed)
        if a.out:
            save_edge_list(g, a.out)
        else:
            sys.stdout.write("".join(f"{i} {j}\n" for i, j in g.sorted_edges()))
        return
    target = a.out or sys.stdout
    if a.kind == "repost":
        data = datasets.generate_repost_data(datasets.RepostSpec(
            a.size, a.seed, a.alpha_true, a.p0, a.avg_friends, a.mean_reposts))
        datasets.write_repost_csv(data, target)
    else:
        data = datasets.generate_planted_rule(datasets.PlantedRuleSpec(
            a.size, a.seed, a.features, a.informative, a.noise))
        datasets.write_labeled_csv(data, target)


def _validate(a):
    """Semantic flag checks; runs before any computation or output."""
    try:
        if a.command == "sweep":
            fixed = {"p0": a.p0, "alpha": a.alpha, "beta": a.beta}
            a.sweep_spec = sweep.SweepSpec(a.param, a.values, a.model, a.method, a.graph,
                                           a.stages, a.budget, fixed)
        elif a.command == "estimate-alpha":
            if a.prior is not None:
                lo, hi = a.prior
            else:
                lo = 0.0 if a.prior_low is None else a.prior_low
                hi = 5.0 if a.prior_high is None else a.prior_high
            a.prior_spec = bayes.PriorSpec(lo, hi)
            a.mcmc = bayes.McmcConfig(a.chains, a.iters, a.burn_in, a.thin, a.seed, a.proposal_sd)
        elif a.command == "crossval":
            names = [n.strip().lower() for n in a.classifiers.split(",") if n.strip()]
            bad = [n for n in names if n not in ("nbc", "dtc", "rfc")]
            if bad or not names:
                raise ValueError(f"unknown classifier(s) {bad or names}")
            a.classifier_list = names
        elif a.command == "generate" and a.kind == "planted":
            datasets.PlantedRuleSpec(a.size, a.seed, a.features, a.informative, a.noise)
    except ValueError as exc:
        raise UsageError(f"imro {a.command}: {exc}") from None


COMMANDS = {
    "plan": _cmd_plan,
    "sweep": _cmd_sweep,
    "estimate-alpha": _cmd_estimate_alpha,
    "estimate-p0": _cmd_estimate_p0,
    "crossval": _cmd_crossval,
    "generate": _cmd_generate,
}


def run(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        resolved = dict(vars(args))
        _validate(args)
        print("config: " + json.dumps(resolved, sort_keys=True, default=str), file=sys.stderr)
        COMMANDS[args.command](args)
    except UsageError as exc:
        print(f"usage error: {exc}", file=sys.stderr)
        return 2
    except planner.PlannerSizeError as exc:
        print(f"size error: {exc}", file=sys.stderr)
        return 1
    except FileNotFoundError as exc:
        print(f"missing file: {exc.filename or exc}", file=sys.stderr)
        return 1
    except (ValueError, GraphError, RuntimeError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    return 0


def main():
    sys.exit(run())
