"""Command-line front end.

Every command writes its outputs plus a ``provenance.json`` into ``--out``
(default: ``$TSGEVAL_OUT`` or ``./tsgeval_out``). Options may also come from a
JSON ``--config`` file; explicit flags win. Exit codes: 0 ok, 2 input error,
3 shape/contract error, 4 numeric/degenerate error.
"""

from __future__ import annotations

import argparse
import hashlib
import json
import logging
import os
import subprocess
import sys
from pathlib import Path

from . import __version__, da, measures, preprocess, rankstats, sine, tensor, viz
from .errors import InputError, TsgError

log = logging.getLogger("tsgeval")

# per-command defaults; argparse flags default to None so config files can fill gaps
DEFAULTS = {
    "preprocess": {"header": False, "seq_len": "auto", "stride": 1, "split_ratio": 0.9,
                   "seed": 0, "no_normalize": False, "max_lag": None},
    "evaluate": {"bins": 50, "pairing": "nearest-neighbor", "repeats": 5, "acf_max_lag": None,
                 "nn_subsample": None, "seed": 0, "external": None},
    "robustness": {"seq_len": [24, 125], "seed": 0, "r_count": 10000, "dim_count": 5,
                   "shared": False, "bins": 50, "pairing": "nearest-neighbor", "repeats": 5},
    "da build": {"kind": "all", "hist_fraction": 0.1, "seed": 0, "source_test": None,
                 "source_name": "source", "target_name": "target"},
    "da evaluate": {"bins": 50, "pairing": "nearest-neighbor", "repeats": 5, "seed": 0,
                    "acf_max_lag": None, "nn_subsample": None},
    "rank": {"alpha": 0.05},
    "viz tsne": {"perplexity": 30.0, "iters": 1000, "seed": 0, "cap": 2000},
    "viz dist": {"bins": 50, "mode": "hist"},
    "datasets": {"json": False},
    "run-external": {"label": "training"},
}


def _file_digest(path) -> str:
    h = hashlib.sha256()
    with open(path, "rb") as fh:
        for chunk in iter(lambda: fh.read(1 << 20), b""):
            h.update(chunk)
    return h.hexdigest()


def _write(out: Path, name: str, text: str) -> Path:
    path = out / name
    path.write_text(text)
    return path


def _provenance(out: Path, command: str, params: dict, inputs: dict) -> None:
    record = {
        "tool": "tsgeval",
        "version": __version__,
        "command": command,
        "params": params,
        "inputs": {k: {"path": str(v), "sha256": _file_digest(v)} for k, v in inputs.items()
                   if v is not None},
    }
    _write(out, "provenance.json", json.dumps(record, indent=2, sort_keys=True) + "\n")


def _measure_cfg(p) -> measures.MeasureConfig:
    return measures.MeasureConfig(
        histogram_bins=p["bins"], acf_max_lag=p.get("acf_max_lag"), pairing=p["pairing"],
        repeats=p["repeats"], nn_subsample=p.get("nn_subsample"), seed=p["seed"])


def cmd_preprocess(p, out):
    raw = tensor.load_raw_csv(p["input"], has_header=p["header"])
    seq_len = p["seq_len"]
    if seq_len != "auto":
        seq_len = int(seq_len)
    cfg = preprocess.PreprocessConfig(seq_len=seq_len, stride=p["stride"],
                                      split_ratio=p["split_ratio"], shuffle_seed=p["seed"],
                                      normalize=not p["no_normalize"], max_lag=p["max_lag"])
    train, test, scaler, l = preprocess.run_pipeline(raw, cfg)
    tensor.save_tensor(train, out / "train.tsgt")
    tensor.save_tensor(test, out / "test.tsgt")
    if scaler is not None:
        scaler.save(out / "scaler.csv")
    summary = {"seq_len": l, "train_shape": list(train.shape), "test_shape": list(test.shape),
               "columns": list(raw.columns) if raw.columns else None}
    _write(out, "summary.json", json.dumps(summary, indent=2) + "\n")
    _provenance(out, "preprocess", p, {"input": p["input"]})
    print(json.dumps(summary))


def _load_external(path):
    if path is None:
        return {}
    path = Path(path)
    if not path.is_file():
        raise InputError(f"input not found: {path}")
    return json.loads(path.read_text())


def cmd_evaluate(p, out):
    orig = tensor.load_tensor(p["orig"])
    gen = tensor.load_tensor(p["gen"])
    report = measures.run_suite(orig, gen, _measure_cfg(p))
    report.merge_external(_load_external(p["external"]))
    _write(out, "report.json", report.to_json())
    _provenance(out, "evaluate", p, {"orig": p["orig"], "gen": p["gen"], "external": p["external"]})
    print(json.dumps({k: v[0] for k, v in report.entries.items()}))


def cmd_robustness(p, out):
    cfg = _measure_cfg({**p, "acf_max_lag": None, "nn_subsample": None})
    tables = {}
    for l in p["seq_len"]:
        tables[int(l)] = sine.run_robustness(int(l), p["seed"], cfg, p["r_count"],
                                             p["dim_count"], p["shared"])
    rows = sine.robustness_rows(tables, p["r_count"], p["dim_count"])
    _write(out, "robustness.csv", sine.robustness_csv(rows))
    _write(out, "robustness.json", sine.robustness_json(rows))
    _provenance(out, "robustness", p, {})
    sys.stdout.write(sine.robustness_csv(rows))


def cmd_da_build(p, out):
    source_train = tensor.load_tensor(p["source_train"])
    source_test = tensor.load_tensor(p["source_test"]) if p["source_test"] else None
    target = tensor.load_tensor(p["target"])
    hist, gt = da.split_domain(target, p["hist_fraction"], p["seed"])
    data = da.DomainData(source_train, hist, gt, source_test, p["source_name"], p["target_name"])
    kinds = da.KINDS if p["kind"] == "all" else (p["kind"],)
    gt_path = out / "target_gt.tsgt"
    tensor.save_tensor(gt, gt_path)
    tensor.save_tensor(hist, out / "target_hist.tsgt")
    built = {}
    for kind in kinds:
        scen = da.build(kind, data, p["seed"])
        train_path = out / f"training_{kind}.tsgt"
        tensor.save_tensor(scen.training_set, train_path)
        da.write_manifest(out / f"manifest_{kind}.json", kind=kind,
                          source_name=p["source_name"], target_name=p["target_name"],
                          training_path=train_path.name, gt_path=gt_path.name,
                          hist_fraction=p["hist_fraction"], seeds={"split": p["seed"],
                                                                   "shuffle": p["seed"]})
        built[kind] = scen.training_set.shape[0]
    _provenance(out, "da build", p, {"source_train": p["source_train"],
                                     "source_test": p["source_test"], "target": p["target"]})
    print(json.dumps({"training_windows": built, "ground_truth_windows": gt.shape[0]}))


def cmd_da_evaluate(p, out):
    manifest_path = Path(p["manifest"])
    manifest = da.read_manifest(manifest_path)
    base = manifest_path.parent
    gt_path = base / manifest["ground_truth_tensor"]
    train_path = base / manifest["training_tensor"]
    gt = tensor.load_tensor(gt_path)
    scen = da.DaScenario(manifest["kind"], tensor.load_tensor(train_path), gt,
                         manifest.get("source", "source"), manifest.get("target", "target"))
    gen = tensor.load_tensor(p["gen"])
    report = da.evaluate_da(gen, scen, _measure_cfg(p))
    report.provenance["scenario"] = manifest["kind"]
    _write(out, "report.json", report.to_json())
    _provenance(out, "da evaluate", p, {"manifest": manifest_path, "gen": p["gen"],
                                        "ground_truth": gt_path})
    print(json.dumps({k: v[0] for k, v in report.entries.items()}))


def cmd_rank(p, out):
    table = rankstats.read_score_csv(p["scores"])
    res = rankstats.analyze(table, p["alpha"])
    _write(out, "rank.json", res.to_json())
    _write(out, "tiers.csv", res.tier_csv())
    _provenance(out, "rank", p, {"scores": p["scores"]})
    sys.stdout.write(res.tier_csv())


def cmd_viz_tsne(p, out):
    emb = viz.tsne_embed(tensor.load_tensor(p["orig"]), tensor.load_tensor(p["gen"]),
                         p["perplexity"], p["iters"], p["seed"], p["cap"])
    _write(out, "tsne.csv", emb.to_csv())
    _write(out, "tsne_kl.json", json.dumps({"kl_trace": emb.kl_trace, "params": emb.params},
                                           indent=2) + "\n")
    _provenance(out, "viz tsne", p, {"orig": p["orig"], "gen": p["gen"]})


def cmd_viz_dist(p, out):
    dd = viz.distribution_data(tensor.load_tensor(p["orig"]), tensor.load_tensor(p["gen"]),
                               p["bins"], p["mode"])
    _write(out, "distribution.csv", dd.to_csv())
    _provenance(out, "viz dist", p, {"orig": p["orig"], "gen": p["gen"]})


def cmd_datasets(p, out):
    metas = tensor.registry()
    if p["json"]:
        print(json.dumps([m.__dict__ for m in metas], indent=2))
        return
    print(f"{'name':<12} {'R':>7} {'l':>4} {'N':>3}  domain")
    for m in metas:
        print(f"{m.name:<12} {m.r_count:>7} {m.seq_len:>4} {m.dim_count:>3}  {m.domain}")


def cmd_run_external(p, out):
    argv = p["cmd"]
    if argv and argv[0] == "--":
        argv = argv[1:]
    if not argv:
        raise InputError("run-external needs a command after --")
    try:
        proc, seconds = measures.timed(p["label"], subprocess.run, argv)
    except FileNotFoundError:
        raise InputError(f"input not found: command {argv[0]!r}") from None
    record = {"label": p["label"], "command": argv, "returncode": proc.returncode,
              "wall_clock_seconds": seconds}
    _write(out, "timing.json", json.dumps(record, indent=2) + "\n")
    _provenance(out, "run-external", {"label": p["label"], "cmd": argv}, {})
    print(json.dumps(record))
    if proc.returncode != 0:
        raise TsgError(f"external command exited with {proc.returncode}")


COMMANDS = {
    "preprocess": cmd_preprocess, "evaluate": cmd_evaluate, "robustness": cmd_robustness,
    "da build": cmd_da_build, "da evaluate": cmd_da_evaluate, "rank": cmd_rank,
    "viz tsne": cmd_viz_tsne, "viz dist": cmd_viz_dist, "datasets": cmd_datasets,
    "run-external": cmd_run_external,
}


def _measure_flags(sp):
    sp.add_argument("--bins", type=int)
    sp.add_argument("--pairing", choices=["index", "nearest-neighbor"])
    sp.add_argument("--repeats", type=int)
    sp.add_argument("--acf-max-lag", type=int)
    sp.add_argument("--nn-subsample", type=int)


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", help="JSON file with option values")
    common.add_argument("--out", help="output directory")
    common.add_argument("--seed", type=int)
    common.add_argument("-v", "--verbose", action="store_true")

    parser = argparse.ArgumentParser(prog="tsgeval", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=__version__)
    sub = parser.add_subparsers(dest="command", required=True)

    sp = sub.add_parser("preprocess", parents=[common], help="window, split and scale a raw CSV")
    sp.add_argument("input")
    sp.add_argument("--header", action="store_true", default=None)
    sp.add_argument("--seq-len")
    sp.add_argument("--stride", type=int)
    sp.add_argument("--split-ratio", type=float)
    sp.add_argument("--max-lag", type=int)
    sp.add_argument("--no-normalize", action="store_true", default=None)

    sp = sub.add_parser("evaluate", parents=[common], help="score generated vs original tensors")
    sp.add_argument("orig")
    sp.add_argument("gen")
    _measure_flags(sp)
    sp.add_argument("--external", help="JSON of externally computed measures to merge")

    sp = sub.add_parser("robustness", parents=[common], help="sine-wave robustness table")
    sp.add_argument("--seq-len", type=int, action="append")
    sp.add_argument("--r-count", type=int)
    sp.add_argument("--dim-count", type=int)
    sp.add_argument("--shared", action="store_true", default=None,
                    help="share (eta, theta) across dimensions of a window")
    sp.add_argument("--bins", type=int)
    sp.add_argument("--pairing", choices=["index", "nearest-neighbor"])
    sp.add_argument("--repeats", type=int)

    sp = sub.add_parser("da", help="domain-adaptation scenarios")
    dsub = sp.add_subparsers(dest="da_command", required=True)
    b = dsub.add_parser("build", parents=[common])
    b.add_argument("source_train")
    b.add_argument("target", help="full target-domain tensor")
    b.add_argument("--source-test")
    b.add_argument("--kind", choices=["all", *da.KINDS])
    b.add_argument("--hist-fraction", type=float)
    b.add_argument("--source-name")
    b.add_argument("--target-name")
    e = dsub.add_parser("evaluate", parents=[common])
    e.add_argument("manifest")
    e.add_argument("gen")
    _measure_flags(e)

    sp = sub.add_parser("rank", parents=[common], help="Friedman/Conover ranking of methods")
    sp.add_argument("scores")
    sp.add_argument("--alpha", type=float)

    sp = sub.add_parser("viz", help="plot data (t-SNE, distributions)")
    vsub = sp.add_subparsers(dest="viz_command", required=True)
    t = vsub.add_parser("tsne", parents=[common])
    t.add_argument("orig")
    t.add_argument("gen")
    t.add_argument("--perplexity", type=float)
    t.add_argument("--iters", type=int)
    t.add_argument("--cap", type=int)
    d = vsub.add_parser("dist", parents=[common])
    d.add_argument("orig")
    d.add_argument("gen")
    d.add_argument("--bins", type=int)
    d.add_argument("--mode", choices=["hist", "kde"])

    sp = sub.add_parser("datasets", parents=[common], help="print the dataset registry")
    sp.add_argument("--json", action="store_true", default=None)

    sp = sub.add_parser("run-external", parents=[common],
                        help="run a generator command and record its wall-clock time")
    sp.add_argument("--label")
    sp.add_argument("cmd", nargs=argparse.REMAINDER)
    return parser


def _resolve(args) -> tuple[str, dict]:
    name = args.command
    if name == "da":
        name = f"da {args.da_command}"
    elif name == "viz":
        name = f"viz {args.viz_command}"
    config = {}
    if args.config:
        cpath = Path(args.config)
        if not cpath.is_file():
            raise InputError(f"input not found: {cpath}")
        try:
            config = json.loads(cpath.read_text())
        except json.JSONDecodeError as exc:
            raise InputError(f"{cpath}: invalid JSON ({exc})") from None
    skip = {"command", "da_command", "viz_command", "config", "out", "verbose"}
    params = {}
    for key, val in vars(args).items():
        if key in skip:
            continue
        if val is None:
            val = config.get(key, DEFAULTS[name].get(key))
        params[key] = val
    for key, val in DEFAULTS[name].items():
        params.setdefault(key, config.get(key, val))
    return name, params


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        name, params = _resolve(args)
        out = Path(args.out or os.environ.get("TSGEVAL_OUT", "tsgeval_out"))
        if name != "datasets":
            out.mkdir(parents=True, exist_ok=True)
        COMMANDS[name](params, out)
    except TsgError as exc:
        print(f"tsgeval: error code={exc.exit_code} kind={type(exc).__name__}: {exc}",
              file=sys.stderr)
        return exc.exit_code
    return 0


if __name__ == "__main__":
    sys.exit(main())
