"""Command line entry point: ``topodec <command> [flags]``."""
from __future__ import annotations

import argparse
import csv
import logging
import os
import sys

from . import bench, mlp
from .codes import CODE_KINDS, build_lattice, export_lattice, validate
from .decoders import MLDecoder, MWPMDecoder, NeuralDecoder, RemovalDecoder
from .exgraph import batch_removal, build_graph, dump_graph
from .noise import NOISE_KINDS, model_for_effective_rate, sample_batch
from .pauli import PauliOperator, batch_logical_class, batch_syndrome

DEFAULTS = {
    "code": "color", "distance": "5", "noise": "bitphase", "p_eff": "0.1", "trials": "20000", "seed": "0",
    "decoder": "auto", "backend": "pymatching", "curriculum": "on", "dtype": "float64",
}
INT_KEYS = {"trials", "seed", "hidden_layers", "width", "batch_size", "steps", "log_every"}
FLOAT_KEYS = {"learning_rate"}

log = logging.getLogger("topodec")


class UsageError(Exception):
    pass


def read_config(path: str) -> dict[str, str]:
    """Flat ``key = value`` file; ``#`` starts a comment; keys use CLI flag names."""
    out = {}
    with open(path, encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, 1):
            line = line.split("#", 1)[0].strip()
            if not line:
                continue
            if "=" not in line:
                raise UsageError(f"{path}:{lineno}: expected key = value")
            key, val = (t.strip() for t in line.split("=", 1))
            out[key.replace("-", "_")] = val
    return out


def _parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    g = common.add_argument_group("common")
    g.add_argument("--code", choices=CODE_KINDS)
    g.add_argument("--distance", help="odd distance or comma list, e.g. 5,7")
    g.add_argument("--noise", choices=NOISE_KINDS)
    g.add_argument("--p-eff", dest="p_eff", help="value, comma list, or start:stop:step")
    g.add_argument("--trials", type=int)
    g.add_argument("--seed", type=int)
    g.add_argument("--config", help="key = value file; command line flags take precedence")
    g.add_argument("--out", help="output path (stdout when omitted)")
    g.add_argument("--decoder", choices=["auto", "neural", "mwpm", "removal", "ml"])
    g.add_argument("--backend", choices=["pymatching", "blossom"], help="matching backend")
    g.add_argument("--model", help="trained model file (single distance)")
    g.add_argument("--model-dir", dest="model_dir", help="directory of <code>-<noise>-d<d>.model files")
    g.add_argument("--json", help="JSON mirror of the threshold CSV")
    g.add_argument("--graph", help="also write the excitation graph (build)")
    g.add_argument("--log", help="training log CSV (train)")
    g.add_argument("--hidden-layers", dest="hidden_layers", type=int)
    g.add_argument("--width", type=int)
    g.add_argument("--batch-size", dest="batch_size", type=int)
    g.add_argument("--steps", type=int)
    g.add_argument("--learning-rate", dest="learning_rate", type=float)
    g.add_argument("--curriculum", choices=["on", "off"])
    g.add_argument("--dtype", choices=["float64", "float32"])
    g.add_argument("--log-every", dest="log_every", type=int)
    g.add_argument("-v", "--verbose", action="store_true")

    p = argparse.ArgumentParser(prog="topodec", description="Neural decoders for 2D topological codes.")
    sub = p.add_subparsers(dest="command", required=True)
    for name, text in [("build", "write and validate lattice files"),
                       ("sample", "dump errors, syndromes and removal classes"),
                       ("train", "train a neural decoder and save the model"),
                       ("evaluate", "estimate failure rates at one or more p_eff values"),
                       ("threshold", "sweep p_eff over distances and locate the curve crossing"),
                       ("oracle", "maximum-likelihood failure rate for tiny codes")]:
        sub.add_parser(name, parents=[common], help=text, description=text)
    return p


def _settings(args: argparse.Namespace) -> dict:
    cfg = dict(DEFAULTS)
    if args.config:
        cfg.update(read_config(args.config))
    for key, val in vars(args).items():
        if val is not None and key not in ("command", "config", "verbose"):
            cfg[key] = str(val)
    out: dict = {}
    for key, val in cfg.items():
        try:
            if key in INT_KEYS:
                out[key] = int(val)
            elif key in FLOAT_KEYS:
                out[key] = float(val)
            else:
                out[key] = val
        except ValueError:
            raise UsageError(f"invalid value for {key}: {val!r}") from None
    if out["code"] not in CODE_KINDS:
        raise UsageError(f"unknown code {out['code']!r}")
    if out["noise"] not in NOISE_KINDS:
        raise UsageError(f"unknown noise {out['noise']!r}")
    try:
        out["distances"] = [int(t) for t in str(out["distance"]).split(",")]
        out["p_effs"] = bench.parse_p_range(str(out["p_eff"]))
    except ValueError as exc:
        raise UsageError(str(exc)) from None
    if not out["p_effs"]:
        raise UsageError("no p_eff values given")
    return out


def _write(text: str, path: str | None) -> None:
    if path is None or path == "-":
        sys.stdout.write(text)
    else:
        with open(path, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)


def _single(values: list, what: str):
    if len(values) != 1:
        raise UsageError(f"this command takes a single {what}")
    return values[0]


def model_path(model_dir: str, code: str, noise: str, d: int) -> str:
    return os.path.join(model_dir, f"{code}-{noise}-d{d}.model")


def _decoder_factory(s: dict):
    choice = s["decoder"]
    if choice == "auto":
        if s.get("model") or s.get("model_dir"):
            choice = "neural"
        else:
            choice = "mwpm" if s["code"] == "toric" else "removal"
        print(f"decoder: {choice}", file=sys.stderr)

    def make(lattice, graph):
        if choice == "removal":
            return RemovalDecoder(graph)
        if choice == "mwpm":
            return MWPMDecoder(graph, s["backend"])
        if choice == "ml":
            return MLDecoder(graph, model_for_effective_rate(s["noise"], s["p_effs"][0], lattice))
        path = s.get("model")
        if path is None:
            if not s.get("model_dir"):
                raise UsageError("neural decoding needs --model or --model-dir")
            path = model_path(s["model_dir"], lattice.code_kind, s["noise"], lattice.distance)
        if not os.path.exists(path):
            raise UsageError(f"model file {path} not found")
        net, _ = mlp.load_model(path, lattice)
        return NeuralDecoder(graph, net)

    return make


def cmd_build(s: dict) -> None:
    texts = []
    for d in s["distances"]:
        lat = build_lattice(s["code"], d)
        rep = validate(lat)
        print(f"{s['code']} d={d} n={lat.n} generators={lat.num_generators} fingerprint={lat.fingerprint}",
              file=sys.stderr)
        print(rep, file=sys.stderr)
        if not rep.ok:
            raise RuntimeError(f"lattice failed validation: {rep.failures()}")
        texts.append(export_lattice(lat))
        if s.get("graph"):
            _write(dump_graph(build_graph(lat)), s["graph"])
    if s.get("out") and len(texts) > 1:
        raise UsageError("--out takes a single distance")
    _write("".join(texts), s.get("out"))


def cmd_sample(s: dict) -> None:
    d = _single(s["distances"], "distance")
    p = _single(s["p_effs"], "p_eff")
    lat = build_lattice(s["code"], d)
    graph = build_graph(lat)
    errors = sample_batch(model_for_effective_rate(s["noise"], p, lat), lat,
                          bench.trial_stream(s["seed"], lat, s["noise"], p, 0), s["trials"])
    syn = batch_syndrome(errors, lat.stabilizers)
    cls = batch_logical_class(batch_removal(syn, graph) ^ errors, lat.logical_x, lat.logical_z)
    lines = ["error,syndrome,class"]
    for e, sy, c in zip(errors, syn, cls):
        lines.append(f"{PauliOperator.from_vector(e)},{''.join(map(str, sy))},{'IXYZ'[c]}")
    _write("\n".join(lines) + "\n", s.get("out"))


def cmd_train(s: dict) -> None:
    d = _single(s["distances"], "distance")
    p = _single(s["p_effs"], "p_eff")
    if not s.get("out"):
        raise UsageError("train needs --out for the model file")
    lat = build_lattice(s["code"], d)
    graph = build_graph(lat)
    overrides = {k: s[k] for k in ("hidden_layers", "width", "batch_size", "steps", "learning_rate", "log_every")
                 if k in s}
    overrides["curriculum"] = s["curriculum"] == "on"
    overrides["dtype"] = s["dtype"]
    config = mlp.default_config(s["code"], s["noise"], d, **overrides)
    noise = model_for_effective_rate(s["noise"], p, lat)
    log_rows = []

    def report(rec):
        log_rows.append(rec)
        print(f"step {rec['step']} stage {rec['stage']} p_eff {rec['p_eff']:.4f} "
              f"loss {rec['loss']:.5f} acc {rec['accuracy']:.4f}", file=sys.stderr)

    net, tlog = mlp.train(lat, graph, noise, config, s["seed"], callback=report)
    mlp.save_model(net, s["out"], mlp.config_metadata(config, tlog, code=s["code"], noise=s["noise"],
                                                      distance=d, p_eff=p, seed=s["seed"]))
    log_path = s.get("log") or s["out"] + ".log.csv"
    with open(log_path, "w", encoding="utf-8", newline="") as fh:
        w = csv.DictWriter(fh, ["step", "stage", "p_eff", "loss", "accuracy"], lineterminator="\n")
        w.writeheader()
        w.writerows(log_rows)
    print(f"samples_seen={tlog.samples_seen} final_accuracy={tlog.final_accuracy:.4f}", file=sys.stderr)


def cmd_evaluate(s: dict) -> None:
    points = bench.run_sweep(s["code"], s["noise"], s["distances"], s["p_effs"], s["trials"], s["seed"],
                             _decoder_factory(s))
    _write(bench.format_csv(points), s.get("out"))


def cmd_threshold(s: dict) -> None:
    def progress(pt):
        print(f"d={pt.distance} p_eff={pt.p_eff:.4f} p_fail={pt.p_fail:.5f}", file=sys.stderr)

    points = bench.run_sweep(s["code"], s["noise"], s["distances"], s["p_effs"], s["trials"], s["seed"],
                             _decoder_factory(s), progress)
    est = bench.find_threshold(points)
    _write(bench.format_csv(points, est), s.get("out"))
    json_path = s.get("json")
    if json_path is None and s.get("out") and s["out"] != "-":
        json_path = os.path.splitext(s["out"])[0] + ".json"
    if json_path:
        _write(bench.format_json(points, est), json_path)


def cmd_oracle(s: dict) -> None:
    s = dict(s, decoder="ml")
    cmd_evaluate(s)


COMMANDS = {"build": cmd_build, "sample": cmd_sample, "train": cmd_train, "evaluate": cmd_evaluate,
            "threshold": cmd_threshold, "oracle": cmd_oracle}


def main(argv=None) -> int:
    args = _parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        settings = _settings(args)
        COMMANDS[args.command](settings)
    except (UsageError, ValueError, RuntimeError, OSError) as exc:
        print(f"topodec {args.command}: error: {exc}", file=sys.stderr)
        return 1
    return 0


if __name__ == "__main__":
    sys.exit(main())
