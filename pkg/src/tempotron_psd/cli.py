"""Command-line entry point.

Subcommands cover the full pipeline: ``generate`` synthesizes a labeled
pulse CSV, ``encode`` dumps spike patterns, ``train`` fits and saves a
model, ``eval`` scores a model or exports predictions, ``baseline`` runs
the classical discriminators, and ``report`` merges result files into a
comparison table.

Every flag has a dotted config-file equivalent (see ``config.py``);
``--config FILE`` loads defaults, explicit flags override. Exit codes:
0 success, 2 bad configuration, 3 file problems, 4 domain errors (for
example an unlabeled dataset passed to ``train``).
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

from . import baselines as bl
from .augment import AugmentConfig
from .config import Option, check_known_keys, parse_bool, parse_config_file, resolve
from .encoding import GrfBank, dump_pattern, encode_dataset
from .errors import (
    BadLabel,
    BadTimeConstants,
    Empty,
    InvalidConfig,
    ParseError,
    RaggedRows,
    TempotronError,
)
from .fileio import write_text_atomic
from .metrics import evaluate, export_report
from .neuron import classify_batch, load_model, save_model
from .pulses import (
    Dataset,
    SyntheticConfig,
    generate_synthetic,
    load_dataset,
    normalize_dataset,
    save_dataset,
)
from .training import TrainConfig, train


def _methods(raw: str) -> tuple:
    names = tuple(m.strip() for m in str(raw).split(",") if m.strip())
    bad = [m for m in names if m not in bl.METHODS]
    if bad or not names:
        raise InvalidConfig(f"methods must be drawn from {bl.METHODS}, got {raw!r}")
    return names


def _paths(raw: str) -> tuple:
    parts = tuple(p.strip() for p in str(raw).split(",") if p.strip())
    if not parts:
        raise InvalidConfig("need at least one input file")
    return parts


SEED = Option("seed", int, 0, "global random seed")

_SYN = SyntheticConfig()  # single source of generator defaults

OPTIONS = {
    "generate": [
        SEED,
        Option("generate.out", str, required=True, help="output pulse CSV"),
        Option("synthetic.n_per_class", int, _SYN.n_per_class, "pulses per class"),
        Option("synthetic.length", int, _SYN.length, "samples per pulse"),
        Option("synthetic.rise", float, _SYN.rise, "rise time constant, samples"),
        Option("synthetic.fast_decay", float, _SYN.fast_decay, "fast decay constant, samples"),
        Option("synthetic.slow_decay", float, _SYN.slow_decay, "slow decay constant, samples"),
        Option("synthetic.gamma_slow_fraction", float, _SYN.gamma_slow_fraction,
               "slow-component weight, gammas"),
        Option("synthetic.neutron_slow_fraction", float, _SYN.neutron_slow_fraction,
               "slow-component weight, neutrons"),
        Option("synthetic.amplitude_jitter", float, _SYN.amplitude_jitter,
               "relative amplitude spread"),
        Option("synthetic.noise_sigma", float, _SYN.noise_sigma, "sample noise before normalization"),
        Option("synthetic.onset", int, _SYN.onset, "flat baseline samples before the pulse"),
    ],
    "encode": [
        SEED,
        Option("encode.dataset", str, required=True, help="input pulse CSV"),
        Option("encode.out", str, required=True, help="output dump file"),
        Option("data.labeled", parse_bool, True, "input has a leading label column"),
        Option("grf.count", int, 25, "receptive fields per window"),
        Option("grf.sigma", float, 0.15, "receptive-field width"),
        Option("grf.theta", float, 0.1, "receptive-field response threshold"),
        Option("encode.theta_amp", float, 0.01, "amplitude threshold for latency spikes"),
    ],
    "train": [
        SEED,
        Option("train.dataset", str, required=True, help="labeled pulse CSV"),
        Option("train.model_out", str, required=True, help="output model JSON"),
        Option("train.log_out", str, None, "output training-log CSV"),
        Option("train.epochs", int, 300),
        Option("train.lr_low", float, 1e-6, "learning-rate floor"),
        Option("train.lr_high", float, 1e-3, "initial learning rate"),
        Option("train.momentum", float, 0.9, "momentum weight on the previous update"),
        Option("train.batch_size", int, 16),
        Option("train.dendrites", int, 25),
        Option("train.validation_fraction", float, 0.2),
        Option("train.init_low", float, -0.4, "efficacy init lower bound"),
        Option("train.init_high", float, 0.4, "efficacy init upper bound"),
        Option("train.snapshot_every", int, 0, "record efficacies every N epochs"),
        Option("kernel.tau", float, 8.4, "membrane time constant"),
        Option("kernel.tau_s", float, 2.1, "synaptic time constant"),
        Option("neuron.v_th", float, 1.0, "firing threshold"),
        Option("neuron.v_rest", float, 0.0, "resting potential"),
        Option("neuron.dt", float, 0.1, "time grid step"),
        Option("grf.sigma", float, 0.15),
        Option("grf.theta", float, 0.1),
        Option("encode.theta_amp", float, 0.01),
        Option("aug.gaussian_sigma", float, 1e-4, "signal noise width"),
        Option("aug.jitter_sigma", float, 1e-4, "spike jitter width"),
        Option("aug.add_miss_p", float, 1e-4, "spike add/delete probability"),
        Option("aug.mode", str, "per_epoch", "per_epoch, fixed, or off"),
    ],
    "eval": [
        SEED,
        Option("eval.model", str, required=True, help="model JSON from train"),
        Option("eval.dataset", str, required=True, help="pulse CSV to score"),
        Option("data.labeled", parse_bool, True),
        Option("eval.report_out", str, None, "evaluation report file"),
        Option("eval.predictions_out", str, None, "per-pulse prediction CSV"),
        Option("report.format", str, "json", "report format: json or csv"),
    ],
    "baseline": [
        SEED,
        Option("baseline.dataset", str, required=True, help="pulse CSV to score"),
        Option("data.labeled", parse_bool, True),
        Option("baseline.methods", _methods, bl.METHODS, "comma-separated method list"),
        Option("baseline.out_dir", str, None, "directory for per-method outputs"),
        Option("baseline.threshold", float, None, "fixed decision threshold (default: valley)"),
        Option("baseline.delayed_gate_start", int, 10, "delayed gate start after peak"),
        Option("baseline.long_gate_end", int, None, "long gate end after peak (default: pulse end)"),
        Option("baseline.pga_offset", int, 20, "peak comparison offset"),
        Option("baseline.fga_k1", int, 1, "first frequency bin"),
        Option("baseline.fga_k2", int, 2, "second frequency bin"),
        Option("baseline.zc_shaping", float, 10.0, "bipolar shaping constant"),
        Option("baseline.hist_bins", int, 64, "valley-search histogram bins"),
    ],
    "report": [
        SEED,
        Option("report.inputs", _paths, required=True,
               help="comma-separated result JSON files"),
        Option("report.out", str, None, "optional comparison CSV"),
    ],
}

ALL_KEYS = {"seed"} | {opt.key for opts in OPTIONS.values() for opt in opts}


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="tempotron-psd",
        description="Spiking-neuron pulse shape discrimination toolkit.",
    )
    sub = parser.add_subparsers(dest="command", required=True)
    for name, opts in OPTIONS.items():
        p = sub.add_parser(name)
        p.add_argument("--config", default=None, help="key = value settings file")
        for opt in opts:
            p.add_argument(opt.flag, dest=opt.dest, type=opt.type, default=None,
                           help=opt.help or opt.key)
    return parser


def _load_pulses(path: str, labeled: bool) -> Dataset:
    ds = load_dataset(path, has_labels=labeled)
    clean, skipped = normalize_dataset(ds)
    if skipped:
        print(f"warning: skipped {skipped} pulses that could not be normalized",
              file=sys.stderr)
    return clean


def cmd_generate(cfg: dict) -> int:
    syn = SyntheticConfig(
        n_per_class=cfg["synthetic.n_per_class"],
        length=cfg["synthetic.length"],
        rise=cfg["synthetic.rise"],
        fast_decay=cfg["synthetic.fast_decay"],
        slow_decay=cfg["synthetic.slow_decay"],
        gamma_slow_fraction=cfg["synthetic.gamma_slow_fraction"],
        neutron_slow_fraction=cfg["synthetic.neutron_slow_fraction"],
        amplitude_jitter=cfg["synthetic.amplitude_jitter"],
        noise_sigma=cfg["synthetic.noise_sigma"],
        onset=cfg["synthetic.onset"],
        seed=cfg["seed"],
    )
    ds = generate_synthetic(syn)
    save_dataset(ds, cfg["generate.out"])
    print(f"wrote {len(ds)} pulses ({syn.n_per_class} per class, "
          f"{syn.length} samples) to {cfg['generate.out']}")
    return 0


def cmd_encode(cfg: dict) -> int:
    ds = _load_pulses(cfg["encode.dataset"], cfg["data.labeled"])
    bank = GrfBank(count=cfg["grf.count"], sigma=cfg["grf.sigma"], theta=cfg["grf.theta"])
    batch = encode_dataset(ds, bank, cfg["encode.theta_amp"])
    blocks = [f"# pulse {i}\n{dump_pattern(batch[i])}" for i in range(len(batch))]
    write_text_atomic(cfg["encode.out"], "\n".join(blocks))
    print(f"encoded {len(batch)} pulses on {bank.count} dendrites to {cfg['encode.out']}")
    return 0


def cmd_train(cfg: dict) -> int:
    ds = load_dataset(cfg["train.dataset"], has_labels=True)
    tc = TrainConfig(
        epochs=cfg["train.epochs"],
        lr_low=cfg["train.lr_low"],
        lr_high=cfg["train.lr_high"],
        momentum=cfg["train.momentum"],
        batch_size=cfg["train.batch_size"],
        dendrites=cfg["train.dendrites"],
        seed=cfg["seed"],
        init_low=cfg["train.init_low"],
        init_high=cfg["train.init_high"],
        validation_fraction=cfg["train.validation_fraction"],
        tau=cfg["kernel.tau"],
        tau_s=cfg["kernel.tau_s"],
        v_th=cfg["neuron.v_th"],
        v_rest=cfg["neuron.v_rest"],
        dt=cfg["neuron.dt"],
        grf_sigma=cfg["grf.sigma"],
        grf_theta=cfg["grf.theta"],
        theta_amp=cfg["encode.theta_amp"],
        noise=AugmentConfig(
            gaussian_sigma=cfg["aug.gaussian_sigma"],
            jitter_sigma=cfg["aug.jitter_sigma"],
            add_miss_p=cfg["aug.add_miss_p"],
            mode=cfg["aug.mode"],
        ),
        snapshot_every=cfg["train.snapshot_every"],
    )
    model, log = train(ds, tc)
    save_model(model, cfg["train.model_out"], extra={"config": _echo(cfg)})
    if cfg["train.log_out"]:
        export_report(log, cfg["train.log_out"], format="csv")
    final_train = 1.0 - log.train_loss[-1]
    best_val = 1.0 - log.val_loss[log.best_epoch - 1]
    print(f"train accuracy {final_train:.4f}  val accuracy {best_val:.4f}  "
          f"best epoch {log.best_epoch}/{log.epochs}")
    return 0


def cmd_eval(cfg: dict) -> int:
    model = load_model(cfg["eval.model"])
    ds = _load_pulses(cfg["eval.dataset"], cfg["data.labeled"])
    batch = encode_dataset(ds, model.bank, model.theta_amp)
    predicted = classify_batch(model, batch)
    if cfg["eval.predictions_out"]:
        lines = ["pulse_idx,predicted,truth"]
        for i, p in enumerate(predicted):
            truth = "" if ds.labels is None else str(int(ds.labels[i]))
            lines.append(f"{i},{int(p)},{truth}")
        write_text_atomic(cfg["eval.predictions_out"], "\n".join(lines) + "\n")
    if ds.labels is not None:
        report = evaluate(predicted, ds.labels, method="tempotron", config=_echo(cfg))
        if cfg["eval.report_out"]:
            export_report(report, cfg["eval.report_out"], format=cfg["report.format"])
        print(f"accuracy {report.accuracy:.4f} on {report.n} pulses")
    else:
        print(f"predicted {predicted.size} pulses "
              f"({int(predicted.sum())} gamma, {int((1 - predicted).sum())} neutron)")
    return 0


def cmd_baseline(cfg: dict) -> int:
    ds = _load_pulses(cfg["baseline.dataset"], cfg["data.labeled"])
    bc = bl.BaselineConfig(
        delayed_gate_start=cfg["baseline.delayed_gate_start"],
        long_gate_end=cfg["baseline.long_gate_end"],
        pga_offset=cfg["baseline.pga_offset"],
        fga_k1=cfg["baseline.fga_k1"],
        fga_k2=cfg["baseline.fga_k2"],
        zc_shaping=cfg["baseline.zc_shaping"],
        hist_bins=cfg["baseline.hist_bins"],
    )
    out_dir = cfg["baseline.out_dir"]
    if out_dir:
        Path(out_dir).mkdir(parents=True, exist_ok=True)
    for method in cfg["baseline.methods"]:
        series = bl.factor_series(method, ds, bc)
        series = bl.classify_by_valley(series, threshold=cfg["baseline.threshold"],
                                       truth=ds.labels, bins=bc.hist_bins)
        accuracy = fom = None
        if ds.labels is not None:
            accuracy = evaluate(series.predicted, ds.labels, method=method).accuracy
            fom = bl.figure_of_merit(series, ds.labels)
        if out_dir:
            bl.write_factor_csv(series, Path(out_dir) / f"{method}.csv", truth=ds.labels)
            summary = {
                "method": method,
                "accuracy": accuracy,
                "fom": fom,  # +-Infinity allowed, matching the in-memory sentinel
                "threshold": series.threshold,
                "n": len(series),
                "config": _echo(cfg),
            }
            write_text_atomic(Path(out_dir) / f"{method}.json",
                              json.dumps(summary, indent=2) + "\n")
        shown = "n/a" if accuracy is None else f"{accuracy:.4f}"
        fom_shown = "n/a" if fom is None else f"{fom:.3f}"
        print(f"{method}: accuracy {shown}  fom {fom_shown}  "
              f"threshold {series.threshold:.6g}")
    return 0


def cmd_report(cfg: dict) -> int:
    rows = []
    for path in cfg["report.inputs"]:
        try:
            with open(path, "r", encoding="utf-8") as fh:
                obj = json.load(fh)
        except json.JSONDecodeError as exc:
            raise ParseError(f"{path}: not valid JSON: {exc}")
        if not isinstance(obj, dict) or "accuracy" not in obj:
            raise ParseError(f"{path}: no accuracy field")
        method = obj.get("method") or Path(path).stem
        rows.append((str(method), obj["accuracy"]))
    if not rows:
        raise Empty("no result files")
    width = max(len("method"), max(len(m) for m, _ in rows))
    lines = [f"{'method':<{width}}  accuracy"]
    for method, acc in rows:
        shown = "n/a" if acc is None else f"{float(acc):.4f}"
        lines.append(f"{method:<{width}}  {shown}")
    table = "\n".join(lines)
    print(table)
    if cfg["report.out"]:
        csv_lines = ["method,accuracy"] + [
            f"{m},{'' if a is None else f'{float(a):.4f}'}" for m, a in rows
        ]
        write_text_atomic(cfg["report.out"], "\n".join(csv_lines) + "\n")
    return 0


def _echo(cfg: dict) -> dict:
    """Effective settings, stringified for artifact provenance."""
    out = {}
    for key in sorted(cfg):
        value = cfg[key]
        if isinstance(value, tuple):
            value = ",".join(str(v) for v in value)
        out[key] = value
    return out


COMMANDS = {
    "generate": cmd_generate,
    "encode": cmd_encode,
    "train": cmd_train,
    "eval": cmd_eval,
    "baseline": cmd_baseline,
    "report": cmd_report,
}


def _run(argv) -> int:
    args = _build_parser().parse_args(argv)
    options = OPTIONS[args.command]
    file_values = {}
    if args.config:
        file_values = parse_config_file(args.config)
        check_known_keys(file_values, ALL_KEYS)
    flags = vars(args)
    cfg = resolve(options, flags, file_values)
    return COMMANDS[args.command](cfg)


def main(argv=None) -> int:
    try:
        return _run(argv)
    except SystemExit as exc:  # argparse usage errors already exit with 2
        return exc.code if isinstance(exc.code, int) else 2
    except (InvalidConfig, BadTimeConstants) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except (ParseError, RaggedRows, BadLabel, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 3
    except TempotronError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 4


if __name__ == "__main__":
    sys.exit(main())
