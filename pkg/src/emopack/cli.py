"""Command-line driver.

Subcommands: harmonize, smooth, pack, augment, featurize, run, eval,
toy-train, golden-check. Exit codes: 0 success, 2 config error, 3 data
error, 4 internal invariant violation.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

import numpy as np

from emopack import __version__
from emopack.audio import read_wav, write_wav
from emopack.augment import augment_waveform_with_log
from emopack.config import PipelineConfig, load_config
from emopack.corpus import EMOTIONS, Sample, split_train_val
from emopack.epk import FeatureFile, read_epk, write_epk
from emopack.errors import ConfigError, DataError, EmopackError, InvariantError
from emopack.features import log_mel_spectrogram, pad_or_trim
from emopack.fixtures import synthesize
from emopack.metrics import PredictionSet, argmax_reference, mean_pearson, micro_f1, per_class_f1, predict_labels
from emopack.packing import prepare_pool, retrieve_sequence
from emopack.pipeline import load_corpus, run_pipeline
from emopack.rng import derive_rng
from emopack.smoothing import smooth_corpus

GOLDEN_TOLERANCE = 1e-4


def _add_common(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--config", type=str, default=None, help="JSON config file")
    parser.add_argument("--set", dest="overrides", action="append", default=[],
                        metavar="KEY=VALUE", help="override a config field (dotted path)")
    parser.add_argument("--seed", type=int, default=None, help="global seed override")
    parser.add_argument("--jobs", type=int, default=None, help="worker count override")
    parser.add_argument("--out", type=str, default=None, help="output directory override")


def _config_from_args(args) -> PipelineConfig:
    cfg = load_config(args.config, args.overrides)
    if args.seed is not None:
        cfg.seed = args.seed
    if getattr(args, "jobs", None) is not None:
        cfg.workers = args.jobs
    if getattr(args, "out", None) is not None:
        cfg.out_dir = args.out
    return cfg


def _sample_to_json(sample: Sample) -> str:
    return json.dumps(
        {
            "id": sample.id,
            "audio_path": sample.audio_path,
            "dataset": sample.dataset,
            "speaker": sample.speaker,
            "language": sample.language,
            "duration_s": sample.duration_s,
            "labels": sample.raw_labels,
            "emotion": [round(float(v), 9) for v in sample.emotion],
            "domain_id": sample.domain_id,
        },
        sort_keys=True,
    )


def _samples_from_jsonl(path: str) -> list[Sample]:
    samples = []
    with open(path, encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, start=1):
            line = line.strip()
            if not line:
                continue
            try:
                r = json.loads(line)
                samples.append(
                    Sample(
                        id=r["id"],
                        audio_path=r["audio_path"],
                        dataset=r["dataset"],
                        speaker=r["speaker"],
                        language=r["language"],
                        duration_s=float(r["duration_s"]),
                        raw_labels=r.get("labels", {}),
                        emotion=np.asarray(r["emotion"], dtype=np.float64),
                        domain_id=int(r.get("domain_id", -1)),
                    )
                )
            except (KeyError, ValueError, json.JSONDecodeError) as exc:
                raise DataError(f"{path}:{lineno}: bad harmonized sample record: {exc}") from exc
    return samples


def cmd_harmonize(args) -> int:
    cfg = _config_from_args(args)
    samples, table = load_corpus(cfg)
    out = Path(cfg.out_dir)
    out.mkdir(parents=True, exist_ok=True)
    with open(out / "harmonized.jsonl", "w", encoding="utf-8") as fh:
        for sample in samples:
            fh.write(_sample_to_json(sample) + "\n")
    with open(out / "domains.json", "w", encoding="utf-8") as fh:
        json.dump({"triples": [list(t) for t in table.triples]}, fh, indent=2)
        fh.write("\n")
    print(f"harmonized {len(samples)} samples over {len(table)} domains -> {out}")
    return 0


def cmd_smooth(args) -> int:
    samples = _samples_from_jsonl(args.input)
    smoothed, means = smooth_corpus(samples)
    out = Path(args.out or "out")
    out.mkdir(parents=True, exist_ok=True)
    with open(out / "smoothed.jsonl", "w", encoding="utf-8") as fh:
        for sample in smoothed:
            fh.write(_sample_to_json(sample) + "\n")
    with open(out / "smoothing_means.json", "w", encoding="utf-8") as fh:
        json.dump(means, fh, indent=2, sort_keys=True)
        fh.write("\n")
    for dataset, mean in sorted(means.items()):
        print(f"dataset {dataset}: mean intensity {mean:.6f}")
    return 0


def cmd_pack(args) -> int:
    cfg = _config_from_args(args)
    samples = _samples_from_jsonl(args.input)
    if args.split:
        samples, _ = split_train_val(samples, cfg.train_fraction, cfg.seed)
    pool = prepare_pool(samples)
    rng = derive_rng(cfg.seed, "pack")
    count = args.count or max(1, int(np.ceil(sum(s.duration_s for s in samples) / cfg.context_s)))
    out = Path(cfg.out_dir)
    out.mkdir(parents=True, exist_ok=True)
    with open(out / "sequences.jsonl", "w", encoding="utf-8") as fh:
        for i in range(count):
            seq = retrieve_sequence(pool, cfg.context_s, rng,
                                    refresh_threshold=cfg.refresh_threshold,
                                    fill_fraction=cfg.fill_fraction)
            fh.write(json.dumps({
                "seq_index": i,
                "total_duration_s": round(seq.total_duration_s, 9),
                "sample_ids": seq.sample_ids,
                "refreshed": seq.refreshed,
            }, sort_keys=True) + "\n")
    print(f"packed {count} sequences -> {out / 'sequences.jsonl'}")
    return 0


def cmd_augment(args) -> int:
    cfg = _config_from_args(args)
    w = read_wav(args.input)
    out_w, fired = augment_waveform_with_log(w, cfg.augment, cfg.seed, args.id or Path(args.input).stem)
    write_wav(args.output, out_w)
    print(f"applied {fired or 'no effects'} -> {args.output}")
    return 0


def cmd_featurize(args) -> int:
    cfg = _config_from_args(args)
    out = Path(cfg.out_dir)
    out.mkdir(parents=True, exist_ok=True)
    for wav_path in args.inputs:
        w = read_wav(wav_path)
        if args.pad:
            w, _ = pad_or_trim(w, cfg.context_s)
        mel = log_mel_spectrogram(w)
        dest = out / (Path(wav_path).stem + ".epk")
        write_epk(dest, FeatureFile(values=mel.values, total_duration_s=w.duration_s, members=[]))
        print(f"{wav_path} -> {dest} ({mel.values.shape[0]}x{mel.values.shape[1]})")
    return 0


def cmd_run(args) -> int:
    cfg = _config_from_args(args)
    report = run_pipeline(cfg)
    from emopack.report import plot_pipeline_report

    figures = plot_pipeline_report(report.to_dict(), cfg.out_dir)
    print(f"pipeline done: {report.n_sequences} sequences, "
          f"{report.total_packed_duration_s:.1f}s packed, report -> {cfg.out_dir}/report.json")
    for fig in figures:
        print(f"figure -> {fig}")
    return 0


def cmd_eval(args) -> int:
    eval_cfg = {}
    if args.eval_config:
        with open(args.eval_config, encoding="utf-8") as fh:
            eval_cfg = json.load(fh)
    priors = None
    if "priors" in eval_cfg:
        p = eval_cfg["priors"]
        priors = np.asarray([p[name] for name in EMOTIONS] if isinstance(p, dict) else p, dtype=np.float64)
    allowed = None
    if "allowed" in eval_cfg:
        allowed = np.asarray([name in eval_cfg["allowed"] for name in EMOTIONS])
    tau = float(eval_cfg.get("tau", 1.0))

    logits, targets = [], []
    with open(args.predictions, encoding="utf-8") as fh:
        for line in fh:
            line = line.strip()
            if not line:
                continue
            r = json.loads(line)
            logits.append(r["logits"])
            targets.append(r["target"])
    if not logits:
        raise DataError(f"no prediction records in {args.predictions}")
    logits_arr = np.asarray(logits, dtype=np.float64)
    targets_arr = np.asarray(targets, dtype=np.float64)
    preds = predict_labels(logits_arr, allowed, priors, tau)
    refs = argmax_reference(targets_arr)
    pset = PredictionSet(predictions=preds, references=refs, n_classes=logits_arr.shape[1])
    per_class = per_class_f1(pset)
    metrics = {
        "micro_f1": micro_f1(pset),
        "per_class": {EMOTIONS[c]: round(v, 6) for c, v in per_class.items()},
        "n": len(preds),
    }
    if args.pearson:
        metrics["mean_pearson"] = mean_pearson(logits_arr, targets_arr)
    out = Path(args.out or "out")
    out.mkdir(parents=True, exist_ok=True)
    with open(out / "metrics.json", "w", encoding="utf-8") as fh:
        json.dump(metrics, fh, indent=2, sort_keys=True)
        fh.write("\n")
    from emopack.report import plot_metric_report

    plot_metric_report(metrics, out / "per_class_f1.png")
    print(f"micro F1 {metrics['micro_f1']:.4f} over {metrics['n']} samples")
    for name in EMOTIONS:
        shown = f"{metrics['per_class'][name]:.4f}" if name in metrics["per_class"] else "-"
        print(f"  {name:>10s}  {shown}")
    return 0


def cmd_toy_train(args) -> int:
    from emopack.adversarial import ToyConfig, run_toy_experiment
    from emopack.report import plot_train_trace

    defaults = ToyConfig()
    cfg = ToyConfig(
        w_d=args.w_d,
        lr=args.lr if args.lr is not None else defaults.lr,
        epochs=args.epochs if args.epochs is not None else defaults.epochs,
        shared_dim=args.shared_dim if args.shared_dim is not None else defaults.shared_dim,
    )
    result = run_toy_experiment(n=args.n, seed=args.seed if args.seed is not None else 0, cfg=cfg)
    out = Path(args.out or "out")
    out.mkdir(parents=True, exist_ok=True)
    trace_path = out / "trace.csv"
    with open(trace_path, "w", encoding="utf-8") as fh:
        fh.write("epoch,emo_acc,dom_acc,ce_emo,ce_dom,total\n")
        t = result.trace
        for i in range(len(t.emo_acc)):
            fh.write(f"{i + 1},{t.emo_acc[i]:.6f},{t.dom_acc[i]:.6f},"
                     f"{t.ce_emo[i]:.9f},{t.ce_dom[i]:.9f},{t.total[i]:.9f}\n")
    plot_train_trace(
        {"emo_acc": t.emo_acc, "dom_acc": t.dom_acc, "ce_emo": t.ce_emo, "ce_dom": t.ce_dom, "total": t.total},
        out / "trace.png",
    )
    print(f"emotion accuracy {result.emotion_accuracy:.4f}")
    print(f"domain probe accuracy {result.domain_probe_accuracy:.4f} (chance {result.chance:.4f})")
    print(f"trace -> {trace_path}, figure -> {out / 'trace.png'}")
    return 0


def cmd_golden_check(args) -> int:
    golden_dir = Path(args.goldens)
    index_path = golden_dir / "index.json"
    if not index_path.is_file():
        raise ConfigError(f"golden index not found: {index_path}")
    with open(index_path, encoding="utf-8") as fh:
        index = json.load(fh)
    failures = 0
    emit_dir = Path(args.emit) if args.emit else None
    if emit_dir is not None:
        emit_dir.mkdir(parents=True, exist_ok=True)
    for entry in index["fixtures"]:
        golden = read_epk(golden_dir / entry["file"])
        w = synthesize(entry["recipe"])
        mel = log_mel_spectrogram(w)
        if emit_dir is not None:
            write_epk(emit_dir / entry["file"],
                      FeatureFile(values=mel.values, total_duration_s=w.duration_s, members=[]))
        if mel.values.shape != golden.values.shape:
            print(f"FAIL {entry['name']}: shape {mel.values.shape} != golden {golden.values.shape}")
            failures += 1
            continue
        diff = float(np.max(np.abs(mel.values.astype(np.float64) - golden.values.astype(np.float64))))
        status = "ok" if diff <= GOLDEN_TOLERANCE else "FAIL"
        if status == "FAIL":
            failures += 1
        print(f"{status:4s} {entry['name']:24s} max|diff| = {diff:.3e}")
    if failures:
        raise InvariantError(f"{failures} golden fixture(s) exceeded {GOLDEN_TOLERANCE}")
    print(f"all {len(index['fixtures'])} golden fixtures match within {GOLDEN_TOLERANCE}")
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="emopack", description=__doc__)
    parser.add_argument("--version", action="version", version=f"emopack {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("harmonize", help="manifests -> harmonized sample JSONL")
    _add_common(p)
    p.set_defaults(func=cmd_harmonize)

    p = sub.add_parser("smooth", help="harmonized JSONL -> neutral-smoothed JSONL")
    p.add_argument("input", help="harmonized.jsonl from the harmonize step")
    p.add_argument("--out", type=str, default=None)
    p.set_defaults(func=cmd_smooth)

    p = sub.add_parser("pack", help="harmonized JSONL -> packed sequence listing")
    _add_common(p)
    p.add_argument("input", help="harmonized/smoothed sample JSONL")
    p.add_argument("--count", type=int, default=None, help="number of sequences")
    p.add_argument("--split", action="store_true", help="pack only the train split")
    p.set_defaults(func=cmd_pack)

    p = sub.add_parser("augment", help="apply the waveform effect chain to one WAV")
    _add_common(p)
    p.add_argument("input")
    p.add_argument("output")
    p.add_argument("--id", type=str, default=None, help="stable sample id for RNG keying")
    p.set_defaults(func=cmd_augment)

    p = sub.add_parser("featurize", help="WAV file(s) -> EPK1 log-mel features")
    _add_common(p)
    p.add_argument("inputs", nargs="+")
    p.add_argument("--pad", action="store_true", help="pad/trim to the context length first")
    p.set_defaults(func=cmd_featurize)

    p = sub.add_parser("run", help="full pipeline: manifests -> packed feature files")
    _add_common(p)
    p.set_defaults(func=cmd_run)

    p = sub.add_parser("eval", help="prediction JSONL -> metric report")
    p.add_argument("predictions", help="JSONL with per-sample logits and soft targets")
    p.add_argument("--eval-config", type=str, default=None, help="JSON with priors/allowed/tau")
    p.add_argument("--pearson", action="store_true", help="also report mean Pearson r")
    p.add_argument("--out", type=str, default=None)
    p.set_defaults(func=cmd_eval)

    p = sub.add_parser("toy-train", help="desk-scale adversarial training demonstration")
    p.add_argument("--w-d", type=float, default=0.01, dest="w_d")
    p.add_argument("--lr", type=float, default=None)
    p.add_argument("--epochs", type=int, default=None)
    p.add_argument("--shared-dim", type=int, default=None)
    p.add_argument("--n", type=int, default=1000)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out", type=str, default=None)
    p.set_defaults(func=cmd_toy_train)

    p = sub.add_parser("golden-check", help="verify the featurizer against committed goldens")
    p.add_argument("--goldens", type=str, default="goldens", help="directory with index.json and *.epk")
    p.add_argument("--emit", type=str, default=None, help="also write this featurizer's outputs here")
    p.set_defaults(func=cmd_golden_check)

    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except EmopackError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return exc.exit_code


if __name__ == "__main__":
    sys.exit(main())
