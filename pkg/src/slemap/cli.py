"""Command-line interface.

Subcommands: similarity, embed, train, predict, evaluate, compare, synth.
Exit codes: 0 success, 1 usage error, 2 data error, 3 numerical failure.
"""

from __future__ import annotations

import argparse
import csv
import sys
from dataclasses import replace
from pathlib import Path

import numpy as np

from . import errors
from .config import PipelineConfig, load_config
from .dataset import load_dataset
from .evaluation import compare_methods, run_methods
from .laplacian import build_laplacian, solve_eigenmap
from .lsi import build_tfidf, lsi_embed
from .model_io import load_model, predict_model, save_model, train_model
from .similarity import SimilarityComputer
from .synth import GeneratorSpec, generate_synthetic, parse_generator_spec
from .text import normalize

_DATA_ERRORS = (errors.SchemaError, errors.ParseError, errors.EmptyDocument,
                errors.InvalidSpec, errors.KTooLarge, errors.FoldTooSmall,
                errors.SingleClass, errors.EmptyVocabulary, errors.ConfigError,
                errors.TokenCapExceeded, FileNotFoundError)
_NUMERIC_ERRORS = (errors.NonFiniteValue, errors.RankDeficient,
                   errors.NonSymmetricInput, errors.DimensionMismatch)


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        print(f"{self.prog}: error: {message}", file=sys.stderr)
        raise SystemExit(1)


def _resolved_config(args) -> PipelineConfig:
    cfg = load_config(getattr(args, "config", None))
    if getattr(args, "dict_dir", None):
        cfg = replace(cfg, dictionary_dir=args.dict_dir)
    if getattr(args, "dims", None) is not None:
        cfg = replace(cfg, dims=args.dims)
    if getattr(args, "folds", None) is not None:
        cfg = replace(cfg, folds=args.folds)
    if getattr(args, "seed", None) is not None:
        cfg = replace(cfg, seed=args.seed)
    return cfg


def _load(args):
    dataset, diagnostics = load_dataset(args.input, strict=getattr(args, "strict", False))
    for line in diagnostics:
        print(f"skipped: {line}", file=sys.stderr)
    return dataset


def _cmd_similarity(args) -> int:
    cfg = _resolved_config(args)
    dataset = _load(args)
    ncfg = cfg.normalization()
    docs = [normalize(t, ncfg, doc_id=i) for i, t in zip(dataset.ids, dataset.texts)]
    comp = SimilarityComputer(cfg.transform_weights(), cfg.load_dictionary(),
                              max_tokens=cfg.max_tokens)
    sim = comp.matrix(docs)
    with Path(args.out).open("w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(["id"] + list(sim.ids))
        for i, row_id in enumerate(sim.ids):
            writer.writerow([row_id] + [repr(float(v)) for v in sim.values[i]])
    print(f"wrote {args.out} ({sim.m}x{sim.m})")
    return 0


def _cmd_embed(args) -> int:
    cfg = _resolved_config(args)
    dataset = _load(args)
    ncfg = cfg.normalization()
    docs = [normalize(t, ncfg, doc_id=i) for i, t in zip(dataset.ids, dataset.texts)]
    if args.method == "le":
        comp = SimilarityComputer(cfg.transform_weights(), cfg.load_dictionary(),
                                  max_tokens=cfg.max_tokens)
        emb = solve_eigenmap(build_laplacian(comp.matrix(docs)), cfg.dims)
        vectors = emb.vectors
    else:
        vectors = lsi_embed(build_tfidf(docs), cfg.dims).vectors
    with Path(args.out).open("w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(["id"] + [f"e{j + 1}" for j in range(vectors.shape[1])])
        for i, row_id in enumerate(dataset.ids):
            writer.writerow([row_id] + [repr(float(v)) for v in vectors[i]])
    print(f"wrote {args.out} ({vectors.shape[0]}x{vectors.shape[1]})")
    return 0


def _cmd_train(args) -> int:
    cfg = _resolved_config(args)
    dataset = _load(args)
    model = train_model(dataset, args.method, cfg)
    save_model(model, args.out)
    print(f"trained {args.method} on {dataset.m} records "
          f"(train AUC {model.train_auc:.4f}, attempts {model.attempts}); saved to {args.out}")
    return 0


def _cmd_predict(args) -> int:
    model = load_model(args.model)
    dataset = _load(args)
    scores = predict_model(model, dataset)
    with Path(args.out).open("w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(["id", "score"])
        for i, s in zip(dataset.ids, scores):
            writer.writerow([i, repr(float(s))])
    print(f"wrote {args.out} ({len(scores)} scores)")
    return 0


def _cmd_evaluate(args) -> int:
    cfg = _resolved_config(args)
    dataset = _load(args)
    report = run_methods(dataset, [args.method], cfg,
                         collect_predictions=args.dump_predictions)[args.method]
    out = Path(args.report)
    out.mkdir(parents=True, exist_ok=True)
    (out / "report.txt").write_text(report.to_text(), encoding="utf-8")
    (out / "report.csv").write_text("\n".join(report.to_csv_rows()) + "\n", encoding="utf-8")
    (out / "config.txt").write_text(cfg.echo(), encoding="utf-8")
    if args.dump_predictions:
        with (out / "predictions.csv").open("w", newline="", encoding="utf-8") as fh:
            writer = csv.writer(fh, lineterminator="\n")
            writer.writerow(["fold", "id", "label", "score"])
            for fold, rid, label, score in report.predictions:
                writer.writerow([fold, rid, label, repr(score)])
    print(f"{args.method}: mean AUC {report.mean_auc:.4f}, mean MCC {report.mean_mcc:.4f}; "
          f"report in {out}")
    return 0


def _parse_dims_list(text: str) -> list[int]:
    dims = []
    for part in text.split(","):
        part = part.strip()
        if ".." in part:
            lo, hi = part.split("..", 1)
            dims.extend(range(int(lo), int(hi) + 1))
        elif part:
            dims.append(int(part))
    if not dims or any(d < 1 for d in dims):
        raise errors.ConfigError(f"bad dims list {text!r}")
    return dims


def _cmd_compare(args) -> int:
    cfg = _resolved_config(args)
    dataset = _load(args)
    methods = [m.strip() for m in args.methods.split(",") if m.strip()]
    dims_list = _parse_dims_list(args.dims)
    rows = compare_methods(dataset, methods, dims_list, cfg)
    out = Path(args.report)
    out.mkdir(parents=True, exist_ok=True)
    with (out / "compare.csv").open("w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(["method", "dims", "auc", "mcc"])
        for row in rows:
            writer.writerow([row["method"], row["dims"], repr(row["auc"]), repr(row["mcc"])])
    (out / "config.txt").write_text(cfg.echo(), encoding="utf-8")
    print(f"wrote {out / 'compare.csv'} ({len(rows)} rows)")
    return 0


def _cmd_synth(args) -> int:
    spec = parse_generator_spec(args.spec) if args.spec else GeneratorSpec()
    generate_synthetic(spec, args.seed, args.out)
    print(f"wrote {args.out} ({spec.m} records, {spec.clusters} clusters)")
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="slemap",
                     description="Supervised Laplacian eigenmaps for short clinical text")
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p, dict_dir=True):
        p.add_argument("--config", help="pipeline config file")
        if dict_dir:
            p.add_argument("--dict-dir", help="directory with synonyms/acronyms/abbreviations files")

    p = sub.add_parser("similarity", help="write the document similarity matrix")
    p.add_argument("--input", required=True)
    p.add_argument("--out", required=True)
    common(p)
    p.set_defaults(func=_cmd_similarity)

    p = sub.add_parser("embed", help="write an unsupervised embedding")
    p.add_argument("--method", choices=("le", "lsi"), required=True)
    p.add_argument("--dims", type=int)
    p.add_argument("--input", required=True)
    p.add_argument("--out", required=True)
    common(p)
    p.set_defaults(func=_cmd_embed)

    p = sub.add_parser("train", help="train a model and save it to a directory")
    p.add_argument("--method", choices=("numeric", "le", "sle", "lsi"), required=True)
    p.add_argument("--input", required=True)
    p.add_argument("--out", required=True)
    p.add_argument("--seed", type=int)
    common(p)
    p.set_defaults(func=_cmd_train)

    p = sub.add_parser("predict", help="score new records with a saved model")
    p.add_argument("--model", required=True)
    p.add_argument("--input", required=True)
    p.add_argument("--out", required=True)
    p.set_defaults(func=_cmd_predict)

    p = sub.add_parser("evaluate", help="cross-validated evaluation of one method")
    p.add_argument("--method", choices=("numeric", "le", "sle", "lsi"), required=True)
    p.add_argument("--input", required=True)
    p.add_argument("--folds", type=int)
    p.add_argument("--seed", type=int)
    p.add_argument("--report", required=True)
    p.add_argument("--dump-predictions", action="store_true")
    common(p)
    p.set_defaults(func=_cmd_evaluate)

    p = sub.add_parser("compare", help="sweep methods over embedding dimensions")
    p.add_argument("--methods", required=True, help="comma-separated subset of numeric,le,sle,lsi")
    p.add_argument("--dims", required=True, help="list like 5,10,20 or range like 1..50")
    p.add_argument("--input", required=True)
    p.add_argument("--seed", type=int)
    p.add_argument("--folds", type=int)
    p.add_argument("--report", required=True)
    common(p)
    p.set_defaults(func=_cmd_compare)

    p = sub.add_parser("synth", help="generate a synthetic dataset")
    p.add_argument("--spec", help="generator spec file (defaults used when omitted)")
    p.add_argument("--seed", type=int, required=True)
    p.add_argument("--out", required=True)
    p.set_defaults(func=_cmd_synth)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except _DATA_ERRORS as exc:
        print(f"data error: {exc}", file=sys.stderr)
        return 2
    except _NUMERIC_ERRORS as exc:
        print(f"numerical failure: {type(exc).__name__}: {exc}", file=sys.stderr)
        return 3


if __name__ == "__main__":
    sys.exit(main())
