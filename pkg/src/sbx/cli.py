"""Command line interface: ``sbx <command> ...``.

Exit codes: 0 success, 1 internal error, 2 usage or validation error.
Frame inputs may be ``.sbfm`` frame files or ``.csv`` (one frame per row);
outputs ending in ``.csv`` are written as CSV, anything else as a frame file.
"""

from __future__ import annotations

import argparse
import logging
import sys

import numpy as np

from . import __version__
from .config import ConfigError, load_config
from .experiments import BASELINE_COLUMNS, DEPTH_COLUMNS, run_baseline, run_depth
from .features import bark_warp, corpus_lsd
from .formats import (FormatError, frames_from_csv, frames_to_csv, load_model, read_frames,
                      save_model, write_csv, write_frames)
from .linalg import ShapeError
from .pipeline import encode_power, finetune_model, pretrain_model, reconstruct_log
from .synth import make_synthetic_corpus

logger = logging.getLogger("sbx")


class UsageError(Exception):
    pass


def load_frames(path):
    if str(path).lower().endswith(".csv"):
        return frames_from_csv(path)
    return read_frames(path)


def save_frames(path, frames):
    if str(path).lower().endswith(".csv"):
        frames_to_csv(frames, path)
    else:
        write_frames(path, frames)


def _nonempty(frames, what):
    if len(frames) == 0:
        raise UsageError(f"empty dataset: {what}")
    return frames


def _config(args):
    cfg = load_config(args.config)
    if args.seed is not None:
        cfg = cfg.with_seed(args.seed)
    return cfg


def _report_rows(report, layer=None):
    rows = []
    for epoch, ((t, v), best) in enumerate(zip(report.epoch_losses, report.running_best()), 1):
        row = [epoch, t, v, best]
        rows.append(row if layer is None else [layer] + row)
    return rows


def cmd_pretrain(args):
    cfg = _config(args)
    train = _nonempty(load_frames(args.train), args.train)
    valid = load_frames(args.valid) if args.valid else None
    if train.shape[1] != cfg.dims[0]:
        raise UsageError(f"training frames have {train.shape[1]} bins, config expects {cfg.dims[0]}")
    if valid is not None and len(valid) and valid.shape[1] != train.shape[1]:
        raise UsageError("training and validation frames differ in width")
    model, reports = pretrain_model(cfg, train, valid)
    save_model(args.out, model)
    rows = [row for k, rep in enumerate(reports, 1) for row in _report_rows(rep, k)]
    if args.report:
        write_csv(args.report, ["layer", "epoch", "train_loss", "valid_loss", "best_valid_loss"], rows)
    for k, rep in enumerate(reports, 1):
        print(f"layer {k}: {rep.stopped_epoch} epochs, best valid loss {rep.best_valid_loss:.6g}")
    return 0


def cmd_finetune(args):
    cfg = _config(args)
    if cfg.finetune is None:
        raise UsageError(f"{args.config} has no [finetune] block")
    model = load_model(args.model)
    train = _nonempty(load_frames(args.train), args.train)
    valid = load_frames(args.valid) if args.valid else None
    if train.shape[1] != model.network.n_in:
        raise UsageError(f"frames have {train.shape[1]} bins, model expects {model.network.n_in}")
    report = finetune_model(model, cfg.finetune, train, valid)
    save_model(args.out, model)
    if args.report:
        write_csv(args.report, ["epoch", "train_loss", "valid_loss", "best_valid_loss"],
                  _report_rows(report))
    print(f"finetune: {report.stopped_epoch} epochs, best epoch {report.best_epoch}, "
          f"best valid loss {report.best_valid_loss:.6g}")
    return 0


def _model_and_input(args):
    model = load_model(args.model)
    frames = load_frames(args.input)
    if frames.shape[1] != model.network.n_in:
        raise UsageError(f"frames have {frames.shape[1]} bins, model expects {model.network.n_in}")
    return model, frames


def cmd_encode(args):
    model, frames = _model_and_input(args)
    save_frames(args.out, encode_power(model, frames))
    return 0


def cmd_reconstruct(args):
    model, frames = _model_and_input(args)
    recon = reconstruct_log(model, frames)
    save_frames(args.out, recon)
    if len(frames):
        mean_lsd, per_frame = corpus_lsd(bark_warp(frames, model.warp), recon, log_domain=True)
        print(f"mean LSD {mean_lsd:.6f} dB over {len(frames)} frames")
        if args.report:
            write_csv(args.report, ["frame", "lsd_db"], enumerate(per_frame.tolist()))
    return 0


def cmd_eval(args):
    a = load_frames(args.original)
    b = load_frames(args.reconstruction)
    if len(a) != len(b):
        raise UsageError(f"frame count mismatch: {len(a)} vs {len(b)}")
    if a.shape[1:] != b.shape[1:]:
        raise UsageError(f"frame width mismatch: {a.shape[1]} vs {b.shape[1]}")
    _nonempty(a, args.original)
    log_domain = args.domain == "log"
    if not log_domain and (np.any(a < 0) or np.any(b < 0)):
        raise UsageError("power spectra must be nonnegative; pass --domain log for log spectra")
    mean_lsd, per_frame = corpus_lsd(a, b, log_domain=log_domain)
    mse_per_frame = np.mean((a - b) ** 2, axis=1)
    print(f"mean LSD {mean_lsd:.6f} dB")
    print(f"mean MSE {float(np.mean(mse_per_frame)):.6g}")
    if args.report:
        write_csv(args.report, ["frame", "lsd_db", "mse"],
                  ([i, lsd, mse] for i, (lsd, mse) in
                   enumerate(zip(per_frame.tolist(), mse_per_frame.tolist()))))
    return 0


def _seeds(args):
    return None if args.seed is None else [args.seed]


def cmd_exp_depth(args):
    cfg = load_config(args.config)
    rows = run_depth(cfg, load_frames(args.data), _seeds(args))
    write_csv(args.out, DEPTH_COLUMNS, rows)
    for row in rows:
        print(",".join(str(v) for v in row))
    return 0


def cmd_exp_baseline(args):
    cfg = load_config(args.config)
    rows = run_baseline(cfg, load_frames(args.data), _seeds(args), args.dump_dir)
    write_csv(args.out, BASELINE_COLUMNS, rows)
    for row in rows:
        print(",".join(str(v) for v in row))
    return 0


def cmd_synth_data(args):
    if args.frames < 0 or args.bins < 2:
        raise UsageError("need --frames >= 0 and --bins >= 2")
    save_frames(args.out, make_synthetic_corpus(args.seed, args.frames, args.bins))
    return 0


def build_parser():
    parser = argparse.ArgumentParser(
        prog="sbx", description="Deep denoising auto-encoder spectral features")
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    parser.add_argument("-v", "--verbose", action="store_true", help="log training progress")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("pretrain", help="greedy layer-wise pretraining")
    p.add_argument("train")
    p.add_argument("valid", nargs="?")
    p.add_argument("--config", required=True)
    p.add_argument("--out", required=True, help="model file to write")
    p.add_argument("--report", help="per-epoch loss CSV")
    p.add_argument("--seed", type=int, help="reseed every layer from this run seed")
    p.set_defaults(func=cmd_pretrain)

    p = sub.add_parser("finetune", help="fine-tune a pretrained model with backpropagation")
    p.add_argument("model")
    p.add_argument("train")
    p.add_argument("valid", nargs="?")
    p.add_argument("--config", required=True)
    p.add_argument("--out", required=True)
    p.add_argument("--report")
    p.add_argument("--seed", type=int)
    p.set_defaults(func=cmd_finetune)

    for name, func, help_ in (("encode", cmd_encode, "extract bottleneck features"),
                              ("reconstruct", cmd_reconstruct,
                               "reconstruct warped log spectra through the model")):
        p = sub.add_parser(name, help=help_)
        p.add_argument("model")
        p.add_argument("input")
        p.add_argument("--out", required=True)
        if name == "reconstruct":
            p.add_argument("--report", help="per-frame LSD CSV")
        p.set_defaults(func=func)

    p = sub.add_parser("eval", help="LSD and MSE between two frame files")
    p.add_argument("original")
    p.add_argument("reconstruction")
    p.add_argument("--domain", choices=("power", "log"), default="power",
                   help="linear power spectra (default) or natural-log spectra")
    p.add_argument("--report", help="per-frame CSV")
    p.set_defaults(func=cmd_eval)

    for name, func, help_ in (("exp-depth", cmd_exp_depth, "depth sweep at fixed bottleneck"),
                              ("exp-baseline", cmd_exp_baseline,
                               "auto-encoder vs DCT cepstrum truncation")):
        p = sub.add_parser(name, help=help_)
        p.add_argument("data")
        p.add_argument("--config", required=True)
        p.add_argument("--out", required=True, help="results CSV")
        p.add_argument("--seed", type=int, help="run only this seed")
        if name == "exp-baseline":
            p.add_argument("--dump-dir", help="write held-out originals and reconstructions here")
        p.set_defaults(func=func)

    p = sub.add_parser("synth-data", help="generate a synthetic power-spectrum corpus")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--frames", type=int, default=2000)
    p.add_argument("--bins", type=int, default=64)
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_synth_data)
    return parser


def main(argv=None):
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(name)s: %(message)s")
    try:
        return args.func(args)
    except (UsageError, ConfigError, FormatError, ShapeError, FileNotFoundError,
            ValueError) as exc:
        print(f"sbx {args.command}: error: {exc}", file=sys.stderr)
        return 2
    except Exception as exc:  # noqa: BLE001
        print(f"sbx {args.command}: internal error: {exc!r}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
