#!/usr/bin/env python
# -*- coding: utf-8 -*-
"""
Command-line front end::

    pyrobustfeat train  --config configs/mnist-ours.yaml [--subset N]
    pyrobustfeat eval   --config configs/mnist-ours.yaml [--eps E]
    pyrobustfeat attack --checkpoint model.ckpt --input image.npy --label 7
    pyrobustfeat report runs/mnist-standard runs/mnist-ours --out cmp

Exit status: 0 on success, 2 for usage errors, 3 for invalid
configuration or incompatible inputs (config, network spec, checkpoint
or dataset file), 4 for failures during a run.

:copyright:
    pyrobustfeat developers, 2026
:license:
    GNU Lesser General Public License, version 3 (LGPLv3)
    (http://www.gnu.org/licenses/lgpl-3.0.en.html)
"""
from __future__ import (absolute_import, division, print_function)
import argparse
import logging
import os
import sys
import numpy as np

from .. import tensor as T
from ..attack import attack_loss, default_attack_configs, run_attack
from ..dataset import DatasetFormatError, load_dataset, subset
from ..evaluate import (compare_runs, evaluate_accuracy,
                        evaluate_distortions, read_accuracy_csv,
                        read_distortion_csv, write_accuracy_csv,
                        write_distortion_csv)
from ..model import (CheckpointError, NetworkSpecError, build,
                     load_checkpoint, save_checkpoint)
from ..train import CsvMetricsSink, TrainingDivergedError, train
from ..utils.io import ConfigError, dump_json, dump_yaml
from .config import load_experiment_config_yaml, write_resolved_config

logger = logging.getLogger(__name__)

EXIT_OK = 0
EXIT_USAGE = 2
EXIT_CONFIG = 3
EXIT_RUNTIME = 4

LOG_FORMAT = "%(asctime)s %(levelname)s %(name)s: %(message)s"


def _ensure_dir(path):
    if not os.path.isdir(path):
        os.makedirs(path)
    return path


def _output_dir(cfg, args):
    out = args.out or cfg.output_dir
    if out is None:
        raise ConfigError("output_dir: not set in the config and no --out "
                          "given", filename=cfg.filename)
    return _ensure_dir(os.path.abspath(out))


def _data_dir(cfg):
    if cfg.data_dir is None or not os.path.isdir(cfg.data_dir):
        raise ConfigError("data_dir: directory not found: %s"
                          % cfg.data_dir, filename=cfg.filename)
    return cfg.data_dir


def _attack_overrides(attacks, args):
    """ --eps applies to every condition, --steps/--step-size to PGD """
    attacks = dict(attacks)
    for name, cfg in attacks.items():
        changes = {"epsilon": args.eps}
        if name == "pgd":
            changes.update(steps=args.steps, step_size=args.step_size)
        attacks[name] = cfg.replace(**changes)
    return attacks


def cmd_train(args):
    cfg = load_experiment_config_yaml(args.config).with_overrides(
        seed=args.seed, epochs=args.epochs, subset=args.subset,
        output_dir=args.out)
    out = _output_dir(cfg, args)
    rng = T.RngStream(cfg.seed)

    data = load_dataset(cfg.dataset, _data_dir(cfg), split="train")
    if cfg.train.subset is not None:
        data = subset(data, cfg.train.subset, rng.child("subset"))
    model = build(cfg.network, rng.child("init"))
    logger.info("training %s (%s objective) on %d examples", model,
                cfg.objective.kind, len(data))

    write_resolved_config(cfg, os.path.join(out, "resolved_config.yaml"))
    history_file = os.path.join(out, "history.csv")
    if os.path.exists(history_file):
        os.remove(history_file)
    model, _ = train(model, data, cfg.objective, cfg.train,
                     sink=CsvMetricsSink(history_file), out_dir=out)
    model.metadata = dict(model.metadata, name=cfg.name,
                          dataset=cfg.dataset)
    save_checkpoint(model, os.path.join(out, "model.ckpt"))
    return EXIT_OK


def cmd_eval(args):
    cfg = load_experiment_config_yaml(args.config).with_overrides(
        seed=args.seed, output_dir=args.out)
    out = _output_dir(cfg, args)
    checkpoint = args.checkpoint or os.path.join(out, "model.ckpt")
    model = load_checkpoint(cfg.network, checkpoint)

    data = load_dataset(cfg.dataset, _data_dir(cfg), split="test")
    count = args.subset or cfg.evaluation.subset
    if count is not None:
        data = subset(data, count,
                      T.RngStream(cfg.seed).child("eval-subset"))
    batch_size = args.batch_size or cfg.evaluation.batch_size
    attacks = _attack_overrides(cfg.attacks, args)
    label = args.label or cfg.name

    accuracy = evaluate_accuracy(model, data, attacks,
                                 batch_size=batch_size)
    distortion = evaluate_distortions(
        model, data, attacks[cfg.evaluation.distortion_attack],
        batch_size=batch_size)
    write_accuracy_csv([(label, accuracy)],
                       os.path.join(out, "accuracy.csv"))
    write_distortion_csv([(label, distortion)],
                         os.path.join(out, "distortion.csv"))
    dump_yaml({"label": label, "dataset": cfg.dataset,
               "checkpoint": os.path.abspath(checkpoint),
               "count": accuracy.count, "attacks": accuracy.attacks,
               "distortion_attack": distortion.attack},
              os.path.join(out, "evaluation.yaml"))
    return EXIT_OK


def _read_image(filename, input_shape):
    image = np.load(filename)
    shape = tuple(input_shape)
    if image.shape == shape[1:] and shape[0] == 1:
        image = image[None]
    if image.shape == (1, ) + shape:
        image = image[0]
    if image.shape != shape:
        raise ConfigError("input: %s has shape %s, the network expects %s"
                          % (filename, image.shape, list(shape)))
    return image[None].astype(np.float32)


def cmd_attack(args):
    model = load_checkpoint(None, args.checkpoint)
    dataset = args.dataset or model.metadata.get("dataset")
    if dataset is None:
        raise ConfigError("dataset: not recorded in the checkpoint; pass "
                          "--dataset")
    attacks = _attack_overrides(default_attack_configs(dataset), args)
    cfg = attacks[args.method]

    x = _read_image(args.input, model.spec.input_shape)
    labels = np.array([args.label])
    x_adv = run_attack(model, x, labels, cfg).data
    out = _ensure_dir(os.path.abspath(args.out))
    np.save(os.path.join(out, "adversarial.npy"), x_adv[0])
    record = {
        "true_label": int(args.label),
        "clean_prediction": int(model.predict(x)[0]),
        "adversarial_prediction": int(model.predict(x_adv)[0]),
        "clean_loss": attack_loss(model, x, labels),
        "adversarial_loss": attack_loss(model, x_adv, labels),
        "linf": float(np.abs(x_adv - x).max()),
        "attack": cfg.to_dict(),
    }
    dump_json(record, os.path.join(out, "attack_record.json"))
    logger.info("%s: label %d, prediction %d -> %d, linf %g", cfg.method,
                record["true_label"], record["clean_prediction"],
                record["adversarial_prediction"], record["linf"])
    return EXIT_OK


def cmd_report(args):
    runs = []
    for run_dir in args.runs:
        accuracy_file = os.path.join(run_dir, "accuracy.csv")
        if not os.path.isfile(accuracy_file):
            raise ConfigError("%s: no accuracy.csv, run eval first"
                              % run_dir)
        accuracies = read_accuracy_csv(accuracy_file)
        distortions = {}
        distortion_file = os.path.join(run_dir, "distortion.csv")
        if os.path.isfile(distortion_file):
            distortions = dict(read_distortion_csv(distortion_file))
        for label, report in accuracies:
            runs.append((label, report, distortions.get(label)))
    try:
        accuracy, distortion = compare_runs(runs)
    except ValueError as err:
        raise ConfigError("runs: %s" % err)
    out = _ensure_dir(os.path.abspath(args.out))
    accuracy.to_csv(os.path.join(out, "comparison_accuracy.csv"),
                    index=False)
    distortion.to_csv(os.path.join(out, "comparison_distortion.csv"),
                      index=False)
    logger.info("compared %d runs into %s", len(runs), out)
    return EXIT_OK


def _add_attack_flags(parser):
    parser.add_argument("--eps", type=float, default=None,
                        help="attack budget, in input units")
    parser.add_argument("--steps", type=int, default=None,
                        help="PGD iterations")
    parser.add_argument("--step-size", type=float, default=None,
                        dest="step_size", help="PGD step, in input units")


def build_parser():
    parser = argparse.ArgumentParser(
        prog="pyrobustfeat",
        description="Train, attack and evaluate networks with robust "
                    "normalized features")
    parser.add_argument("-v", "--verbose", action="store_true",
                        help="debug logging")
    sub = parser.add_subparsers(dest="command")
    sub.required = True

    p = sub.add_parser("train", help="train a model from a config")
    p.add_argument("--config", required=True)
    p.add_argument("--out", default=None)
    p.add_argument("--seed", type=int, default=None)
    p.add_argument("--subset", type=int, default=None,
                   help="train on a class-balanced subset")
    p.add_argument("--epochs", type=int, default=None)
    p.set_defaults(func=cmd_train)

    p = sub.add_parser("eval", help="accuracy and feature distortions")
    p.add_argument("--config", required=True)
    p.add_argument("--checkpoint", default=None,
                   help="defaults to <out>/model.ckpt")
    p.add_argument("--out", default=None)
    p.add_argument("--seed", type=int, default=None)
    p.add_argument("--subset", type=int, default=None,
                   help="evaluate on a class-balanced test subset")
    p.add_argument("--batch-size", type=int, default=None,
                   dest="batch_size")
    p.add_argument("--label", default=None,
                   help="model name in the reports")
    _add_attack_flags(p)
    p.set_defaults(func=cmd_eval)

    p = sub.add_parser("attack", help="attack a single image")
    p.add_argument("--checkpoint", required=True)
    p.add_argument("--input", required=True, help=".npy image")
    p.add_argument("--label", type=int, required=True)
    p.add_argument("--out", required=True)
    p.add_argument("--dataset", choices=["mnist", "cifar10"], default=None)
    p.add_argument("--method", choices=["fgsm", "pgd"], default="pgd")
    _add_attack_flags(p)
    p.set_defaults(func=cmd_attack)

    p = sub.add_parser("report", help="merge evaluated runs")
    p.add_argument("runs", nargs="+", help="run directories")
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_report)
    return parser


def main(argv=None):
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.DEBUG if args.verbose
                        else logging.INFO, format=LOG_FORMAT)
    try:
        return args.func(args)
    except (ConfigError, NetworkSpecError, CheckpointError,
            DatasetFormatError) as err:
        logger.error("%s", err)
        return EXIT_CONFIG
    except TrainingDivergedError as err:
        logger.error("%s", err)
        return EXIT_RUNTIME
    except Exception:
        logger.exception("%s failed", args.command)
        return EXIT_RUNTIME


if __name__ == "__main__":
    sys.exit(main())
