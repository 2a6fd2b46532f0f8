import os
import numpy as np
import numpy.testing as npt
import pandas as pd
import pytest

import pyrobustfeat.tensor as T
from pyrobustfeat.attack import AttackConfig
from pyrobustfeat.dataset import DatasetHandle, load_mnist, subset
from pyrobustfeat.model import NetworkSpec, build, load_checkpoint
from pyrobustfeat.train import (CsvMetricsSink, ObjectiveConfig,
                                TrainConfig, TrainingDivergedError, train)
from pyrobustfeat.utils.io import ConfigError

MNIST_DIR = os.environ.get("PYROBUSTFEAT_MNIST_DIR")

TINY = NetworkSpec.from_dict({
    "name": "tiny",
    "input_shape": [1, 8, 8],
    "layers": [
        {"kind": "conv", "kernel": [3, 3], "in_channels": 1,
         "out_channels": 2, "normalize": True, "activation": "relu"},
        {"kind": "maxpool"},
        {"kind": "dense", "units": 8, "normalize": True,
         "activation": "relu"},
        {"kind": "softmax", "units": 10},
    ],
})

STANDARD = ObjectiveConfig(kind="standard")


def _templates(n=200, seed=0):
    """ one random template per class plus small noise """
    rng = np.random.RandomState(seed)
    templates = rng.rand(10, 1, 8, 8)
    labels = np.arange(n) % 10
    inputs = templates[labels] + 0.1 * rng.randn(n, 1, 8, 8)
    return DatasetHandle("mnist", "train",
                         np.clip(inputs, 0, 1).astype(np.float32),
                         labels.astype(np.int64), (0.0, 1.0))


def _tc(**kwargs):
    values = {"epochs": 3, "batch_size": 20, "learning_rate": 0.05,
              "momentum": 0.9, "seed": 7}
    values.update(kwargs)
    return TrainConfig(**values)


def test_standard_training_improves_clean_accuracy():
    model = build(TINY, T.RngStream(0))
    _, history = train(model, _templates(), STANDARD, _tc())
    assert [h["epoch"] for h in history] == [1, 2, 3]
    assert history[-1]["clean_accuracy"] > history[0]["clean_accuracy"]
    assert history[-1]["loss"] < history[0]["loss"]
    assert model.metadata["objective"] == "standard"
    assert all(s.num_batches_tracked == 30 for s in model.bn_states.values())


def test_training_is_deterministic():
    runs = []
    for _ in range(2):
        model = build(TINY, T.RngStream(1))
        cfg = ObjectiveConfig(kind="distortion-regularized", alpha=0.2,
                              betas=[0.01, 0.03],
                              attack=AttackConfig.fgsm(0.1))
        runs.append(train(model, _templates(60), cfg, _tc(epochs=2)))
    (model_a, history_a), (model_b, history_b) = runs
    assert history_a == history_b
    for name, value in model_a.state_arrays().items():
        npt.assert_array_equal(value, model_b.state_arrays()[name])


def test_adversarial_history_reports_every_term():
    model = build(TINY, T.RngStream(2))
    cfg = ObjectiveConfig(kind="distortion-regularized", alpha=0.2,
                          betas=[0.01, 0.03], attack=AttackConfig.fgsm(0.1))
    _, history = train(model, _templates(40), cfg, _tc(epochs=1))
    record = history[0]
    assert set(record) == {"epoch", "loss", "clean_accuracy", "clean_loss",
                           "adversarial_loss", "distortion_loss"}
    assert record["distortion_loss"] >= 0
    npt.assert_allclose(record["loss"],
                        0.2 * record["clean_loss"]
                        + 0.8 * record["adversarial_loss"]
                        + record["distortion_loss"], rtol=1e-5)


def test_metrics_sink_writes_csv(tmpdir):
    filename = str(tmpdir.join("history.csv"))
    sink = CsvMetricsSink(filename)
    model = build(TINY, T.RngStream(0))
    train(model, _templates(40), STANDARD, _tc(epochs=2), sink=sink)
    table = pd.read_csv(filename)
    assert list(table.columns) == ["epoch", "split", "metric", "value"]
    assert len(table) == 2 * 3
    assert set(table["metric"]) == {"loss", "clean_accuracy", "clean_loss"}
    assert (table["split"] == "train").all()
    pd.testing.assert_frame_equal(table, sink.to_frame())


def test_checkpoint_cadence(tmpdir):
    model = build(TINY, T.RngStream(0))
    out_dir = str(tmpdir.join("run"))
    train(model, _templates(40), STANDARD,
          _tc(epochs=3, checkpoint_every=2), out_dir=out_dir)
    assert sorted(os.listdir(os.path.join(out_dir, "checkpoints"))) == \
        ["epoch_002.ckpt"]
    loaded = load_checkpoint(TINY, os.path.join(out_dir, "checkpoints",
                                                "epoch_002.ckpt"))
    assert loaded.metadata == {"epoch": 2, "objective": "standard"}
    with pytest.raises(ValueError):
        train(model, _templates(40), STANDARD, _tc(checkpoint_every=1))


def test_divergence_reports_terms():
    model = build(TINY, T.RngStream(0))
    model.params["layer3.weight"].data[...] = np.nan
    cfg = ObjectiveConfig(kind="adversarial", alpha=0.2,
                          attack=AttackConfig.fgsm(0.0))
    with pytest.raises(TrainingDivergedError) as err:
        train(model, _templates(40), cfg, _tc())
    assert (err.value.epoch, err.value.batch) == (1, 0)
    assert set(err.value.terms) == {"total", "clean", "adversarial"}
    assert "epoch 1, batch 0" in str(err.value)


def test_beta_mismatch_is_rejected_before_training():
    model = build(TINY, T.RngStream(0))
    before = model.params["layer0.weight"].data.copy()
    cfg = ObjectiveConfig(kind="distortion-regularized", alpha=0.2,
                          betas=[1e-7, 1e-7, 3e-7],
                          attack=AttackConfig.fgsm(0.2))
    with pytest.raises(ConfigError):
        train(model, _templates(40), cfg, _tc())
    npt.assert_array_equal(model.params["layer0.weight"].data, before)


def test_train_config():
    tc = TrainConfig.from_dict({"epochs": 2, "batch_size": 64,
                                "learning_rate": "1e-2", "subset": 1000})
    assert tc.learning_rate == 0.01
    assert tc.momentum == 0.9
    assert tc.to_dict()["subset"] == 1000
    with pytest.raises(ConfigError) as err:
        TrainConfig.from_dict({"epochs": 0, "momentum": 1.0,
                               "dataset": "svhn"})
    assert len(err.value.errors) == 3
    with pytest.raises(ConfigError):
        TrainConfig.from_dict({"epoch": 2})
    with pytest.raises(ConfigError):
        TrainConfig.from_dict({"epochs": 2.5})


@pytest.mark.skipif(not MNIST_DIR, reason="PYROBUSTFEAT_MNIST_DIR not set")
def test_mnist_subset_smoke_training():
    spec = NetworkSpec.from_dict({
        "name": "mnist-small", "input_shape": [1, 28, 28],
        "layers": [
            {"kind": "conv", "kernel": [5, 5], "in_channels": 1,
             "out_channels": 8, "normalize": True, "activation": "relu"},
            {"kind": "maxpool"},
            {"kind": "dense", "units": 64, "normalize": True,
             "activation": "relu"},
            {"kind": "softmax", "units": 10}]})
    data = subset(load_mnist(MNIST_DIR, split="train"), 1000,
                  T.RngStream(0).child("subset"))
    model = build(spec, T.RngStream(0).child("init"))
    _, history = train(model, data, STANDARD,
                       TrainConfig(epochs=2, batch_size=64, seed=0))
    assert history[1]["clean_accuracy"] > history[0]["clean_accuracy"]
