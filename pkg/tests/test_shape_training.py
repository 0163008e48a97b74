import math
import os

import numpy as np
import pytest
import torch

from conftest import desk_config
from sketch2photo.data.noise import TAG_CLEAN, TAG_COMPLEX
from sketch2photo.errors import TrainingDivergedError
from sketch2photo.shape.trainer import (SHAPE_LOSS_LOG, ShapeBatch,
                                        ShapeTrainer, lr_schedule)


class TestLrSchedule:
    def test_constant_then_linear_decay(self):
        assert lr_schedule(50, 500, 2e-4) == 2e-4
        assert lr_schedule(100, 500, 2e-4) == 2e-4
        assert lr_schedule(300, 500, 2e-4) == pytest.approx(1e-4)
        assert lr_schedule(500, 500, 2e-4) == 0.0

    def test_monotone_non_increasing(self):
        values = [lr_schedule(e, 500, 2e-4) for e in range(1, 501)]
        assert all(a >= b for a, b in zip(values, values[1:]))

    def test_short_runs_stay_constant(self):
        for epoch in (1, 5, 10):
            assert lr_schedule(epoch, 10, 1e-3, constant_epochs=100) == 1e-3

    def test_epoch_out_of_range_raises(self):
        with pytest.raises(ValueError):
            lr_schedule(0, 500, 2e-4)
        with pytest.raises(ValueError):
            lr_schedule(501, 500, 2e-4)


@pytest.fixture
def trainer(dataset):
    return ShapeTrainer(dataset, desk_config())


def make_batch(dataset, tag: str) -> ShapeBatch:
    sketch = dataset.sketches[0]
    if tag == TAG_CLEAN:
        composed = sketch
    else:
        pixels = sketch.pixels.copy()
        pixels[8:24, 8:24] = 0.0
        from sketch2photo.data.images import SketchImage
        composed = SketchImage(pixels)
    return ShapeBatch(sketch=composed, clean=sketch, tag=tag,
                      gray=dataset.grayscales[0])


class TestTrainStep:
    def test_report_total_is_weighted_sum_of_parts(self, trainer, dataset):
        cfg = trainer.config.shape
        report = trainer.train_step(make_batch(dataset, TAG_COMPLEX))
        recombined = (cfg.lambda_adv * (report.adv_t + report.adv_t_prime)
                      + cfg.lambda_cycle * report.cycle
                      + cfg.lambda_identity * report.identity
                      + report.self_supervised)
        assert report.total == pytest.approx(recombined, abs=1e-6)

    def test_clean_batch_has_no_denoising_term(self, trainer, dataset):
        report = trainer.train_step(make_batch(dataset, TAG_CLEAN))
        assert report.self_supervised == 0.0
        assert report.cycle > 0.0

    def test_noise_batch_activates_denoising_term(self, trainer, dataset):
        report = trainer.train_step(make_batch(dataset, TAG_COMPLEX))
        assert report.self_supervised > 0.0

    def test_zero_lr_step_leaves_parameters_bit_identical(self, trainer, dataset):
        trainer.set_lr(0.0)
        before = {name: p.detach().clone()
                  for name, p in trainer.t.named_parameters()}
        trainer.train_step(make_batch(dataset, TAG_CLEAN))
        for name, p in trainer.t.named_parameters():
            assert torch.equal(before[name], p), name

    def test_step_counter_advances(self, trainer, dataset):
        assert trainer.step_count == 0
        trainer.train_step(make_batch(dataset, TAG_CLEAN))
        assert trainer.step_count == 1

    def test_parameters_move_at_positive_lr(self, trainer, dataset):
        before = [p.detach().clone() for p in trainer.t.parameters()]
        trainer.train_step(make_batch(dataset, TAG_CLEAN))
        moved = any(not torch.equal(a, b)
                    for a, b in zip(before, trainer.t.parameters()))
        assert moved


class TestDeterminism:
    def test_same_seed_same_reports(self, dataset):
        def run():
            t = ShapeTrainer(dataset, desk_config())
            return [t.train_step(t.sample_batch()) for _ in range(3)]

        assert run() == run()

    def test_different_seed_different_draws(self, dataset):
        cfg_b = desk_config()
        cfg_b.data.seed = 99
        a = ShapeTrainer(dataset, desk_config())
        b = ShapeTrainer(dataset, cfg_b)
        draws_a = [a.sample_batch().gray.pixels.tobytes() for _ in range(20)]
        draws_b = [b.sample_batch().gray.pixels.tobytes() for _ in range(20)]
        # 20 identical draws from different streams would need a 8^-20 fluke.
        assert draws_a != draws_b


class TestRun:
    def test_writes_csv_log_and_respects_max_steps(self, dataset, tmp_path):
        cfg = desk_config()
        cfg.shape.epochs = 2
        trainer = ShapeTrainer(dataset, cfg)
        reports = trainer.run(out_dir=tmp_path, max_steps=3)
        assert len(reports) == 3
        log = (tmp_path / SHAPE_LOSS_LOG).read_text().strip().splitlines()
        assert log[0].startswith("step,adv_t")
        assert len(log) == 4
        first = log[1].split(",")
        assert int(first[0]) == 1
        assert math.isfinite(float(first[-2]))

    def test_epoch_loop_sets_scheduled_lr(self, dataset):
        cfg = desk_config()
        cfg.shape.epochs = 4
        cfg.shape.lr_constant_epochs = 2
        trainer = ShapeTrainer(dataset, cfg)
        trainer.run(max_steps=dataset.n_sketches * 4)
        assert trainer.epoch == 4
        assert trainer.lr == 0.0


class TestDivergenceGuard:
    def test_non_finite_loss_aborts_with_snapshot(self, dataset, tmp_path,
                                                  monkeypatch):
        trainer = ShapeTrainer(dataset, desk_config())
        trainer.snapshot_dir = os.fspath(tmp_path)

        def exploding_forward(*args, **kwargs):
            return torch.full((1, 1, 64, 64), float("nan"))

        monkeypatch.setattr(trainer.t, "forward", exploding_forward)
        with pytest.raises(TrainingDivergedError, match="non-finite"):
            trainer.train_step(make_batch(dataset, TAG_CLEAN))
        assert (tmp_path / "diverged_snapshot.ckpt").exists()


class TestPoolFallback:
    def test_sparse_corpus_degrades_to_clean_only(self, tmp_path, caplog):
        import logging

        from conftest import write_corpus
        from sketch2photo.data.dataset import load_dataset

        root = write_corpus(tmp_path, n_sketches=2, n_photos=2, seed=5)
        ds = load_dataset(root, 64)
        cfg = desk_config()
        cfg.data.mask_density_threshold = 1.0  # nothing can qualify
        with caplog.at_level(logging.WARNING):
            trainer = ShapeTrainer(ds, cfg)
        assert len(trainer.pool) == 0
        assert any("pool unavailable" in r.message for r in caplog.records)
        tags = {trainer.sample_batch().tag for _ in range(30)}
        assert TAG_COMPLEX not in tags


class TestCheckpointContents:
    def test_checkpoint_carries_everything_needed(self, trainer, dataset):
        trainer.train_step(make_batch(dataset, TAG_CLEAN))
        ck = trainer.make_checkpoint()
        assert ck.stage == "shape"
        assert set(ck.params) == {"t", "t_prime", "d_g", "d_s",
                                  "opt_g", "opt_dg", "opt_ds"}
        assert ck.config["data"]["image_size"] == 64
        assert "numpy" in ck.rng_state and "torch" in ck.rng_state
