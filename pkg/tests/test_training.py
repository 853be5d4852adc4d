"""Training loop, early stopping, and checkpoint container tests."""

import dataclasses

import numpy as np
import pytest

from climatune.corpus import TrainingWindow, build_vocab, windowize
from climatune.errors import CheckpointError, ModelError
from climatune.notes import Melody, event
from climatune.training import (
    TrainConfig,
    TrainHistory,
    checkpoint_sha256,
    load_checkpoint,
    save_checkpoint,
    split_train_val,
    train,
)

from conftest import TINY_CONFIG, memorization_corpus


def fake_windows(n: int) -> list[TrainingWindow]:
    return [
        TrainingWindow(inputs=((1, 1), (2, 1)), target=(1, 1), source_id=f"w{i}")
        for i in range(n)
    ]


def tiny_linear_corpus() -> list[Melody]:
    return [Melody(events=[event(p, 1) for p in ["C4", "D4", "E4", "F4", "G4", "A4"]], source_id="scale")]


class TestTrainConfig:
    def test_defaults(self):
        config = TrainConfig()
        assert config.hidden == 256
        assert config.sql == 16
        assert config.patience == 10
        assert config.optimizer == "adam"

    def test_patience_validated(self):
        with pytest.raises(ModelError, match="patience"):
            TrainConfig(patience=0)

    def test_val_fraction_validated(self):
        with pytest.raises(ModelError, match="fraction"):
            TrainConfig(val_fraction=0.6)
        with pytest.raises(ModelError, match="fraction"):
            TrainConfig(val_fraction=0.0)

    def test_optimizer_validated(self):
        with pytest.raises(ModelError, match="optimizer"):
            TrainConfig(optimizer="sgd")


class TestSplitTrainVal:
    def test_100_windows_fraction_point_one(self):
        train_set, val_set = split_train_val(fake_windows(100), 0.1, seed=0)
        assert len(train_set) == 90
        assert len(val_set) == 10

    def test_same_seed_identical(self):
        windows = fake_windows(40)
        a = split_train_val(windows, 0.25, seed=5)
        b = split_train_val(windows, 0.25, seed=5)
        assert [w.source_id for w in a[0]] == [w.source_id for w in b[0]]
        assert [w.source_id for w in a[1]] == [w.source_id for w in b[1]]

    def test_seven_windows_round_to_one(self):
        train_set, val_set = split_train_val(fake_windows(7), 0.1, seed=1)
        assert len(val_set) == max(1, round(0.7)) == 1
        assert len(train_set) == 6

    def test_partition_preserves_windows(self):
        windows = fake_windows(23)
        train_set, val_set = split_train_val(windows, 0.3, seed=2)
        ids = sorted(w.source_id for w in train_set + val_set)
        assert ids == sorted(w.source_id for w in windows)

    def test_both_sides_nonempty_even_at_half(self):
        train_set, val_set = split_train_val(fake_windows(2), 0.5, seed=0)
        assert len(train_set) == 1 and len(val_set) == 1

    def test_too_few_windows(self):
        with pytest.raises(ModelError, match="at least 2"):
            split_train_val(fake_windows(1), 0.1, seed=0)


class TestTrain:
    def test_memorization_reaches_low_validation_loss(self, trained):
        assert min(trained.history.val_loss) < 0.05

    def test_early_stopping_triggered(self, trained):
        """A coarser min_delta makes the patience counter win.

        On the memorization corpus validation loss keeps improving by
        more than the default min_delta, so that run goes the full 300
        epochs; with min_delta=0.01 the late sub-0.01 gains stop it.
        """
        config = dataclasses.replace(TINY_CONFIG, min_delta=0.01)
        windows = trained.windows
        _, history = train(windows, trained.vocab, config)
        assert history.stopped_epoch < config.max_epochs
        assert history.stopped_epoch - history.best_epoch <= config.patience
        assert min(history.val_loss) < 0.05

    def test_run_without_plateau_uses_every_epoch(self, trained):
        assert trained.history.stopped_epoch == TINY_CONFIG.max_epochs

    def test_stop_within_patience_of_best(self, trained):
        h = trained.history
        assert h.stopped_epoch - h.best_epoch <= TINY_CONFIG.patience

    def test_returned_params_are_best_epoch_params(self, trained):
        h = trained.history
        assert h.val_loss[h.best_epoch - 1] == min(h.val_loss)

    def test_history_lengths_match_stopped_epoch(self, trained):
        h = trained.history
        assert len(h.train_loss) == len(h.val_loss) == h.stopped_epoch

    def test_five_window_corpus_loss_decreases(self):
        corpus = tiny_linear_corpus()
        vocab = build_vocab(corpus)
        windows = windowize(corpus, vocab, sql=1)
        assert len(windows) == 5
        config = TrainConfig(
            hidden=8,
            d_pitch=4,
            d_duration=2,
            sql=1,
            max_epochs=12,
            patience=12,
            val_fraction=0.2,
            seed=3,
        )
        _, history = train(windows, vocab, config)
        assert history.train_loss[-1] < history.train_loss[0]

    def test_bit_identical_reruns(self, tmp_path):
        corpus = memorization_corpus()
        vocab = build_vocab(corpus)
        windows = windowize(corpus, vocab, sql=4)
        config = TrainConfig(
            hidden=12, d_pitch=6, d_duration=3, sql=4, max_epochs=6, patience=6, val_fraction=0.2, seed=11
        )
        paths = []
        histories = []
        for run in range(2):
            params, history = train(windows, vocab, config)
            path = tmp_path / f"run{run}.cltn"
            save_checkpoint(params, vocab, config, path)
            paths.append(path)
            histories.append(history)
        assert paths[0].read_bytes() == paths[1].read_bytes()
        assert histories[0].val_loss == histories[1].val_loss

    def test_momentum_optimizer_runs(self):
        corpus = tiny_linear_corpus()
        vocab = build_vocab(corpus)
        windows = windowize(corpus, vocab, sql=1)
        config = TrainConfig(
            hidden=8,
            d_pitch=4,
            d_duration=2,
            sql=1,
            optimizer="momentum",
            max_epochs=8,
            patience=8,
            val_fraction=0.2,
            seed=3,
        )
        _, history = train(windows, vocab, config)
        assert history.train_loss[-1] < history.train_loss[0]

    def test_divergence_aborts_with_window_named(self):
        corpus = tiny_linear_corpus()
        vocab = build_vocab(corpus)
        windows = windowize(corpus, vocab, sql=1)
        config = TrainConfig(
            hidden=8,
            d_pitch=4,
            d_duration=2,
            sql=1,
            optimizer="momentum",
            learning_rate=1e200,
            max_epochs=40,
            patience=40,
            val_fraction=0.2,
            seed=3,
        )
        with np.errstate(over="ignore", invalid="ignore"):
            with pytest.raises(ModelError, match="non-finite loss.*scale"):
                train(windows, vocab, config)


class TestTrainHistory:
    def test_json_round_trip(self, trained):
        text = trained.history.to_json()
        loaded = TrainHistory.from_json(text)
        assert loaded == trained.history


class TestCheckpoint:
    def test_round_trip_bit_exact(self, trained, tmp_path):
        loaded = load_checkpoint(trained.path)
        for name, arr in trained.checkpoint.params.tensors():
            assert np.array_equal(getattr(loaded.params, name), arr), name
        assert loaded.vocab == trained.vocab
        assert loaded.config == TINY_CONFIG

    def test_resave_is_byte_identical(self, trained, tmp_path):
        loaded = load_checkpoint(trained.path)
        path = tmp_path / "again.cltn"
        save_checkpoint(loaded.params, loaded.vocab, loaded.config, path)
        assert path.read_bytes() == trained.path.read_bytes()

    def test_expected_vocab_accepts_match(self, trained):
        loaded = load_checkpoint(trained.path, expected_vocab=trained.vocab)
        assert loaded.vocab == trained.vocab

    def test_mismatched_vocab_prints_both_hashes(self, trained):
        other = build_vocab(tiny_linear_corpus())
        with pytest.raises(CheckpointError, match="mismatch") as exc:
            load_checkpoint(trained.path, expected_vocab=other)
        message = str(exc.value)
        assert trained.vocab.pitch_hash() in message
        assert other.pitch_hash() in message

    def test_corrupt_final_byte(self, trained, tmp_path):
        raw = bytearray(trained.path.read_bytes())
        raw[-1] ^= 0xFF
        bad = tmp_path / "corrupt.cltn"
        bad.write_bytes(bytes(raw))
        with pytest.raises(CheckpointError, match="checksum|truncat"):
            load_checkpoint(bad)

    def test_flipped_payload_byte(self, trained, tmp_path):
        raw = bytearray(trained.path.read_bytes())
        raw[len(raw) // 2] ^= 0x01
        bad = tmp_path / "flip.cltn"
        bad.write_bytes(bytes(raw))
        with pytest.raises(CheckpointError):
            load_checkpoint(bad)

    def test_truncated_file(self, trained, tmp_path):
        raw = trained.path.read_bytes()
        bad = tmp_path / "short.cltn"
        bad.write_bytes(raw[: len(raw) - 40])
        with pytest.raises(CheckpointError, match="truncated"):
            load_checkpoint(bad)

    def test_bad_magic(self, tmp_path):
        bad = tmp_path / "not.cltn"
        bad.write_bytes(b"NOPE" + b"\x00" * 64)
        with pytest.raises(CheckpointError, match="magic"):
            load_checkpoint(bad)

    def test_unsupported_version(self, trained, tmp_path):
        raw = bytearray(trained.path.read_bytes())
        raw[4] = 9
        bad = tmp_path / "v9.cltn"
        bad.write_bytes(bytes(raw))
        with pytest.raises(CheckpointError, match="version 9"):
            load_checkpoint(bad)

    def test_missing_file(self, tmp_path):
        with pytest.raises(CheckpointError, match="cannot read"):
            load_checkpoint(tmp_path / "absent.cltn")

    def test_sha256_matches_file_bytes(self, trained):
        import hashlib

        digest = hashlib.sha256(trained.path.read_bytes()).hexdigest()
        assert checkpoint_sha256(trained.path) == digest
