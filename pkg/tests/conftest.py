"""Shared fixtures: the vendored snapshot, tiny corpora, a trained model.

The session-scoped checkpoint is deliberately small (hidden 32, sql 4)
so the whole suite trains it once in seconds; every generation, CLI,
and service test shares it.
"""

from __future__ import annotations

from dataclasses import dataclass
from pathlib import Path

import pytest

from climatune.climate import (
    TemperatureVectors,
    build_temperature_vectors,
    parse_climate_csv_file,
    write_temperatures_json,
)
from climatune.corpus import Vocabulary, build_vocab, windowize
from climatune.notes import Melody, event
from climatune.training import Checkpoint, TrainConfig, TrainHistory, save_checkpoint, train

REPO = Path(__file__).resolve().parents[1]
SNAPSHOT_CSV = REPO / "data" / "tokyo_tmax_monthly.csv"
CORPUS_DIR = REPO / "data" / "corpus"


def memorization_corpus() -> list[Melody]:
    """Three cyclic melodies with disjoint (pitch, duration) windows.

    Every length-4 window's continuation is globally consistent, so a
    model that memorizes the corpus drives validation loss toward 0.
    """
    cycles = [
        ("major", [("C4", "1"), ("E4", "1"), ("G4", "1"), ("E4", "1")]),
        ("steps", [("A4", "1/2"), ("G4", "1/2"), ("E4", "1/2"), ("D4", "1/2")]),
        ("slow", [("F4", "2"), ("A4", "2"), ("C5", "2"), ("A4", "2")]),
    ]
    melodies = []
    for name, cycle in cycles:
        events = [event(p, d) for p, d in cycle * 4]
        melodies.append(Melody(events=events, source_id=name))
    return melodies


TINY_CONFIG = TrainConfig(
    hidden=32,
    d_pitch=12,
    d_duration=6,
    sql=4,
    max_epochs=300,
    patience=10,
    val_fraction=0.2,
    seed=7,
)


@dataclass
class TrainedFixture:
    checkpoint: Checkpoint
    history: TrainHistory
    path: Path
    vocab: Vocabulary
    windows: list
    melodies: list[Melody]


@pytest.fixture(scope="session")
def trained(tmp_path_factory) -> TrainedFixture:
    melodies = memorization_corpus()
    vocab = build_vocab(melodies)
    windows = windowize(melodies, vocab, TINY_CONFIG.sql)
    params, history = train(windows, vocab, TINY_CONFIG)
    directory = tmp_path_factory.mktemp("model")
    path = directory / "checkpoint.cltn"
    save_checkpoint(params, vocab, TINY_CONFIG, path)
    (directory / "history.json").write_text(history.to_json(), encoding="utf-8")
    checkpoint = Checkpoint(params=params, vocab=vocab, config=TINY_CONFIG)
    return TrainedFixture(
        checkpoint=checkpoint,
        history=history,
        path=path,
        vocab=vocab,
        windows=windows,
        melodies=melodies,
    )


def tiny_vector_table() -> TemperatureVectors:
    """Hand-built vectors over 1876-1885 with exact endpoint values."""
    years = range(1876, 1886)
    pitch = {y: (y - 1876) / 9 for y in years}
    duration = {y: (1885 - y) / 9 for y in years}
    return TemperatureVectors(reference_year=1876, pitch_temp=pitch, duration_temp=duration)


@pytest.fixture(scope="session")
def tiny_vectors() -> TemperatureVectors:
    return tiny_vector_table()


@pytest.fixture(scope="session")
def snapshot_table():
    return parse_climate_csv_file(SNAPSHOT_CSV)


@pytest.fixture(scope="session")
def snapshot_vectors(snapshot_table):
    return build_temperature_vectors(snapshot_table)


@pytest.fixture(scope="session")
def service_data_dir(tmp_path_factory, trained, tiny_vectors) -> Path:
    """A data directory holding everything serve/generate need."""
    directory = tmp_path_factory.mktemp("service-data")
    write_temperatures_json(tiny_vectors, directory / "temperatures.json")
    save_checkpoint(
        trained.checkpoint.params, trained.vocab, TINY_CONFIG, directory / "checkpoint.cltn"
    )
    (directory / "history.json").write_text(trained.history.to_json(), encoding="utf-8")
    return directory
