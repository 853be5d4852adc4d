"""Query execution: seed priming, temperature lookup, sampled decoding.

A query names a year; the year names its two sampling temperatures; the
model is primed with the seed window and sampled autoregressively,
recording the attention row and both candidate distributions at every
step. All randomness flows through a pinned PCG64 generator so a (query,
checkpoint, rng seed) triple always reproduces the same melody.
"""

from __future__ import annotations

from dataclasses import dataclass, replace
from typing import Optional, Sequence

import numpy as np

from .climate import TemperatureVectors
from .corpus import PAD_INDEX, PAD_PAIR, Vocabulary
from .errors import ClimateDataError, DataError
from .model import ModelParams, model_forward, temperature_softmax
from .notes import DurationToken, Event, Melody, PitchToken
from .training import Checkpoint

DEFAULT_SEED_EVENTS: tuple[Event, ...] = (
    (PitchToken.parse("A4"), DurationToken.parse("1")),
)


@dataclass(frozen=True)
class GenerationQuery:
    """One sonification request: a year plus decoding settings."""

    year: int
    seed: tuple[Event, ...] = DEFAULT_SEED_EVENTS
    mxx: int = 8  # max new sampled events
    mxl: int = 16  # hard cap on total events including the seed
    sql: int = 16  # model window length; must match the checkpoint
    rng_seed: int = 0
    pitch_temperature: Optional[float] = None  # manual overrides
    duration_temperature: Optional[float] = None

    def __post_init__(self):
        object.__setattr__(self, "seed", tuple(self.seed))
        if self.mxx < 1:
            raise DataError(f"mxx must be >= 1, got {self.mxx}")
        if self.sql < 1:
            raise DataError(f"sql must be >= 1, got {self.sql}")
        if self.mxl < 1:
            raise DataError(f"mxl must be >= 1, got {self.mxl}")
        if self.mxl < len(self.seed):
            raise DataError(
                f"mxl {self.mxl} is below the seed length {len(self.seed)}"
            )
        for label, t in (
            ("pitch", self.pitch_temperature),
            ("duration", self.duration_temperature),
        ):
            if t is not None and not 0.0 <= t <= 1.0:
                raise DataError(f"{label} temperature override {t} outside [0,1]")

    @property
    def new_events(self) -> int:
        return min(self.mxx, self.mxl - len(self.seed))

    def echo(self) -> dict:
        return {
            "year": self.year,
            "seed": [[str(p), str(d)] for p, d in self.seed],
            "mxx": self.mxx,
            "mxl": self.mxl,
            "sql": self.sql,
            "rng_seed": self.rng_seed,
            "pitch_temperature": self.pitch_temperature,
            "duration_temperature": self.duration_temperature,
        }


@dataclass
class GenerationResult:
    """The melody plus everything recorded while sampling it."""

    melody: Melody
    seed_length: int
    attention: np.ndarray  # (steps, sql)
    pitch_candidates: np.ndarray  # (steps, |pitch vocab|)
    duration_candidates: np.ndarray  # (steps, |duration vocab|)
    temperatures: tuple[float, float]  # (pitch, duration)
    query: GenerationQuery

    @property
    def generated_events(self) -> list[Event]:
        return self.melody.events[self.seed_length :]


def resolve_temperatures(
    query: GenerationQuery, vectors: TemperatureVectors
) -> tuple[float, float]:
    """The year's vector entries, unless the query overrides them."""
    t_pitch = query.pitch_temperature
    t_dur = query.duration_temperature
    if t_pitch is None or t_dur is None:
        if query.year not in vectors:
            years = vectors.years
            raise ClimateDataError(
                f"unknown year {query.year}; valid range {years[0]}..{years[-1]}"
            )
        year_pitch, year_dur = vectors.for_year(query.year)
        t_pitch = year_pitch if t_pitch is None else t_pitch
        t_dur = year_dur if t_dur is None else t_dur
    return t_pitch, t_dur


def prime_window(
    seed: Sequence[Event], sql: int, vocab: Vocabulary
) -> list[tuple[int, int]]:
    """Left-PAD the encoded seed to sql; overlong seeds keep the tail."""
    encoded = [vocab.encode_event(p, d) for p, d in seed]
    if len(encoded) >= sql:
        return encoded[-sql:]
    return [PAD_PAIR] * (sql - len(encoded)) + encoded


def make_rng(seed: int) -> np.random.Generator:
    """The pinned generator: PCG64, identical streams on any platform."""
    return np.random.Generator(np.random.PCG64(seed))


def sample_index(probabilities: np.ndarray, rng: np.random.Generator) -> int:
    """Inverse-CDF draw; deterministic given the generator state."""
    cdf = np.cumsum(probabilities)
    u = rng.random()
    return int(min(np.searchsorted(cdf, u, side="right"), len(probabilities) - 1))


def _mask_pad(q: np.ndarray, logits: np.ndarray) -> np.ndarray:
    """Zero the PAD entry and renormalize; degenerate rows fall back to
    a one-hot at the best non-PAD logit."""
    out = q.copy()
    out[PAD_INDEX] = 0.0
    total = out.sum()
    if total <= 0.0:
        out[:] = 0.0
        out[1 + int(np.argmax(logits[1:]))] = 1.0
        return out
    return out / total


def generate(
    query: GenerationQuery,
    checkpoint: Checkpoint,
    vectors: TemperatureVectors,
) -> GenerationResult:
    """Sample min(mxx, mxl - len(seed)) events after the seed."""
    if query.sql != checkpoint.config.sql:
        raise DataError(
            f"query sql {query.sql} does not match the checkpoint's "
            f"trained sql {checkpoint.config.sql}"
        )
    vocab = checkpoint.vocab
    t_pitch, t_dur = resolve_temperatures(query, vectors)
    window = prime_window(query.seed, query.sql, vocab)
    rng = make_rng(query.rng_seed)
    n_new = max(0, query.new_events)

    attention_rows = np.zeros((n_new, query.sql))
    pitch_rows = np.zeros((n_new, vocab.pitch_size))
    duration_rows = np.zeros((n_new, vocab.duration_size))
    events: list[Event] = list(query.seed)

    for step in range(n_new):
        z_p, z_d, trace = model_forward(window, checkpoint.params)
        q_p = _mask_pad(temperature_softmax(z_p, t_pitch), z_p)
        q_d = _mask_pad(temperature_softmax(z_d, t_dur), z_d)
        pi = sample_index(q_p, rng)
        di = sample_index(q_d, rng)
        attention_rows[step] = trace.weights
        pitch_rows[step] = q_p
        duration_rows[step] = q_d
        events.append(
            (
                PitchToken.parse(vocab.pitch_tokens[pi]),
                DurationToken.parse(vocab.duration_tokens[di]),
            )
        )
        window = window[1:] + [(pi, di)]

    melody = Melody(events=events, source_id=f"{query.year}_{query.rng_seed}")
    return GenerationResult(
        melody=melody,
        seed_length=len(query.seed),
        attention=attention_rows,
        pitch_candidates=pitch_rows,
        duration_candidates=duration_rows,
        temperatures=(t_pitch, t_dur),
        query=query,
    )


@dataclass
class RangeResult:
    """Per-year results plus their concatenation, in year order."""

    results: list[GenerationResult]
    concatenated: Melody


def generate_range(
    start_year: int,
    end_year: int,
    template: GenerationQuery,
    checkpoint: Checkpoint,
    vectors: TemperatureVectors,
) -> RangeResult:
    """One generation per year; each year's rng seed is offset by its
    distance from the start so runs stay reproducible yet distinct."""
    if start_year > end_year:
        raise DataError(f"start year {start_year} is after end year {end_year}")
    results = []
    for year in range(start_year, end_year + 1):
        query = replace(template, year=year, rng_seed=template.rng_seed + (year - start_year))
        results.append(generate(query, checkpoint, vectors))
    events: list[Event] = []
    for r in results:
        events.extend(r.melody.events)
    concatenated = Melody(events=events, source_id=f"{start_year}-{end_year}")
    return RangeResult(results=results, concatenated=concatenated)
