"""Corpus preparation: key normalization, augmentation, vocabularies, windows.

Every melody is transposed so its tonic lands on a common target pitch
class (C by default) before tokenization. The vocabularies are dense,
deterministic indexings of the token strings, with PAD reserved at index
0 in both and the rest token always present in the pitch vocabulary.
"""

from __future__ import annotations

import hashlib
import json
import warnings
from dataclasses import dataclass
from fractions import Fraction
from pathlib import Path
from typing import Optional, Sequence

from .errors import DataError
from .musicxml import parse_musicxml_file
from .notes import PAD, REST, DurationToken, KeySignature, Melody, PitchToken

_PC_OF_NAME = {"C": 0, "D": 2, "E": 4, "F": 5, "G": 7, "A": 9, "B": 11}

PAD_INDEX = 0
PAD_PAIR = (PAD_INDEX, PAD_INDEX)


def _pitch_class_of(target) -> int:
    if isinstance(target, int):
        return target % 12
    name = str(target).strip()
    base = _PC_OF_NAME.get(name[0].upper())
    if base is None:
        raise DataError(f"unknown pitch class {target!r}")
    for ch in name[1:]:
        base += {"#": 1, "b": -1}.get(ch, 0)
    return base % 12


def _fifths_for_tonic(pc: int, mode: str) -> int:
    rel = pc if mode != "minor" else (pc + 3) % 12
    # 7 is its own inverse mod 12; keep fifths in -5..6
    return ((7 * rel) + 5) % 12 - 5


def detect_tonic(melody: Melody) -> tuple[int, bool]:
    """Tonic pitch class plus whether it came from a key signature."""
    if melody.key_signature is not None:
        return melody.key_signature.tonic_pitch_class(), True
    for pitch, _ in reversed(melody.events):
        if not pitch.is_rest:
            return pitch.pitch_class, False
    raise DataError(f"melody {melody.source_id!r} is all rests; tonic undetectable")


def normalize_key(melody: Melody, target_tonic="C") -> Melody:
    """Transpose so the detected tonic lands on target_tonic.

    The direction minimizing absolute semitone motion is chosen, ties
    breaking downward. Idempotent: a second application is the identity.
    """
    target_pc = _pitch_class_of(target_tonic)
    tonic_pc, from_signature = detect_tonic(melody)
    if not from_signature:
        warnings.warn(
            f"no key signature in {melody.source_id!r}; using final note as tonic",
            stacklevel=2,
        )
    shift = ((target_pc - tonic_pc + 6) % 12) - 6
    if shift == 0:
        return melody
    out = melody.transpose(shift)
    mode = melody.key_signature.mode if melody.key_signature else "major"
    if from_signature:
        out.key_signature = KeySignature(fifths=_fifths_for_tonic(target_pc, mode), mode=mode)
    return out


def augment_all_keys(corpus: Sequence[Melody]) -> list[Melody]:
    """All 12 minimal-motion transpositions (-6..+5) of every melody."""
    if not corpus:
        raise DataError("cannot augment an empty corpus")
    out = []
    for melody in corpus:
        for shift in range(-6, 6):
            m = melody.transpose(shift)
            m.source_id = f"{melody.source_id}_t{shift:+d}"
            out.append(m)
    return out


@dataclass(frozen=True)
class Vocabulary:
    """Dense bijective token<->index maps for both event halves.

    Index 0 is PAD in both vocabularies; the rest token is always present
    in the pitch vocabulary. Order is deterministic: notes by (MIDI
    number, spelling), durations ascending.
    """

    pitch_tokens: tuple[str, ...]
    duration_tokens: tuple[str, ...]

    def __post_init__(self):
        for tokens, label in ((self.pitch_tokens, "pitch"), (self.duration_tokens, "duration")):
            if len(set(tokens)) != len(tokens):
                raise DataError(f"duplicate tokens in {label} vocabulary")
            if tokens[PAD_INDEX] != PAD:
                raise DataError(f"{label} vocabulary must reserve index 0 for {PAD}")
        object.__setattr__(self, "_pitch_index", {t: i for i, t in enumerate(self.pitch_tokens)})
        object.__setattr__(self, "_duration_index", {t: i for i, t in enumerate(self.duration_tokens)})

    @property
    def pitch_size(self) -> int:
        return len(self.pitch_tokens)

    @property
    def duration_size(self) -> int:
        return len(self.duration_tokens)

    def pitch_index(self, token: str) -> int:
        try:
            return self._pitch_index[token]
        except KeyError:
            raise DataError(
                f"pitch token {token!r} not in vocabulary; nearest: "
                f"{_nearest_tokens(token, self.pitch_tokens)}"
            ) from None

    def duration_index(self, token: str) -> int:
        try:
            return self._duration_index[token]
        except KeyError:
            raise DataError(
                f"duration token {token!r} not in vocabulary; nearest: "
                f"{_nearest_tokens(token, self.duration_tokens)}"
            ) from None

    def encode_event(self, pitch: PitchToken, duration: DurationToken) -> tuple[int, int]:
        return self.pitch_index(str(pitch)), self.duration_index(str(duration))

    def encode_melody(self, melody: Melody) -> list[tuple[int, int]]:
        return [self.encode_event(p, d) for p, d in melody.events]

    def decode_melody(self, pairs: Sequence[tuple[int, int]], source_id: str = "") -> Melody:
        events = []
        for pi, di in pairs:
            if pi == PAD_INDEX or di == PAD_INDEX:
                raise DataError("PAD has no musical meaning; cannot decode")
            events.append(
                (PitchToken.parse(self.pitch_tokens[pi]), DurationToken.parse(self.duration_tokens[di]))
            )
        return Melody(events=events, source_id=source_id)

    def to_json(self) -> str:
        payload = {
            "duration": list(self.duration_tokens),
            "pitch": list(self.pitch_tokens),
            "version": 1,
        }
        return json.dumps(payload, ensure_ascii=False, indent=2, sort_keys=True) + "\n"

    @staticmethod
    def from_json(text: str) -> "Vocabulary":
        payload = json.loads(text)
        return Vocabulary(tuple(payload["pitch"]), tuple(payload["duration"]))

    def pitch_hash(self) -> str:
        return _hash_tokens(self.pitch_tokens)

    def duration_hash(self) -> str:
        return _hash_tokens(self.duration_tokens)


def _hash_tokens(tokens: Sequence[str]) -> str:
    canon = json.dumps(list(tokens), ensure_ascii=False, separators=(",", ":"))
    return hashlib.sha256(canon.encode("utf-8")).hexdigest()


def _nearest_tokens(token: str, tokens: Sequence[str], n: int = 3) -> list[str]:
    def score(t: str) -> int:
        return sum(a == b for a, b in zip(t, token)) - abs(len(t) - len(token))

    candidates = [t for t in tokens if t != PAD]
    return sorted(candidates, key=score, reverse=True)[:n]


def _pitch_sort_key(token: str):
    p = PitchToken.parse(token)
    return (p.midi, token)


def build_vocab(corpus: Sequence[Melody]) -> Vocabulary:
    """Vocabularies over exactly the corpus tokens plus PAD and rest."""
    if not corpus:
        raise DataError("cannot build a vocabulary from an empty corpus")
    note_tokens: set[str] = set()
    has_rest = False
    durations: set[str] = set()
    for melody in corpus:
        for pitch, duration in melody.events:
            if pitch.is_rest:
                has_rest = True
            else:
                note_tokens.add(str(pitch))
            durations.add(str(duration))
    del has_rest  # rest is reserved either way
    pitch_tokens = (PAD, REST, *sorted(note_tokens, key=_pitch_sort_key))
    duration_tokens = (PAD, *sorted(durations, key=lambda t: DurationToken.parse(t).quarter_length))
    return Vocabulary(pitch_tokens, duration_tokens)


@dataclass(frozen=True)
class TrainingWindow:
    """sql encoded input events and the index pair of the next event."""

    inputs: tuple[tuple[int, int], ...]
    target: tuple[int, int]
    source_id: str = ""


def windowize(corpus: Sequence[Melody], vocab: Vocabulary, sql: int) -> list[TrainingWindow]:
    """One window per position where sql inputs + 1 target fit.

    Melodies shorter than sql+1 yield a single left-PAD-padded window, so
    every melody contributes: count == sum(max(1, len(m) - sql)).
    """
    if sql < 1:
        raise DataError(f"window length must be >= 1, got {sql}")
    windows: list[TrainingWindow] = []
    for melody in corpus:
        pairs = vocab.encode_melody(melody)
        n = len(pairs)
        if n >= sql + 1:
            for i in range(n - sql):
                windows.append(
                    TrainingWindow(tuple(pairs[i : i + sql]), pairs[i + sql], melody.source_id)
                )
        else:
            padded = [PAD_PAIR] * (sql - (n - 1)) + pairs[: n - 1]
            windows.append(TrainingWindow(tuple(padded), pairs[n - 1], melody.source_id))
    return windows


def load_corpus_dir(path: str | Path) -> list[Melody]:
    """All .musicxml/.xml files under path, sorted by filename."""
    path = Path(path)
    files = sorted(p for p in path.iterdir() if p.suffix.lower() in (".musicxml", ".xml"))
    if not files:
        raise DataError(f"no .musicxml/.xml files found in {path}")
    return [parse_musicxml_file(p) for p in files]


def write_vocab_json(vocab: Vocabulary, path: str | Path) -> None:
    Path(path).write_text(vocab.to_json(), encoding="utf-8")


def read_vocab_json(path: str | Path) -> Vocabulary:
    return Vocabulary.from_json(Path(path).read_text(encoding="utf-8"))
