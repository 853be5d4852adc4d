"""Pitch and duration tokens and the monophonic melody container.

Pitches use scientific pitch notation (A4 = MIDI 69, C4 = MIDI 60).
Durations are exact rationals measured in quarter notes, so encode/decode
never drifts. Rests are pitch tokens of their own kind and render as "R".
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, Optional

from .errors import DataError

# Reserved vocabulary strings. PAD never appears inside a Melody.
PAD = "PAD"
REST = "R"

_LETTER_TO_PC = {"C": 0, "D": 2, "E": 4, "F": 5, "G": 7, "A": 9, "B": 11}
# Sharp-preferred spelling for transposition results.
_PC_TO_NAME = ["C", "C#", "D", "D#", "E", "F", "F#", "G", "G#", "A", "A#", "B"]

_PITCH_RE = re.compile(r"^([A-G])(#{1,2}|b{1,2})?(-?\d+)$")


@dataclass(frozen=True)
class PitchToken:
    """A note name + octave, or a rest."""

    kind: str  # "note" | "rest"
    letter: Optional[str] = None
    alter: int = 0  # semitone alteration: # = +1, b = -1
    octave: Optional[int] = None

    def __post_init__(self):
        if self.kind == "note":
            if self.letter not in _LETTER_TO_PC or self.octave is None:
                raise DataError(f"invalid note token: {self!r}")
            if not -2 <= self.alter <= 2:
                raise DataError(f"unsupported accidental alter={self.alter}")
        elif self.kind == "rest":
            if self.letter is not None or self.octave is not None:
                raise DataError("a rest carries no name or octave")
        else:
            raise DataError(f"unknown pitch kind {self.kind!r}")

    @property
    def is_rest(self) -> bool:
        return self.kind == "rest"

    @property
    def midi(self) -> int:
        """MIDI note number; C4 = 60, A4 = 69."""
        if self.is_rest:
            raise DataError("a rest has no MIDI number")
        return (self.octave + 1) * 12 + _LETTER_TO_PC[self.letter] + self.alter

    @property
    def pitch_class(self) -> int:
        return self.midi % 12

    def transpose(self, semitones: int) -> "PitchToken":
        """Shift by semitones, respelling sharp-preferred.

        A zero shift keeps the original spelling, so identity
        transposition is exact even for flat-spelled input.
        """
        if self.is_rest or semitones == 0:
            return self
        return PitchToken.from_midi(self.midi + semitones)

    @staticmethod
    def rest() -> "PitchToken":
        return PitchToken(kind="rest")

    @staticmethod
    def from_midi(midi: int) -> "PitchToken":
        if not 0 <= midi <= 127:
            raise DataError(f"MIDI number {midi} outside 0..127")
        name = _PC_TO_NAME[midi % 12]
        octave = midi // 12 - 1
        letter, alter = name[0], len(name) - 1  # only naturals / single sharps
        return PitchToken(kind="note", letter=letter, alter=alter, octave=octave)

    @staticmethod
    def parse(text: str) -> "PitchToken":
        """Inverse of str(); accepts e.g. "A4", "C#5", "Bb3", "R"."""
        if text == REST:
            return PitchToken.rest()
        m = _PITCH_RE.match(text)
        if not m:
            raise DataError(f"cannot parse pitch token {text!r}")
        letter, acc, octave = m.groups()
        alter = 0
        if acc:
            alter = len(acc) if acc[0] == "#" else -len(acc)
        return PitchToken(kind="note", letter=letter, alter=alter, octave=int(octave))

    def __str__(self) -> str:
        if self.is_rest:
            return REST
        if self.alter >= 0:
            acc = "#" * self.alter
        else:
            acc = "b" * (-self.alter)
        return f"{self.letter}{acc}{self.octave}"


@dataclass(frozen=True)
class DurationToken:
    """Duration in quarter notes as an exact rational."""

    quarter_length: Fraction

    def __post_init__(self):
        ql = self.quarter_length
        if not isinstance(ql, Fraction):
            object.__setattr__(self, "quarter_length", Fraction(ql))
        if self.quarter_length <= 0:
            raise DataError(f"duration must be positive, got {self.quarter_length}")

    @staticmethod
    def parse(text: str) -> "DurationToken":
        """Inverse of str(); accepts "1", "1/2", "3/2", and decimals like "0.5"."""
        text = text.strip()
        try:
            if "/" in text:
                num, den = text.split("/", 1)
                return DurationToken(Fraction(int(num), int(den)))
            if "." in text:
                return DurationToken(Fraction(text))
            return DurationToken(Fraction(int(text)))
        except (ValueError, ZeroDivisionError) as exc:
            raise DataError(f"cannot parse duration token {text!r}") from exc

    def __str__(self) -> str:
        ql = self.quarter_length
        return str(ql.numerator) if ql.denominator == 1 else f"{ql.numerator}/{ql.denominator}"

    def __float__(self) -> float:
        return float(self.quarter_length)


Event = tuple[PitchToken, DurationToken]


@dataclass
class KeySignature:
    """MusicXML-style key: number of sharps (+) / flats (-) and a mode."""

    fifths: int = 0
    mode: str = "major"  # "major" | "minor"

    # Pitch class of the tonic: fifths move the major tonic around the
    # circle of fifths; minor keys sit a minor third below their relative.
    def tonic_pitch_class(self) -> int:
        pc = (7 * self.fifths) % 12
        if self.mode == "minor":
            pc = (pc + 9) % 12
        return pc


@dataclass
class Melody:
    """An ordered monophonic list of (pitch, duration) events."""

    events: list[Event]
    source_id: str = ""
    key_signature: Optional[KeySignature] = None

    def __post_init__(self):
        if not self.events:
            raise DataError(f"melody {self.source_id!r} has no events")

    def __len__(self) -> int:
        return len(self.events)

    def __eq__(self, other) -> bool:
        return isinstance(other, Melody) and self.events == other.events

    def transpose(self, semitones: int) -> "Melody":
        events = [(p.transpose(semitones), d) for p, d in self.events]
        return Melody(events=events, source_id=self.source_id, key_signature=None)

    def token_pairs(self) -> list[tuple[str, str]]:
        """Text form of every event, the unit the vocabularies index."""
        return [(str(p), str(d)) for p, d in self.events]

    def total_quarter_length(self) -> Fraction:
        return sum((d.quarter_length for _, d in self.events), Fraction(0))

    @staticmethod
    def from_token_pairs(pairs: Iterable[tuple[str, str]], source_id: str = "") -> "Melody":
        events = [(PitchToken.parse(p), DurationToken.parse(d)) for p, d in pairs]
        return Melody(events=events, source_id=source_id)


def event(pitch: str, duration) -> Event:
    """Shorthand used all over the tests: event("A4", 1) or event("R", "1/2")."""
    return (PitchToken.parse(pitch), DurationToken.parse(str(duration)))
