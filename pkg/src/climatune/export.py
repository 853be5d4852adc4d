"""Serialization of generation results: MIDI, MusicXML, matrices.

The MusicXML writer and the corpus parser form a round-trip pair:
parse(to_musicxml(m)) == m for every melody this package produces.
Durations crossing a 4/4 barline are split and tied, rests included;
the final measure is left short rather than padded, so no events are
invented. The bundle writer emits the five-file naming convention
<year>_<rngseed>.{mid,musicxml,attention.csv,candidates.csv,manifest.json},
where the manifest doubles as the JSON mirror of both matrices.
"""

from __future__ import annotations

import io
import json
import math
import struct
import xml.etree.ElementTree as ET
from fractions import Fraction
from pathlib import Path
from typing import Optional

from .errors import DataError
from .generation import GenerationResult
from .notes import KeySignature, Melody

TICKS_PER_QUARTER = 480
DEFAULT_TEMPO_BPM = 90
MEASURE_QUARTERS = Fraction(4)

_NOTE_TYPES = {
    Fraction(4): "whole",
    Fraction(2): "half",
    Fraction(1): "quarter",
    Fraction(1, 2): "eighth",
    Fraction(1, 4): "16th",
    Fraction(1, 8): "32nd",
}


def _varlen(value: int) -> bytes:
    """Standard MIDI variable-length quantity."""
    out = [value & 0x7F]
    value >>= 7
    while value:
        out.append((value & 0x7F) | 0x80)
        value >>= 7
    return bytes(reversed(out))


def to_midi(melody: Melody, tempo_bpm: float = DEFAULT_TEMPO_BPM) -> bytes:
    """Format-0 standard MIDI file; rests become silent gaps."""
    if tempo_bpm <= 0:
        raise DataError(f"tempo must be positive, got {tempo_bpm}")
    track = io.BytesIO()
    track.write(b"\x00\xff\x58\x04\x04\x02\x18\x08")  # 4/4
    usec_per_quarter = round(60_000_000 / tempo_bpm)
    track.write(b"\x00\xff\x51\x03" + struct.pack(">I", usec_per_quarter)[1:])
    pending = 0  # accumulated silent ticks before the next note-on
    for pitch, duration in melody.events:
        ticks = int(round(TICKS_PER_QUARTER * duration.quarter_length))
        if pitch.is_rest:
            pending += ticks
            continue
        key = pitch.midi
        if not 0 <= key <= 127:
            raise DataError(f"pitch {pitch} has MIDI number {key}, outside 0..127")
        track.write(_varlen(pending) + bytes([0x90, key, 64]))
        track.write(_varlen(ticks) + bytes([0x80, key, 0]))
        pending = 0
    track.write(_varlen(pending) + b"\xff\x2f\x00")
    body = track.getvalue()
    header = b"MThd" + struct.pack(">IHHH", 6, 0, 1, TICKS_PER_QUARTER)
    return header + b"MTrk" + struct.pack(">I", len(body)) + body


def _split_at_barlines(ql: Fraction, position: Fraction) -> list[Fraction]:
    """Slice a duration into pieces that each fit their measure."""
    pieces = []
    remaining = ql
    pos = position
    while remaining > 0:
        room = MEASURE_QUARTERS - (pos % MEASURE_QUARTERS)
        piece = min(remaining, room)
        pieces.append(piece)
        remaining -= piece
        pos += piece
    return pieces


def _duration_lcm(melody: Melody) -> int:
    div = 1
    for _, d in melody.events:
        div = math.lcm(div, d.quarter_length.denominator)
    return div


def _append_type(note: ET.Element, piece: Fraction) -> None:
    if piece in _NOTE_TYPES:
        ET.SubElement(note, "type").text = _NOTE_TYPES[piece]
    elif piece * Fraction(2, 3) in _NOTE_TYPES:  # dotted values
        ET.SubElement(note, "type").text = _NOTE_TYPES[piece * Fraction(2, 3)]
        ET.SubElement(note, "dot")


def to_musicxml(melody: Melody, title: Optional[str] = None) -> str:
    """Single-part monophonic 4/4 score, ties across barlines."""
    divisions = _duration_lcm(melody)
    key = melody.key_signature or KeySignature(fifths=0, mode="major")

    root = ET.Element("score-partwise", version="3.1")
    if title:
        work = ET.SubElement(root, "work")
        ET.SubElement(work, "work-title").text = title
    part_list = ET.SubElement(root, "part-list")
    score_part = ET.SubElement(part_list, "score-part", id="P1")
    ET.SubElement(score_part, "part-name").text = "Melody"
    part = ET.SubElement(root, "part", id="P1")

    measure_no = 1
    measure = ET.SubElement(part, "measure", number="1")
    attributes = ET.SubElement(measure, "attributes")
    ET.SubElement(attributes, "divisions").text = str(divisions)
    key_el = ET.SubElement(attributes, "key")
    ET.SubElement(key_el, "fifths").text = str(key.fifths)
    ET.SubElement(key_el, "mode").text = key.mode
    time_el = ET.SubElement(attributes, "time")
    ET.SubElement(time_el, "beats").text = "4"
    ET.SubElement(time_el, "beat-type").text = "4"
    clef = ET.SubElement(attributes, "clef")
    ET.SubElement(clef, "sign").text = "G"
    ET.SubElement(clef, "line").text = "2"

    position = Fraction(0)
    for pitch, duration in melody.events:
        pieces = _split_at_barlines(duration.quarter_length, position)
        for idx, piece in enumerate(pieces):
            if position > 0 and position % MEASURE_QUARTERS == 0:
                measure_no += 1
                measure = ET.SubElement(part, "measure", number=str(measure_no))
            note = ET.SubElement(measure, "note")
            if pitch.is_rest:
                ET.SubElement(note, "rest")
            else:
                p = ET.SubElement(note, "pitch")
                ET.SubElement(p, "step").text = pitch.letter
                if pitch.alter:
                    ET.SubElement(p, "alter").text = str(pitch.alter)
                ET.SubElement(p, "octave").text = str(pitch.octave)
            ET.SubElement(note, "duration").text = str(int(piece * divisions))
            ET.SubElement(note, "voice").text = "1"
            _append_type(note, piece)
            tied_from_prev = idx > 0
            tied_to_next = idx < len(pieces) - 1
            if tied_from_prev:
                ET.SubElement(note, "tie", type="stop")
            if tied_to_next:
                ET.SubElement(note, "tie", type="start")
            if not pitch.is_rest and (tied_from_prev or tied_to_next):
                notations = ET.SubElement(note, "notations")
                if tied_from_prev:
                    ET.SubElement(notations, "tied", type="stop")
                if tied_to_next:
                    ET.SubElement(notations, "tied", type="start")
            position += piece

    ET.indent(root)
    body = ET.tostring(root, encoding="unicode")
    return '<?xml version="1.0" encoding="UTF-8"?>\n' + body + "\n"


def _csv_row(values) -> str:
    return ",".join(repr(float(v)) for v in values)


def attention_csv(result: GenerationResult) -> str:
    """Pure matrix, one generated step per row, no header or index."""
    return "\n".join(_csv_row(row) for row in result.attention) + "\n"


def candidates_csv(result: GenerationResult, pitch_tokens: list[str]) -> str:
    """Pitch-head sampling distributions: step index + token columns."""
    if len(pitch_tokens) != result.pitch_candidates.shape[1]:
        raise DataError(
            f"{len(pitch_tokens)} token names for "
            f"{result.pitch_candidates.shape[1]} candidate columns"
        )
    lines = ["step," + ",".join(pitch_tokens)]
    for step, row in enumerate(result.pitch_candidates):
        lines.append(f"{step}," + _csv_row(row))
    return "\n".join(lines) + "\n"


def export_matrices(
    result: GenerationResult,
    directory: str | Path,
    stem: str,
    pitch_tokens: list[str],
) -> dict[str, Path]:
    """attention.csv plus candidates.csv under the given stem."""
    directory = Path(directory)
    directory.mkdir(parents=True, exist_ok=True)
    paths = {
        "attention": directory / f"{stem}.attention.csv",
        "candidates": directory / f"{stem}.candidates.csv",
    }
    paths["attention"].write_text(attention_csv(result), encoding="utf-8")
    paths["candidates"].write_text(candidates_csv(result, pitch_tokens), encoding="utf-8")
    return paths


def bundle_manifest(
    result: GenerationResult,
    pitch_tokens: list[str],
    duration_tokens: list[str],
    checkpoint_sha256: str = "",
    snapshot_sha256: str = "",
    tempo_bpm: float = DEFAULT_TEMPO_BPM,
) -> dict:
    """Query echo, hashes, melody, and the JSON mirror of both heads.

    Together with the checkpoint this reproduces the melody bit-exactly.
    """
    t_pitch, t_dur = result.temperatures
    return {
        "query": result.query.echo(),
        "temperatures": {"pitch": t_pitch, "duration": t_dur},
        "checkpoint_sha256": checkpoint_sha256,
        "snapshot_sha256": snapshot_sha256,
        "tempo_bpm": tempo_bpm,
        "seed_length": result.seed_length,
        "melody": [[str(p), str(d)] for p, d in result.melody.events],
        "attention": [list(map(float, row)) for row in result.attention],
        "candidates": {
            "pitch": {
                "tokens": list(pitch_tokens),
                "rows": [list(map(float, row)) for row in result.pitch_candidates],
            },
            "duration": {
                "tokens": list(duration_tokens),
                "rows": [list(map(float, row)) for row in result.duration_candidates],
            },
        },
    }


def write_bundle(
    result: GenerationResult,
    directory: str | Path,
    pitch_tokens: list[str],
    duration_tokens: list[str],
    checkpoint_sha256: str = "",
    snapshot_sha256: str = "",
    tempo_bpm: float = DEFAULT_TEMPO_BPM,
) -> dict[str, Path]:
    """All five files for one result: .mid, .musicxml, both CSVs, manifest."""
    directory = Path(directory)
    directory.mkdir(parents=True, exist_ok=True)
    stem = f"{result.query.year}_{result.query.rng_seed}"
    paths = {
        "midi": directory / f"{stem}.mid",
        "musicxml": directory / f"{stem}.musicxml",
        "manifest": directory / f"{stem}.manifest.json",
    }
    paths["midi"].write_bytes(to_midi(result.melody, tempo_bpm))
    paths["musicxml"].write_text(to_musicxml(result.melody, title=stem), encoding="utf-8")
    paths.update(export_matrices(result, directory, stem, pitch_tokens))
    manifest = bundle_manifest(
        result, pitch_tokens, duration_tokens, checkpoint_sha256, snapshot_sha256, tempo_bpm
    )
    paths["manifest"].write_text(
        json.dumps(manifest, indent=2, sort_keys=True) + "\n", encoding="utf-8"
    )
    return paths
