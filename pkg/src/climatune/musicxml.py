"""Monophonic MusicXML ingestion.

Reads partwise documents with xml.etree. Only the first part's first
voice is kept; chords collapse to their highest notated pitch, tie chains
merge into one event, grace notes are dropped. Durations come out as
exact rationals (note duration / divisions).
"""

from __future__ import annotations

import xml.etree.ElementTree as ET
from fractions import Fraction
from pathlib import Path
from typing import Optional

from .errors import MusicXmlError
from .notes import DurationToken, KeySignature, Melody, PitchToken


def _strip_namespaces(root: ET.Element) -> None:
    for el in root.iter():
        if "}" in el.tag:
            el.tag = el.tag.split("}", 1)[1]


def _note_pitch(note: ET.Element) -> Optional[PitchToken]:
    pitch_el = note.find("pitch")
    if pitch_el is not None:
        step = pitch_el.findtext("step")
        octave = pitch_el.findtext("octave")
        alter = pitch_el.findtext("alter")
        if step is None or octave is None:
            raise MusicXmlError("pitch element missing step or octave")
        alt = int(round(float(alter))) if alter else 0
        return PitchToken(kind="note", letter=step.strip(), alter=alt, octave=int(octave))
    if note.find("rest") is not None:
        return PitchToken.rest()
    return None  # unpitched / percussion: skip


def _has_tie_start(note: ET.Element) -> bool:
    return any(t.get("type") == "start" for t in note.findall("tie"))


def parse_musicxml(document: str, source_id: str = "") -> Melody:
    """Parse one monophonic melody out of a MusicXML document string."""
    try:
        root = ET.fromstring(document)
    except ET.ParseError as exc:
        line, col = exc.position
        raise MusicXmlError(f"malformed XML at line {line}, column {col}: {exc.msg}") from exc
    _strip_namespaces(root)

    if root.tag == "score-timewise":
        raise MusicXmlError("timewise scores are not supported; export partwise")

    part = root.find("part")
    if part is None:
        raise MusicXmlError("document contains no <part>")

    divisions = Fraction(1)
    key_sig: Optional[KeySignature] = None
    first_voice: Optional[str] = None

    events: list[tuple[PitchToken, Fraction]] = []
    tie_open = False  # last event still has a tie hanging off it

    for measure in part.findall("measure"):
        for el in measure:
            if el.tag == "attributes":
                div = el.findtext("divisions")
                if div is not None:
                    divisions = Fraction(int(div))
                key_el = el.find("key")
                if key_el is not None and key_sig is None:
                    fifths = key_el.findtext("fifths")
                    mode = (key_el.findtext("mode") or "major").strip()
                    if fifths is not None:
                        key_sig = KeySignature(fifths=int(fifths), mode=mode)
                continue
            if el.tag != "note":
                continue  # backup/forward belong to other voices; skip

            note = el
            if note.find("grace") is not None:
                continue
            voice = (note.findtext("voice") or "1").strip()
            if first_voice is None:
                first_voice = voice
            if voice != first_voice:
                continue

            pitch = _note_pitch(note)
            if pitch is None:
                continue
            dur_text = note.findtext("duration")
            if dur_text is None:
                continue
            ql = Fraction(int(dur_text), 1) / divisions
            if ql <= 0:
                raise MusicXmlError(f"non-positive duration in {source_id or 'document'}")

            if note.find("chord") is not None:
                # Chord member: keep the highest pitch at the same position.
                if events and not pitch.is_rest:
                    prev_pitch, prev_ql = events[-1]
                    if prev_pitch.is_rest or pitch.midi > prev_pitch.midi:
                        events[-1] = (pitch, prev_ql)
                continue

            same_sound = bool(events) and (
                (pitch.is_rest and events[-1][0].is_rest)
                or (not pitch.is_rest and not events[-1][0].is_rest and pitch.midi == events[-1][0].midi)
            )
            if tie_open and same_sound:
                prev_pitch, prev_ql = events[-1]
                events[-1] = (prev_pitch, prev_ql + ql)
            else:
                events.append((pitch, ql))
            tie_open = _has_tie_start(note)

    if not events:
        raise MusicXmlError(f"no note events found in {source_id or 'document'}")

    melody_events = [(p, DurationToken(q)) for p, q in events]
    return Melody(events=melody_events, source_id=source_id, key_signature=key_sig)


def parse_musicxml_file(path: str | Path) -> Melody:
    path = Path(path)
    try:
        text = path.read_text(encoding="utf-8")
    except OSError as exc:
        raise MusicXmlError(f"cannot read {path}: {exc}") from exc
    return parse_musicxml(text, source_id=path.stem)
