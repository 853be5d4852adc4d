#!/usr/bin/env python3
"""Write the vendored training corpus into data/corpus/.

Nineteen simplified monophonic transcriptions of traditional and
public-domain Japanese melodies (warabe uta, Meiji-era school songs by
Taki, Okano, and Narita, all long out of copyright). Each is emitted as
MusicXML in its customary key and verified to round-trip through the
package's own parser. The transcriptions are approximate by design:
single voice, plain rhythm, no ornaments.

Token syntax below: `A4:1` is pitch A4 for one quarter note; `R:2` is a
half-note rest; durations are quarter-note fractions like `1/2` or `3/2`.
"""

from __future__ import annotations

import json
from pathlib import Path

from climatune.export import to_musicxml
from climatune.musicxml import parse_musicxml
from climatune.notes import KeySignature, Melody, event

ROOT = Path(__file__).resolve().parents[1]
CORPUS_DIR = ROOT / "data" / "corpus"

MELODIES = [
    {
        "slug": "sakura_sakura",
        "title": "Sakura Sakura",
        "fifths": 0,
        "mode": "minor",
        "tokens": (
            "A4:1 A4:1 B4:2 A4:1 A4:1 B4:2 "
            "A4:1 B4:1 C5:1 B4:1 A4:1 B4:1/2 A4:1/2 F4:2 "
            "E4:1 C4:1 E4:1 F4:1 E4:1 E4:1/2 C4:1/2 B3:2 "
            "A4:1 B4:1 C5:1 B4:1 A4:1 B4:1/2 A4:1/2 F4:2 "
            "E4:1 C4:1 E4:1 F4:1 E4:1 E4:1/2 C4:1/2 B3:2 "
            "A4:1 A4:1 B4:2 A4:1 A4:1 B4:2 "
            "E4:1 F4:1 B4:1 A4:1/2 F4:1/2 E4:3 R:1"
        ),
    },
    {
        "slug": "kojo_no_tsuki",
        "title": "Kojo no Tsuki",
        "fifths": 0,
        "mode": "minor",
        "tokens": (
            "A4:1 A4:1 D5:1 D5:1 E5:1 E5:1 D5:2 "
            "C5:1 C5:1 B4:1 B4:1 A4:3 R:1 "
            "A4:1 B4:1 C5:1 C5:1 B4:1 A4:1 B4:2 "
            "E4:1 E4:1 B4:1 B4:1 A4:3 R:1 "
            "A4:1 A4:1 D5:1 D5:1 E5:1 E5:1 D5:2 "
            "C5:1 C5:1 B4:1 B4:1 A4:4"
        ),
    },
    {
        "slug": "furusato",
        "title": "Furusato",
        "fifths": -1,
        "mode": "major",
        "tokens": (
            "C4:1 C4:1 C4:1 F4:1 F4:1 F4:1 G4:1 "
            "A4:3/2 A4:1/2 A4:1 G4:1 F4:1 G4:2 "
            "G4:1 A4:1 Bb4:1 C5:1 C5:1 C5:1 A4:1 "
            "C5:3/2 Bb4:1/2 A4:1 G4:1 F4:2 R:1 "
            "C5:1 C5:1 C5:1 A4:1 Bb4:1 C5:1 D5:1 "
            "C5:2 A4:1 F4:1 G4:1 F4:3"
        ),
    },
    {
        "slug": "haru_ga_kita",
        "title": "Haru ga Kita",
        "fifths": 1,
        "mode": "major",
        "tokens": (
            "G4:1 G4:1 A4:1 G4:1 E4:1 G4:1 E4:1 D4:1 "
            "E4:1 G4:1 A4:1 B4:1 A4:1 G4:1 A4:2 "
            "B4:1 B4:1 A4:1 B4:1 D5:1 B4:1 A4:1 G4:1 "
            "A4:1 G4:1 E4:1 D4:1 G4:3 R:1"
        ),
    },
    {
        "slug": "momiji",
        "title": "Momiji",
        "fifths": 0,
        "mode": "major",
        "tokens": (
            "E4:1 E4:1 F4:1 G4:1 G4:1 A4:1 G4:2 "
            "A4:1 C5:1 A4:1 G4:1 E4:1 G4:1 F4:2 "
            "E4:1 E4:1 F4:1 G4:1 G4:1 A4:1 G4:2 "
            "A4:1 C5:1 A4:1 G4:1 F4:1 D4:1 C4:3 R:1"
        ),
    },
    {
        "slug": "hotaru_koi",
        "title": "Hotaru Koi",
        "fifths": 0,
        "mode": "minor",
        "tokens": (
            "A4:1/2 A4:1/2 G4:1 A4:1/2 A4:1/2 G4:1 "
            "A4:1/2 A4:1/2 G4:1/2 A4:1/2 G4:1/2 E4:1/2 G4:1 "
            "A4:1/2 A4:1/2 G4:1 A4:1/2 G4:1/2 E4:1 "
            "G4:1/2 A4:1/2 G4:1/2 E4:1/2 G4:1 E4:1"
        ),
    },
    {
        "slug": "toryanse",
        "title": "Toryanse",
        "fifths": 0,
        "mode": "minor",
        "tokens": (
            "A4:1 A4:1/2 G4:1/2 A4:1 A4:1 "
            "G4:1/2 A4:1/2 E4:2 "
            "E4:1/2 G4:1/2 A4:1/2 G4:1/2 E4:1 D4:1 E4:2 "
            "A4:1/2 A4:1/2 A4:1/2 G4:1/2 A4:1 G4:1/2 E4:1/2 G4:1 "
            "A4:1/2 G4:1/2 E4:1/2 D4:1/2 E4:2"
        ),
    },
    {
        "slug": "kagome_kagome",
        "title": "Kagome Kagome",
        "fifths": 0,
        "mode": "minor",
        "tokens": (
            "G4:1/2 A4:1/2 A4:1/2 G4:1/2 A4:1/2 G4:1/2 E4:1 "
            "G4:1/2 G4:1/2 A4:1/2 G4:1/2 E4:1 "
            "G4:1/2 A4:1/2 G4:1/2 A4:1/2 G4:1/2 E4:1/2 G4:1 "
            "A4:1/2 G4:1/2 E4:1/2 D4:1/2 E4:2"
        ),
    },
    {
        "slug": "usagi",
        "title": "Usagi",
        "fifths": 0,
        "mode": "minor",
        "tokens": (
            "A4:1 C5:1/2 C5:1/2 C5:1 A4:1/2 C5:1/2 "
            "D5:1 C5:1 A4:1 G4:1 E4:2 "
            "G4:1/2 A4:1/2 C5:1/2 A4:1/2 G4:1 E4:1 "
            "D4:1/2 E4:1/2 G4:1/2 E4:1/2 D4:1 C4:2"
        ),
    },
    {
        "slug": "yuki",
        "title": "Yuki",
        "fifths": 0,
        "mode": "major",
        "tokens": (
            "G4:1 G4:1 G4:1/2 A4:1/2 G4:1 E4:1 "
            "G4:1 E4:1 D4:2 "
            "E4:1/2 G4:1/2 G4:1/2 A4:1/2 G4:1 E4:1 "
            "G4:1/2 E4:1/2 D4:1 C4:2 "
            "C4:1 D4:1 E4:1 G4:1 A4:1 G4:1 E4:1 D4:1 C4:2"
        ),
    },
    {
        "slug": "chatsumi",
        "title": "Chatsumi",
        "fifths": 1,
        "mode": "major",
        "tokens": (
            "D4:1/2 G4:1/2 G4:1/2 G4:1/2 A4:1/2 B4:1/2 B4:1/2 A4:1/2 "
            "G4:1/2 A4:1/2 G4:1/2 E4:1/2 G4:1 "
            "D4:1/2 G4:1/2 G4:1/2 A4:1/2 B4:1/2 B4:1/2 A4:1/2 G4:1/2 "
            "A4:1/2 G4:1/2 E4:1/2 D4:1/2 G4:2"
        ),
    },
    {
        "slug": "momotaro",
        "title": "Momotaro",
        "fifths": 0,
        "mode": "major",
        "tokens": (
            "G4:1 E4:1/2 E4:1/2 G4:1 E4:1/2 E4:1/2 "
            "G4:1/2 E4:1/2 D4:1/2 C4:1/2 D4:1 R:1 "
            "E4:1 E4:1/2 G4:1/2 D4:1 E4:1/2 D4:1/2 C4:2 "
            "C4:1/2 D4:1/2 E4:1/2 G4:1/2 A4:1 G4:1/2 E4:1/2 G4:2"
        ),
    },
    {
        "slug": "usagi_to_kame",
        "title": "Usagi to Kame",
        "fifths": 0,
        "mode": "major",
        "tokens": (
            "C4:1/2 C4:1/2 C4:1/2 E4:1/2 G4:1/2 G4:1/2 E4:1/2 G4:1/2 "
            "A4:1/2 A4:1/2 A4:1 "
            "C5:1/2 A4:1/2 G4:1/2 E4:1/2 G4:1 "
            "E4:1/2 G4:1/2 E4:1/2 D4:1/2 C4:2"
        ),
    },
    {
        "slug": "oborozukiyo",
        "title": "Oborozukiyo",
        "fifths": 2,
        "mode": "major",
        "tokens": (
            "D4:1 E4:1 F#4:1 A4:1 B4:1 A4:1 F#4:1 E4:2 "
            "D4:1 E4:1 F#4:1 A4:1 B4:1 D5:1 B4:1 A4:2 "
            "B4:1 D5:1 E5:1 D5:1 B4:1 A4:1 F#4:1 E4:1 "
            "D4:1 F#4:1 E4:1 D4:1 D4:3 R:1"
        ),
    },
    {
        "slug": "hamabe_no_uta",
        "title": "Hamabe no Uta",
        "fifths": -1,
        "mode": "major",
        "tokens": (
            "F4:3/2 G4:1/2 A4:1 C5:1 A4:3/2 G4:1/2 F4:1 G4:1 "
            "A4:1 G4:1 F4:1 D4:1 C4:3 "
            "F4:3/2 G4:1/2 A4:1 C5:1 D5:3/2 C5:1/2 A4:1 C5:1 "
            "Bb4:1 A4:1 G4:1 A4:1 F4:3"
        ),
    },
    {
        "slug": "hana",
        "title": "Hana",
        "fifths": 1,
        "mode": "major",
        "tokens": (
            "D4:1/2 G4:1/2 G4:1/2 A4:1/2 B4:1/2 B4:1/2 A4:1/2 G4:1/2 "
            "A4:1/2 D5:1/2 B4:1/2 A4:1/2 G4:1 R:1 "
            "D4:1/2 G4:1/2 G4:1/2 A4:1/2 B4:1/2 C5:1/2 D5:1/2 B4:1/2 "
            "A4:1/2 G4:1/2 E4:1/2 A4:1/2 G4:2"
        ),
    },
    {
        "slug": "antagata_dokosa",
        "title": "Antagata Dokosa",
        "fifths": 0,
        "mode": "minor",
        "tokens": (
            "A4:1/2 A4:1/2 G4:1/2 A4:1/2 C5:1/2 A4:1/2 G4:1/2 A4:1/2 "
            "G4:1/2 E4:1/2 G4:1/2 A4:1/2 G4:1 "
            "A4:1/2 A4:1/2 C5:1/2 C5:1/2 A4:1/2 G4:1/2 A4:1 "
            "G4:1/2 A4:1/2 G4:1/2 E4:1/2 D4:1 E4:1"
        ),
    },
    {
        "slug": "zui_zui_zukkorobashi",
        "title": "Zui Zui Zukkorobashi",
        "fifths": 0,
        "mode": "minor",
        "tokens": (
            "A4:1/2 A4:1/2 C5:1/2 A4:1/2 G4:1/2 A4:1/2 G4:1/2 E4:1/2 "
            "G4:1 A4:1/2 C5:1/2 A4:1 "
            "G4:1/2 A4:1/2 G4:1/2 E4:1/2 G4:1/2 A4:1/2 G4:1 "
            "E4:1/2 G4:1/2 A4:1/2 G4:1/2 E4:1 D4:1 E4:2"
        ),
    },
    {
        "slug": "edo_komoriuta",
        "title": "Edo Komoriuta",
        "fifths": 0,
        "mode": "minor",
        "tokens": (
            "E4:1 A4:1 A4:1 A4:1 B4:1/2 A4:1/2 G4:1 E4:2 "
            "A4:1 B4:1/2 A4:1/2 G4:1 E4:1 D4:1 E4:3 "
            "E4:1 G4:1 A4:1 G4:1 E4:1/2 D4:1/2 C4:1 D4:1 E4:3"
        ),
    },
]


def melody_from_entry(entry: dict) -> Melody:
    events = [event(*tok.split(":")) for tok in entry["tokens"].split()]
    return Melody(
        events=events,
        source_id=entry["slug"],
        key_signature=KeySignature(fifths=entry["fifths"], mode=entry["mode"]),
    )


def main() -> None:
    CORPUS_DIR.mkdir(parents=True, exist_ok=True)
    index = []
    for i, entry in enumerate(MELODIES, start=1):
        melody = melody_from_entry(entry)
        name = f"{i:02d}_{entry['slug']}.musicxml"
        text = to_musicxml(melody, title=entry["title"])
        back = parse_musicxml(text, source_id=entry["slug"])
        if back != melody:
            raise SystemExit(f"{name}: transcription does not round-trip")
        (CORPUS_DIR / name).write_text(text, encoding="utf-8")
        index.append(
            {
                "file": name,
                "title": entry["title"],
                "key_fifths": entry["fifths"],
                "mode": entry["mode"],
                "events": len(melody),
            }
        )
    manifest = {
        "description": (
            "Simplified monophonic transcriptions of traditional and "
            "public-domain Japanese melodies, generated by "
            "scripts/build_corpus.py. Approximate by design: single "
            "voice, plain rhythm, no ornaments."
        ),
        "melodies": index,
    }
    (CORPUS_DIR / "manifest.json").write_text(
        json.dumps(manifest, ensure_ascii=False, indent=2) + "\n", encoding="utf-8"
    )
    print(f"wrote {len(index)} melodies to {CORPUS_DIR}")


if __name__ == "__main__":
    main()
