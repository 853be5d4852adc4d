#!/usr/bin/env python3
"""Capture service responses as fixtures for the explorer UI tests.

Trains the small deterministic recipe on the bundled corpus, then
records real /api responses plus the matching CLI export bundle into
frontend/tests/fixtures/. The frontend test suite replays these files
through its validators instead of spawning a Python server, so the
fixtures are the contract: regenerate them with this script whenever
the service schema changes.
"""

from __future__ import annotations

import json
import shutil
from pathlib import Path

from fastapi.testclient import TestClient

from climatune.cli import parse_args as parse_cli
from climatune.cli import run
from climatune.service import create_app

ROOT = Path(__file__).resolve().parents[1]
FIXTURES = ROOT / "frontend" / "tests" / "fixtures"
WORK = ROOT / "out" / "ui_fixtures"


def cli(argv: list[str]) -> None:
    print("   climatune " + " ".join(argv))
    code = run(parse_cli(argv))
    if code != 0:
        raise SystemExit(f"step failed with exit code {code}")


def save(name: str, payload: object) -> None:
    path = FIXTURES / name
    path.write_text(json.dumps(payload, indent=2, sort_keys=True) + "\n",
                    encoding="utf-8")
    print(f"   wrote {path.relative_to(ROOT)}")


def main() -> None:
    data = WORK / "data"
    out = WORK / "cli"
    if WORK.exists():
        shutil.rmtree(WORK)
    data.mkdir(parents=True)
    out.mkdir(parents=True)
    FIXTURES.mkdir(parents=True, exist_ok=True)
    shutil.copy(ROOT / "data" / "tokyo_tmax_monthly.csv",
                data / "tokyo_tmax_monthly.csv")
    corpus = str(ROOT / "data" / "corpus")

    print("== preprocess + train (small recipe, seed 0)")
    cli(["preprocess", "--data-dir", str(data)])
    cli(["train", "--corpus-dir", corpus, "--data-dir", str(data),
         "--seed", "0", "--sql", "8", "--hidden", "32", "--d-pitch", "16",
         "--d-duration", "8", "--epochs", "6", "--no-augment"])

    print("== CLI export bundle for year 1880, rng seed 11")
    cli(["-y", "1880", "-s", "[['A4'],[1]]", "-mxx", "8", "-mxl", "16",
         "-sql", "8", "--rng-seed", "11", "--data-dir", str(data),
         "--out-dir", str(out)])
    shutil.copy(out / "1880_11.manifest.json",
                FIXTURES / "cli_manifest_1880_11.json")
    shutil.copy(out / "1880_11.attention.csv",
                FIXTURES / "cli_attention_1880_11.csv")
    print(f"   wrote {FIXTURES.relative_to(ROOT)}/cli_manifest_1880_11.json")
    print(f"   wrote {FIXTURES.relative_to(ROOT)}/cli_attention_1880_11.csv")

    print("== service captures")
    app = create_app(checkpoint_path=data / "checkpoint.cltn", data_dir=data)
    with TestClient(app) as client:
        save("years.json", client.get("/api/years").json())
        save("model.json", client.get("/api/model").json())

        reference = {
            "year": 1880,
            "seed_pitches": ["A4"],
            "seed_durations": ["1"],
            "mxx": 8,
            "mxl": 16,
            "rng_seed": 11,
        }
        resp = client.post("/api/generate", json=reference)
        resp.raise_for_status()
        save("generate_1880_11.json", resp.json())

        partner = dict(reference, year=2004, rng_seed=7)
        resp = client.post("/api/generate", json=partner)
        resp.raise_for_status()
        save("generate_2004_7.json", resp.json())

        frozen = dict(reference, rng_seed=3,
                      pitch_temperature=0.0, duration_temperature=0.0)
        resp = client.post("/api/generate", json=frozen)
        resp.raise_for_status()
        save("generate_frozen.json", resp.json())

    print("done")


if __name__ == "__main__":
    main()
