"""Command-line interface.

Subcommands: generate (the default when argv starts with a flag), range,
train, preprocess, serve, inspect. The seed flag takes a strict
two-list literal, `[['A4'],[0.5]]` or `[[],[]]`, pitches then quarter
lengths; quotes around pitch names are optional so shell-stripped
arguments parse the same way.

Exit codes: 0 ok, 2 usage error, 3 data error, 4 model error, 5 I/O.
The default data directory is `data`, overridable with the
CLIMATUNE_DATA_DIR environment variable or --data-dir.
"""

from __future__ import annotations

import argparse
import hashlib
import json
import os
import re
import sys
from dataclasses import dataclass, field
from pathlib import Path
from typing import Optional, Sequence

from .climate import (
    TemperatureVectors,
    build_temperature_vectors,
    parse_climate_csv_file,
    read_temperatures_json,
    write_temperatures_json,
)
from .corpus import augment_all_keys, build_vocab, load_corpus_dir, normalize_key, windowize, write_vocab_json
from .errors import ClimatuneError, DataError, ModelError, UsageError
from .export import DEFAULT_TEMPO_BPM, to_midi, to_musicxml, write_bundle
from .generation import GenerationQuery, generate, generate_range
from .notes import DurationToken, Event, PitchToken
from .training import (
    Checkpoint,
    TrainConfig,
    checkpoint_sha256,
    load_checkpoint,
    save_checkpoint,
    train,
)

DATA_DIR_ENV = "CLIMATUNE_DATA_DIR"
YEAR_RANGE = (1876, 2021)
DEFAULT_SEED_LITERAL = "[['A4'],[1.0]]"

SUBCOMMANDS = ("generate", "range", "train", "preprocess", "serve", "inspect")


@dataclass
class CliInvocation:
    """A parsed command line: the subcommand plus its flag values."""

    subcommand: str
    options: dict = field(default_factory=dict)

    def __getattr__(self, name):
        try:
            return self.options[name]
        except KeyError:
            raise AttributeError(name) from None


class _Parser(argparse.ArgumentParser):
    """argparse that raises instead of exiting, so parsing stays total."""

    def error(self, message):
        raise UsageError(f"{message}\nremedy: run `climatune --help` for usage")


_TOKEN_RE = re.compile(r"\s*('(?:[^']*)'|\"(?:[^\"]*)\"|[\[\],]|[^\s\[\],]+)")


def parse_seed_literal(text: str) -> tuple[Event, ...]:
    """Parse the two-list seed literal into events.

    Grammar: `[[P1,...],[D1,...]]` where P is a pitch name (quotes
    optional) and D a quarter length as decimal or fraction. Both lists
    must have equal lengths; `[[],[]]` is the empty seed.
    """
    text = text.strip()
    tokens = []
    pos = 0
    while pos < len(text):
        m = _TOKEN_RE.match(text, pos)
        if not m:
            raise UsageError(
                f"bad character in seed literal at position {pos}\n"
                "remedy: write the seed like [['A4'],[0.5]] or [[],[]]"
            )
        tokens.append(m.group(1))
        pos = m.end()

    def fail(why: str):
        raise UsageError(
            f"malformed seed literal {text!r}: {why}\n"
            "remedy: write the seed like [['A4'],[0.5]] or [[],[]]"
        )

    cursor = 0

    def peek():
        return tokens[cursor] if cursor < len(tokens) else None

    def take(expected: Optional[str] = None):
        nonlocal cursor
        tok = peek()
        if tok is None:
            fail("it ends too early")
        if expected is not None and tok != expected:
            fail(f"expected {expected!r}, found {tok!r}")
        cursor += 1
        return tok

    def take_list() -> list[str]:
        take("[")
        items = []
        if peek() == "]":
            take("]")
            return items
        while True:
            tok = take()
            if tok in ("[", "]", ","):
                fail(f"unexpected {tok!r} inside a list")
            items.append(tok.strip("'\""))
            tok = take()
            if tok == "]":
                return items
            if tok != ",":
                fail(f"expected ',' or ']', found {tok!r}")

    take("[")
    pitches = take_list()
    take(",")
    durations = take_list()
    take("]")
    if cursor != len(tokens):
        fail("trailing text after the closing bracket")
    if len(pitches) != len(durations):
        raise UsageError(
            f"seed lists differ in length: {len(pitches)} pitches vs "
            f"{len(durations)} durations\n"
            "remedy: give every pitch a matching quarter length"
        )
    events = []
    for p, d in zip(pitches, durations):
        try:
            events.append((PitchToken.parse(p), DurationToken.parse(d)))
        except DataError as exc:
            raise UsageError(
                f"bad seed entry ({p!r}, {d!r}): {exc}\n"
                "remedy: pitches look like A4 or C#5; durations like 1, 0.5, or 3/2"
            ) from exc
    return tuple(events)


def _check_year(year: int) -> int:
    lo, hi = YEAR_RANGE
    if not lo <= year <= hi:
        raise UsageError(
            f"year {year} outside the data range {lo}-{hi}\n"
            f"remedy: pick a year between {lo} and {hi}"
        )
    return year


def _add_query_flags(p: argparse.ArgumentParser) -> None:
    p.add_argument("-s", "--seed", default=DEFAULT_SEED_LITERAL, metavar="LITERAL",
                   help=f"priming seed literal (default {DEFAULT_SEED_LITERAL})")
    p.add_argument("-mxx", "--max-extra-notes", type=int, default=8, metavar="N",
                   help="maximum new sampled events (default 8)")
    p.add_argument("-mxl", "--max-length", type=int, default=16, metavar="N",
                   help="hard cap on total events including the seed (default 16)")
    p.add_argument("-sql", "--sequence-length", type=int, default=16, metavar="N",
                   help="model window length; must match the checkpoint (default 16)")
    p.add_argument("--rng-seed", type=int, default=0, metavar="N",
                   help="sampling seed for reproducible output (default 0)")
    p.add_argument("--pitch-temperature", type=float, default=None, metavar="T",
                   help="override the year's pitch temperature (0..1)")
    p.add_argument("--duration-temperature", type=float, default=None, metavar="T",
                   help="override the year's duration temperature (0..1)")
    p.add_argument("--tempo", type=float, default=DEFAULT_TEMPO_BPM, metavar="BPM",
                   help=f"MIDI tempo (default {DEFAULT_TEMPO_BPM})")
    p.add_argument("--out-dir", default="out", metavar="DIR",
                   help="directory for the output bundle (default out)")


def _add_common_paths(p: argparse.ArgumentParser) -> None:
    p.add_argument("--data-dir", default=None, metavar="DIR",
                   help=f"data directory (default ${DATA_DIR_ENV} or `data`)")
    p.add_argument("--checkpoint", default=None, metavar="FILE",
                   help="checkpoint path (default <data-dir>/checkpoint.cltn)")


def build_parser() -> _Parser:
    parser = _Parser(prog="climatune", description=__doc__,
                     formatter_class=argparse.RawDescriptionHelpFormatter)
    sub = parser.add_subparsers(dest="subcommand")

    g = sub.add_parser("generate", help="sonify one year", formatter_class=argparse.ArgumentDefaultsHelpFormatter)
    g.add_argument("-y", "--year", type=int, required=True, help="query year (1876-2021)")
    _add_query_flags(g)
    _add_common_paths(g)

    r = sub.add_parser("range", help="sonify a span of years")
    r.add_argument("--from-year", type=int, required=True, dest="from_year")
    r.add_argument("--to-year", type=int, required=True, dest="to_year")
    r.add_argument("-n", "--per-year-length", type=int, default=None, metavar="N",
                   help="events per year; shorthand for -mxx N -mxl N+len(seed)")
    _add_query_flags(r)
    _add_common_paths(r)

    t = sub.add_parser("train", help="train a model on the corpus")
    t.add_argument("--corpus-dir", default=None, metavar="DIR")
    t.add_argument("--sql", type=int, default=16)
    t.add_argument("--hidden", type=int, default=256)
    t.add_argument("--d-pitch", type=int, default=64)
    t.add_argument("--d-duration", type=int, default=16)
    t.add_argument("--epochs", type=int, default=500)
    t.add_argument("--patience", type=int, default=10)
    t.add_argument("--seed", type=int, default=0)
    t.add_argument("--learning-rate", type=float, default=1e-3)
    t.add_argument("--optimizer", choices=("adam", "momentum"), default="adam")
    t.add_argument("--val-fraction", type=float, default=0.1)
    t.add_argument("--no-augment", action="store_true",
                   help="skip the 12-key transposition augmentation")
    t.add_argument("--out", default=None, metavar="FILE",
                   help="checkpoint path (default <data-dir>/checkpoint.cltn)")
    t.add_argument("--data-dir", default=None, metavar="DIR")

    p = sub.add_parser("preprocess", help="build temperatures.json and vocab.json")
    p.add_argument("--csv", default=None, metavar="FILE",
                   help="snapshot CSV (default <data-dir>/tokyo_tmax_monthly.csv)")
    p.add_argument("--corpus-dir", default=None, metavar="DIR")
    p.add_argument("--data-dir", default=None, metavar="DIR")

    s = sub.add_parser("serve", help="run the HTTP service")
    s.add_argument("--host", default="127.0.0.1")
    s.add_argument("--port", type=int, default=8000)
    _add_common_paths(s)
    s.add_argument("--frontend-dir", default=None, metavar="DIR",
                   help="static UI directory to mount at /")

    i = sub.add_parser("inspect", help="describe a checkpoint")
    i.add_argument("--checkpoint", required=True, metavar="FILE")

    return parser


def parse_args(argv: Sequence[str]) -> CliInvocation:
    """Total parser: returns an invocation or raises with a remedy.

    An argv that starts with a flag is treated as the generate
    subcommand, so the bare sonification call `-y 1984 -s ... -mxx 8`
    works without naming it.
    """
    argv = list(argv)
    if argv and argv[0].startswith("-") and argv[0] not in ("-h", "--help"):
        argv = ["generate", *argv]
    parser = build_parser()
    ns = parser.parse_args(argv)
    if ns.subcommand is None:
        raise UsageError(
            "no subcommand given\n"
            f"remedy: pick one of {', '.join(SUBCOMMANDS)}, or pass -y YEAR to generate"
        )
    options = dict(vars(ns))
    sub = options.pop("subcommand")
    if sub in ("generate", "range"):
        options["seed_events"] = parse_seed_literal(options["seed"])
        for key in ("year", "from_year", "to_year"):
            if options.get(key) is not None:
                _check_year(options[key])
        for key in ("max_extra_notes", "max_length", "sequence_length"):
            if options[key] < 1:
                raise UsageError(
                    f"{key.replace('_', '-')} must be >= 1, got {options[key]}\n"
                    "remedy: pass a positive integer"
                )
    if sub == "range" and options["from_year"] > options["to_year"]:
        raise UsageError(
            f"--from-year {options['from_year']} is after --to-year {options['to_year']}\n"
            "remedy: swap the two years"
        )
    return CliInvocation(subcommand=sub, options=options)


def _data_dir(options: dict) -> Path:
    given = options.get("data_dir")
    return Path(given if given else os.environ.get(DATA_DIR_ENV, "data"))


def _checkpoint_path(options: dict, data_dir: Path) -> Path:
    given = options.get("checkpoint") or options.get("out")
    return Path(given) if given else data_dir / "checkpoint.cltn"


def _sha256(path: Path) -> str:
    return hashlib.sha256(path.read_bytes()).hexdigest()


def _load_vectors(data_dir: Path) -> tuple[TemperatureVectors, str]:
    temps = data_dir / "temperatures.json"
    csv = data_dir / "tokyo_tmax_monthly.csv"
    if temps.exists():
        return read_temperatures_json(temps), _sha256(temps)
    if csv.exists():
        return build_temperature_vectors(parse_climate_csv_file(csv)), _sha256(csv)
    raise DataError(
        f"missing snapshot: neither {temps} nor {csv} exists; "
        f"run `climatune preprocess` or point {DATA_DIR_ENV} at a data directory"
    )


def _load_checkpoint(path: Path) -> Checkpoint:
    if not path.exists():
        raise ModelError(
            f"missing checkpoint {path}; run `climatune train` first "
            "(or pass --checkpoint)"
        )
    return load_checkpoint(path)


def _query_from_options(options: dict, year: int, rng_seed: int, sql: int) -> GenerationQuery:
    return GenerationQuery(
        year=year,
        seed=options["seed_events"],
        mxx=options["max_extra_notes"],
        mxl=options["max_length"],
        sql=sql,
        rng_seed=rng_seed,
        pitch_temperature=options["pitch_temperature"],
        duration_temperature=options["duration_temperature"],
    )


def _cmd_generate(inv: CliInvocation) -> int:
    data_dir = _data_dir(inv.options)
    vectors, snapshot_hash = _load_vectors(data_dir)
    ckpt_path = _checkpoint_path(inv.options, data_dir)
    checkpoint = _load_checkpoint(ckpt_path)
    if inv.options["sequence_length"] != checkpoint.config.sql:
        raise UsageError(
            f"-sql {inv.options['sequence_length']} does not match the checkpoint's "
            f"trained window length {checkpoint.config.sql}\n"
            f"remedy: pass -sql {checkpoint.config.sql} or retrain"
        )
    query = _query_from_options(inv.options, inv.options["year"], inv.options["rng_seed"],
                                checkpoint.config.sql)
    result = generate(query, checkpoint, vectors)
    paths = write_bundle(
        result,
        inv.options["out_dir"],
        list(checkpoint.vocab.pitch_tokens),
        list(checkpoint.vocab.duration_tokens),
        checkpoint_sha256=checkpoint_sha256(ckpt_path),
        snapshot_sha256=snapshot_hash,
        tempo_bpm=inv.options["tempo"],
    )
    t_pitch, t_dur = result.temperatures
    print(f"year {query.year}: T_pitch={t_pitch:.6f} T_dur={t_dur:.6f}")
    for name in ("midi", "musicxml", "attention", "candidates", "manifest"):
        print(paths[name])
    return 0


def _cmd_range(inv: CliInvocation) -> int:
    data_dir = _data_dir(inv.options)
    vectors, snapshot_hash = _load_vectors(data_dir)
    ckpt_path = _checkpoint_path(inv.options, data_dir)
    checkpoint = _load_checkpoint(ckpt_path)
    options = dict(inv.options)
    per_year = options.get("per_year_length")
    if per_year is not None:
        if per_year < 1:
            raise UsageError("--per-year-length must be >= 1\nremedy: pass a positive integer")
        options["max_extra_notes"] = per_year
        options["max_length"] = per_year + len(options["seed_events"])
    template = _query_from_options(options, options["from_year"], options["rng_seed"],
                                   checkpoint.config.sql)
    ranged = generate_range(options["from_year"], options["to_year"], template,
                            checkpoint, vectors)
    out_dir = Path(options["out_dir"])
    ckpt_hash = checkpoint_sha256(ckpt_path)
    for result in ranged.results:
        paths = write_bundle(
            result, out_dir,
            list(checkpoint.vocab.pitch_tokens), list(checkpoint.vocab.duration_tokens),
            checkpoint_sha256=ckpt_hash, snapshot_sha256=snapshot_hash,
            tempo_bpm=options["tempo"],
        )
        t_pitch, t_dur = result.temperatures
        print(f"year {result.query.year}: T_pitch={t_pitch:.6f} T_dur={t_dur:.6f} "
              f"-> {paths['midi']}")
    stem = f"{options['from_year']}-{options['to_year']}_{options['rng_seed']}"
    out_dir.mkdir(parents=True, exist_ok=True)
    concat_midi = out_dir / f"{stem}.mid"
    concat_xml = out_dir / f"{stem}.musicxml"
    concat_midi.write_bytes(to_midi(ranged.concatenated, options["tempo"]))
    concat_xml.write_text(to_musicxml(ranged.concatenated, title=stem), encoding="utf-8")
    print(concat_midi)
    print(concat_xml)
    return 0


def _prepare_corpus(corpus_dir: Path, augment: bool):
    melodies = [normalize_key(m) for m in load_corpus_dir(corpus_dir)]
    if augment:
        melodies = augment_all_keys(melodies)
    return melodies


def _cmd_train(inv: CliInvocation) -> int:
    data_dir = _data_dir(inv.options)
    corpus_dir = Path(inv.options["corpus_dir"] or data_dir / "corpus")
    melodies = _prepare_corpus(corpus_dir, not inv.options["no_augment"])
    vocab = build_vocab(melodies)
    config = TrainConfig(
        hidden=inv.options["hidden"],
        d_pitch=inv.options["d_pitch"],
        d_duration=inv.options["d_duration"],
        sql=inv.options["sql"],
        learning_rate=inv.options["learning_rate"],
        optimizer=inv.options["optimizer"],
        max_epochs=inv.options["epochs"],
        patience=inv.options["patience"],
        val_fraction=inv.options["val_fraction"],
        seed=inv.options["seed"],
    )
    windows = windowize(melodies, vocab, config.sql)
    print(f"{len(melodies)} melodies -> {len(windows)} windows "
          f"(pitch vocab {vocab.pitch_size}, duration vocab {vocab.duration_size})")
    params, history = train(windows, vocab, config, verbose=True)
    out = _checkpoint_path(inv.options, data_dir)
    out.parent.mkdir(parents=True, exist_ok=True)
    save_checkpoint(params, vocab, config, out)
    history_path = out.parent / "history.json"
    history_path.write_text(history.to_json(), encoding="utf-8")
    print(f"best epoch {history.best_epoch}, stopped at {history.stopped_epoch}")
    print(out)
    print(history_path)
    return 0


def _cmd_preprocess(inv: CliInvocation) -> int:
    data_dir = _data_dir(inv.options)
    csv = Path(inv.options["csv"] or data_dir / "tokyo_tmax_monthly.csv")
    if not csv.exists():
        raise DataError(
            f"missing snapshot {csv}; place the monthly CSV there or pass --csv"
        )
    vectors = build_temperature_vectors(parse_climate_csv_file(csv))
    data_dir.mkdir(parents=True, exist_ok=True)
    temps_path = data_dir / "temperatures.json"
    write_temperatures_json(vectors, temps_path)
    print(f"{len(vectors.years)} years -> {temps_path}")
    corpus_dir = Path(inv.options["corpus_dir"] or data_dir / "corpus")
    if corpus_dir.is_dir():
        melodies = _prepare_corpus(corpus_dir, augment=True)
        vocab = build_vocab(melodies)
        vocab_path = data_dir / "vocab.json"
        write_vocab_json(vocab, vocab_path)
        print(f"{len(melodies)} melodies -> {vocab_path} "
              f"(pitch {vocab.pitch_size}, duration {vocab.duration_size})")
    return 0


def _cmd_serve(inv: CliInvocation) -> int:
    import uvicorn

    from .service import create_app

    data_dir = _data_dir(inv.options)
    app = create_app(
        checkpoint_path=_checkpoint_path(inv.options, data_dir),
        data_dir=data_dir,
        frontend_dir=inv.options.get("frontend_dir"),
    )
    uvicorn.run(app, host=inv.options["host"], port=inv.options["port"])
    return 0


def _cmd_inspect(inv: CliInvocation) -> int:
    path = Path(inv.options["checkpoint"])
    checkpoint = _load_checkpoint(path)
    print(f"checkpoint {path}")
    print(f"  sha256 {checkpoint_sha256(path)}")
    cfg = checkpoint.config
    print(f"  hidden {cfg.hidden}, sql {cfg.sql}, d_pitch {cfg.d_pitch}, "
          f"d_duration {cfg.d_duration}, optimizer {cfg.optimizer}")
    print(f"  pitch vocab {checkpoint.vocab.pitch_size} "
          f"(hash {checkpoint.vocab.pitch_hash()[:12]})")
    print(f"  duration vocab {checkpoint.vocab.duration_size} "
          f"(hash {checkpoint.vocab.duration_hash()[:12]})")
    for name, arr in checkpoint.params.tensors():
        print(f"  {name:14s} {arr.shape}")
    history_path = path.parent / "history.json"
    if history_path.exists():
        payload = json.loads(history_path.read_text(encoding="utf-8"))
        print(f"  best epoch {payload['best_epoch']}, "
              f"stopped at {payload['stopped_epoch']}")
    return 0


_COMMANDS = {
    "generate": _cmd_generate,
    "range": _cmd_range,
    "train": _cmd_train,
    "preprocess": _cmd_preprocess,
    "serve": _cmd_serve,
    "inspect": _cmd_inspect,
}


def run(invocation: CliInvocation) -> int:
    """Dispatch an invocation, mapping error categories to exit codes."""
    try:
        return _COMMANDS[invocation.subcommand](invocation)
    except UsageError as exc:
        print(f"usage error: {exc}", file=sys.stderr)
        return 2
    except DataError as exc:
        print(f"data error: {exc}", file=sys.stderr)
        return 3
    except ModelError as exc:
        print(f"model error: {exc}", file=sys.stderr)
        return 4
    except OSError as exc:
        print(f"i/o error: {exc}", file=sys.stderr)
        return 5
    except ClimatuneError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


def main(argv: Optional[Sequence[str]] = None) -> None:
    argv = sys.argv[1:] if argv is None else list(argv)
    try:
        invocation = parse_args(argv)
    except UsageError as exc:
        print(f"usage error: {exc}", file=sys.stderr)
        raise SystemExit(2) from exc
    raise SystemExit(run(invocation))


if __name__ == "__main__":
    main()
