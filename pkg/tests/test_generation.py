"""Query execution tests: temperatures, priming, sampling, year ranges."""

import numpy as np
import pytest

from climatune.errors import ClimateDataError, DataError
from climatune.generation import (
    DEFAULT_SEED_EVENTS,
    GenerationQuery,
    generate,
    generate_range,
    make_rng,
    prime_window,
    resolve_temperatures,
    sample_index,
    _mask_pad,
)
from climatune.corpus import PAD_PAIR
from climatune.model import model_forward
from climatune.notes import DurationToken, PitchToken, event

from conftest import TINY_CONFIG


def query_for(trained, **kwargs) -> GenerationQuery:
    kwargs.setdefault("year", 1880)
    kwargs.setdefault("sql", TINY_CONFIG.sql)
    return GenerationQuery(**kwargs)


class FixedRng:
    """Duck-typed stand-in for sample_index's generator argument."""

    def __init__(self, u: float):
        self.u = u

    def random(self) -> float:
        return self.u


class TestGenerationQuery:
    def test_defaults(self):
        q = GenerationQuery(year=1984)
        assert q.seed == DEFAULT_SEED_EVENTS
        assert (q.mxx, q.mxl, q.sql, q.rng_seed) == (8, 16, 16, 0)
        assert q.pitch_temperature is None

    def test_new_events_law(self):
        q = GenerationQuery(year=1984)
        assert q.new_events == min(8, 16 - 1) == 8
        q = GenerationQuery(year=1984, mxx=32, mxl=4, seed=())
        assert q.new_events == 4

    def test_validation(self):
        with pytest.raises(DataError, match="mxx"):
            GenerationQuery(year=1984, mxx=0)
        with pytest.raises(DataError, match="sql"):
            GenerationQuery(year=1984, sql=0)
        with pytest.raises(DataError, match="below the seed length"):
            GenerationQuery(year=1984, mxl=1, seed=tuple([event("A4", 1)] * 2))
        with pytest.raises(DataError, match=r"outside \[0,1\]"):
            GenerationQuery(year=1984, pitch_temperature=1.5)
        with pytest.raises(DataError, match=r"outside \[0,1\]"):
            GenerationQuery(year=1984, duration_temperature=-0.1)

    def test_echo_round_trips_tokens(self):
        q = GenerationQuery(year=2004, seed=(event("Bb3", "1/2"),), rng_seed=5)
        echo = q.echo()
        assert echo["year"] == 2004
        assert echo["seed"] == [["Bb3", "1/2"]]
        assert echo["rng_seed"] == 5


class TestResolveTemperatures:
    def test_reference_year_pitch_zero(self, snapshot_vectors):
        q = GenerationQuery(year=1876)
        t_pitch, t_dur = resolve_temperatures(q, snapshot_vectors)
        assert t_pitch == 0.0
        assert t_dur == snapshot_vectors.duration_temp[1876]

    def test_2021_duration_is_max(self, snapshot_vectors):
        _, t_dur = resolve_temperatures(GenerationQuery(year=2021), snapshot_vectors)
        assert t_dur == 1.0

    def test_override_precedence(self, snapshot_vectors):
        q = GenerationQuery(year=2004, pitch_temperature=0.5)
        t_pitch, t_dur = resolve_temperatures(q, snapshot_vectors)
        assert t_pitch == 0.5
        assert t_dur == snapshot_vectors.duration_temp[2004]

    def test_both_overrides_skip_year_lookup(self, snapshot_vectors):
        q = GenerationQuery(year=9999, pitch_temperature=0.3, duration_temperature=0.7)
        assert resolve_temperatures(q, snapshot_vectors) == (0.3, 0.7)

    def test_unknown_year_lists_range(self, snapshot_vectors):
        with pytest.raises(ClimateDataError, match="1876..2021"):
            resolve_temperatures(GenerationQuery(year=1875), snapshot_vectors)


class TestPrimeWindow:
    def test_single_seed_event(self, trained):
        window = prime_window([event("A4", 1)], 16, trained.vocab)
        assert len(window) == 16
        assert window[:15] == [PAD_PAIR] * 15
        assert window[15] == trained.vocab.encode_event(*event("A4", 1))

    def test_empty_seed_all_pad(self, trained):
        assert prime_window([], 16, trained.vocab) == [PAD_PAIR] * 16

    def test_overlong_seed_keeps_tail(self, trained):
        seed = [event(p, 1) for p in ["C4", "E4", "G4", "E4", "C4"]]
        window = prime_window(seed, 3, trained.vocab)
        assert window == [trained.vocab.encode_event(*e) for e in seed[-3:]]

    def test_out_of_vocab_seed_token(self, trained):
        with pytest.raises(DataError, match="nearest"):
            prime_window([event("C8", 1)], 4, trained.vocab)


class TestSampleIndex:
    def test_inverse_cdf_partitions(self):
        probs = np.array([0.2, 0.3, 0.5])
        assert sample_index(probs, FixedRng(0.1)) == 0
        assert sample_index(probs, FixedRng(0.25)) == 1
        assert sample_index(probs, FixedRng(0.2)) == 1  # boundary goes right
        assert sample_index(probs, FixedRng(0.99)) == 2

    def test_rounding_never_overflows(self):
        probs = np.array([0.5, 0.4999999])  # sums just under 1
        assert sample_index(probs, FixedRng(0.99999999)) == 1

    def test_one_hot_always_hits(self):
        probs = np.array([0.0, 1.0, 0.0])
        rng = make_rng(123)
        assert all(sample_index(probs, rng) == 1 for _ in range(10))


class TestMaskPad:
    def test_renormalizes_without_pad(self):
        q = np.array([0.5, 0.25, 0.25])
        out = _mask_pad(q, np.array([9.0, 1.0, 1.0]))
        assert out[0] == 0.0
        assert out[1] == pytest.approx(0.5)
        assert out.sum() == pytest.approx(1.0)

    def test_degenerate_one_hot_at_pad_falls_back(self):
        q = np.array([1.0, 0.0, 0.0])
        out = _mask_pad(q, np.array([10.0, 2.0, 5.0]))
        assert np.array_equal(out, [0.0, 0.0, 1.0])


class TestGenerate:
    def test_default_length_law(self, trained, tiny_vectors):
        q = query_for(trained)
        result = generate(q, trained.checkpoint, tiny_vectors)
        assert len(result.generated_events) == min(q.mxx, q.mxl - 1) == 8
        assert len(result.melody) == 9
        assert result.seed_length == 1
        assert result.melody.events[0] == DEFAULT_SEED_EVENTS[0]

    @pytest.mark.parametrize(
        "mxx,mxl,seed_len",
        [(1, 16, 0), (3, 16, 1), (8, 4, 2), (5, 5, 0), (8, 2, 2), (2, 3, 1)],
    )
    def test_length_law_grid(self, trained, tiny_vectors, mxx, mxl, seed_len):
        seed = tuple([event("E4", 1)] * seed_len)
        q = query_for(trained, mxx=mxx, mxl=mxl, seed=seed)
        result = generate(q, trained.checkpoint, tiny_vectors)
        expected = max(0, min(mxx, mxl - seed_len))
        assert len(result.generated_events) == expected
        assert len(result.melody) == seed_len + expected
        assert result.attention.shape == (expected, TINY_CONFIG.sql)

    def test_deterministic_for_fixed_rng_seed(self, trained, tiny_vectors):
        a = generate(query_for(trained, rng_seed=9), trained.checkpoint, tiny_vectors)
        b = generate(query_for(trained, rng_seed=9), trained.checkpoint, tiny_vectors)
        assert a.melody == b.melody
        assert np.array_equal(a.attention, b.attention)
        assert np.array_equal(a.pitch_candidates, b.pitch_candidates)
        assert np.array_equal(a.duration_candidates, b.duration_candidates)

    def test_different_rng_seeds_usually_differ(self, trained, tiny_vectors):
        melodies = {
            tuple(
                generate(
                    query_for(trained, rng_seed=k, pitch_temperature=1.0, duration_temperature=1.0),
                    trained.checkpoint,
                    tiny_vectors,
                ).melody.token_pairs()
            )
            for k in range(8)
        }
        assert len(melodies) > 1

    def test_rows_are_distributions(self, trained, tiny_vectors):
        result = generate(query_for(trained), trained.checkpoint, tiny_vectors)
        for matrix in (result.attention, result.pitch_candidates, result.duration_candidates):
            assert np.all(matrix >= 0)
            assert np.allclose(matrix.sum(axis=1), 1.0, atol=1e-9)

    def test_pad_probability_masked_to_zero(self, trained, tiny_vectors):
        result = generate(query_for(trained), trained.checkpoint, tiny_vectors)
        assert np.all(result.pitch_candidates[:, 0] == 0.0)
        assert np.all(result.duration_candidates[:, 0] == 0.0)

    def test_sampled_tokens_never_pad(self, trained, tiny_vectors):
        for k in range(6):
            result = generate(
                query_for(trained, rng_seed=k, pitch_temperature=1.0, duration_temperature=1.0),
                trained.checkpoint,
                tiny_vectors,
            )
            for pitch, duration in result.generated_events:
                assert str(pitch) in trained.vocab.pitch_tokens[1:]
                assert str(duration) in trained.vocab.duration_tokens[1:]

    def test_melody_source_id_names_year_and_seed(self, trained, tiny_vectors):
        result = generate(query_for(trained, year=1882, rng_seed=7), trained.checkpoint, tiny_vectors)
        assert result.melody.source_id == "1882_7"

    def test_sql_mismatch_rejected(self, trained, tiny_vectors):
        q = GenerationQuery(year=1880, sql=16)
        with pytest.raises(DataError, match="does not match"):
            generate(q, trained.checkpoint, tiny_vectors)

    def test_epsilon_temperature_equals_greedy_oracle(self, trained, tiny_vectors):
        q = query_for(trained, pitch_temperature=0.0, duration_temperature=0.0, mxx=8, mxl=16)
        result = generate(q, trained.checkpoint, tiny_vectors)

        # Independent greedy decoder: argmax over non-PAD logits each step.
        vocab = trained.vocab
        window = prime_window(q.seed, q.sql, vocab)
        expected = []
        for _ in range(q.new_events):
            z_p, z_d, _ = model_forward(window, trained.checkpoint.params)
            pi = 1 + int(np.argmax(z_p[1:]))
            di = 1 + int(np.argmax(z_d[1:]))
            expected.append((vocab.pitch_tokens[pi], vocab.duration_tokens[di]))
            window = window[1:] + [(pi, di)]

        got = [(str(p), str(d)) for p, d in result.generated_events]
        assert got == expected

    def test_temperature_statistical_effect(self, trained, tiny_vectors):
        def distinct_sequences(t_pitch: float) -> int:
            seen = set()
            for k in range(500):
                q = query_for(
                    trained,
                    rng_seed=k,
                    pitch_temperature=t_pitch,
                    duration_temperature=0.5,
                    mxx=4,
                    mxl=5,
                )
                result = generate(q, trained.checkpoint, tiny_vectors)
                seen.add(tuple(str(p) for p, _ in result.generated_events))
            return len(seen)

        hot = distinct_sequences(1.0)
        cold = distinct_sequences(0.1)
        assert hot >= cold


class TestGenerateRange:
    def template(self, **kwargs):
        kwargs.setdefault("year", 1876)
        kwargs.setdefault("seed", ())
        kwargs.setdefault("mxx", 4)
        kwargs.setdefault("mxl", 4)
        kwargs.setdefault("sql", TINY_CONFIG.sql)
        return GenerationQuery(**kwargs)

    def test_eleven_years_eleven_melodies(self, trained, snapshot_vectors):
        out = generate_range(1876, 1886, self.template(), trained.checkpoint, snapshot_vectors)
        assert len(out.results) == 11
        assert [r.query.year for r in out.results] == list(range(1876, 1887))
        for r in out.results:
            assert len(r.melody) == 4

    def test_recent_decade(self, trained, snapshot_vectors):
        out = generate_range(2011, 2021, self.template(), trained.checkpoint, snapshot_vectors)
        assert len(out.results) == 11

    def test_concatenated_melody_stitches_events(self, trained, snapshot_vectors):
        out = generate_range(1880, 1882, self.template(), trained.checkpoint, snapshot_vectors)
        expected = [e for r in out.results for e in r.melody.events]
        assert out.concatenated.events == expected
        assert out.concatenated.source_id == "1880-1882"

    def test_rng_seed_offsets_by_year(self, trained, snapshot_vectors):
        out = generate_range(1900, 1903, self.template(rng_seed=10), trained.checkpoint, snapshot_vectors)
        assert [r.query.rng_seed for r in out.results] == [10, 11, 12, 13]

    def test_single_year_range_matches_generate(self, trained, snapshot_vectors):
        from dataclasses import replace

        template = self.template()
        out = generate_range(1984, 1984, template, trained.checkpoint, snapshot_vectors)
        direct = generate(replace(template, year=1984), trained.checkpoint, snapshot_vectors)
        assert len(out.results) == 1
        assert out.results[0].melody == direct.melody
        assert np.array_equal(out.results[0].attention, direct.attention)

    def test_start_after_end_rejected(self, trained, snapshot_vectors):
        with pytest.raises(DataError, match="after end year"):
            generate_range(1990, 1980, self.template(), trained.checkpoint, snapshot_vectors)
