import math

import pytest
from hypothesis import given
from hypothesis import strategies as st

from kmpbias import PhraseSet, compute_bonus, potential, score
from kmpbias.oracle import replay_bonus

a, b, c = 10, 11, 12

phrase_lists = st.lists(st.lists(st.integers(0, 5), min_size=1, max_size=5), min_size=1, max_size=6)
streams = st.lists(st.integers(0, 6), max_size=40)


def disjoint_phrases(draw_lengths):
    out, nxt = [], 0
    for n in draw_lengths:
        out.append(list(range(nxt, nxt + n)))
        nxt += n
    return out


def run(ps, stream):
    state = ps.zero_state()
    total, steps = 0.0, []
    for x in stream:
        r = compute_bonus(ps, state, x)
        total += r.bonus
        steps.append((r, total))
        state = r.new_state
    return state, total, steps


class TestScore:
    def test_zero_length(self):
        assert score(PhraseSet.from_tokens([[a]], 2.3), 0) == 0.0

    def test_linear(self):
        assert score(PhraseSet.from_tokens([[a]], 2.3), 4) == pytest.approx(9.2)

    def test_zero_bonus(self):
        assert score(PhraseSet.from_tokens([[a]], 0.0), 7) == 0.0


class TestPotential:
    def test_zero_state(self):
        ps = PhraseSet.from_tokens([[a, b], [b, c, a, b]], 1.0)
        assert potential(ps, (0, 0)) == 0.0

    def test_max_over_phrases(self):
        ps = PhraseSet.from_tokens([[a, b], [b, c, a, b]], 1.0)
        assert potential(ps, (1, 3)) == 3.0

    def test_full_match_override(self):
        ps = PhraseSet.from_tokens([[1, 2, 3, 4, 5], [6]], 1.0)
        assert potential(ps, (2, 0), override_lengths=(5, None)) == 5.0


class TestComputeBonus:
    def test_trace(self):
        ps = PhraseSet.from_tokens([[a, b], [b, c]], 1.0)
        r1 = compute_bonus(ps, (0, 0), a)
        assert (r1.new_state, r1.bonus, r1.matched_phrase_indices) == ((1, 0), 1.0, set())
        r2 = compute_bonus(ps, r1.new_state, b)
        assert (r2.new_state, r2.bonus, r2.matched_phrase_indices) == ((0, 0), 1.0, {0})

    def test_mismatch_cancels(self):
        ps = PhraseSet.from_tokens([[a, b]], 1.0)
        r = compute_bonus(ps, (1,), c)
        assert r.new_state == (0,)
        assert r.bonus == -1.0

    def test_duplicates_dropped(self, caplog):
        ps = PhraseSet.from_tokens([[a, b], [a, b], [c]], 1.0)
        assert len(ps) == 2
        assert "duplicate" in caplog.text

    def test_shared_prefix_uses_max_not_sum(self):
        ps = PhraseSet.from_tokens([[a, b, c], [a, c]], 2.0)
        r = compute_bonus(ps, (0, 0), a)
        assert r.new_state == (1, 1)
        assert r.bonus == 2.0

    @given(phrase_lists, streams, st.sampled_from([0.5, 1.0, 2.3]))
    def test_bonus_bounds(self, phrases, stream, delta):
        ps = PhraseSet.from_tokens(phrases, delta)
        maxlen = max(ps.lengths)
        _, _, steps = run(ps, stream)
        for r, _ in steps:
            assert -delta * (maxlen - 1) - 1e-12 <= r.bonus <= delta * maxlen + 1e-12
            if r.matched_phrase_indices:
                assert r.new_state == ps.zero_state()
            assert all(0 <= l < n for l, n in zip(r.new_state, ps.lengths))

    @given(phrase_lists, streams)
    def test_telescoping_before_first_match(self, phrases, stream):
        ps = PhraseSet.from_tokens(phrases, 3)  # integer delta keeps sums exact
        _, _, steps = run(ps, stream)
        for r, total in steps:
            if r.matched_phrase_indices:
                break
            assert total == potential(ps, r.new_state)

    @given(st.lists(st.integers(1, 4), min_size=1, max_size=6), st.data())
    def test_telescoping_with_completed_phrases(self, lengths, data):
        phrases = disjoint_phrases(lengths)
        top = sum(lengths) + 2
        stream = data.draw(st.lists(st.integers(0, top), max_size=60))
        ps = PhraseSet.from_tokens(phrases, 3)
        state, total, steps = run(ps, stream)
        credited = sum(3 * len(phrases[i]) for r, _ in steps for i in r.matched_phrase_indices)
        assert total == potential(ps, state) + credited

    @given(phrase_lists, streams, st.sampled_from([0.7, 1.0, 2.3]))
    def test_total_matches_replay_oracle(self, phrases, stream, delta):
        ps = PhraseSet.from_tokens(phrases, delta)
        uniq = [list(p.tokens) for p in ps.patterns]
        state, total, _ = run(ps, stream)
        o_total, o_state = replay_bonus(uniq, stream, delta)
        assert math.isclose(total, o_total, abs_tol=1e-9)
        assert list(state) == o_state["phrase_lengths"]

    @given(phrase_lists, st.sampled_from([0.5, 2.3]))
    def test_full_phrase_credit(self, phrases, delta):
        ps = PhraseSet.from_tokens(phrases, delta)
        for p in ps.patterns:
            single = PhraseSet((p,), delta)
            _, total, steps = run(single, p.tokens)
            assert math.isclose(total, delta * len(p), abs_tol=1e-9)
            assert steps[-1][0].matched_phrase_indices == {0}

    @given(phrase_lists, streams)
    def test_zero_ending_stream_without_match_cancels(self, phrases, stream):
        ps = PhraseSet.from_tokens(phrases, 3)
        state, total, steps = run(ps, stream)
        if state == ps.zero_state() and not any(r.matched_phrase_indices for r, _ in steps):
            assert total == 0

    @given(phrase_lists, streams)
    def test_zero_delta_keeps_transitions(self, phrases, stream):
        on = PhraseSet.from_tokens(phrases, 1.7)
        off = on.with_bonus(0.0)
        s_on, _, steps_on = run(on, stream)
        s_off, _, steps_off = run(off, stream)
        assert s_on == s_off
        assert all(r.bonus == 0.0 for r, _ in steps_off)
        assert [r.new_state for r, _ in steps_on] == [r.new_state for r, _ in steps_off]

    def test_invalid_state(self):
        from kmpbias import StateCorruptionError

        ps = PhraseSet.from_tokens([[a, b]], 1.0)
        with pytest.raises(StateCorruptionError):
            compute_bonus(ps, (2,), a)
        with pytest.raises(StateCorruptionError):
            compute_bonus(ps, (0, 0), a)

    def test_empty_set_rejected(self):
        with pytest.raises(ValueError):
            PhraseSet.from_tokens([], 1.0)
