import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from kmpbias import (
    InvalidPatternError,
    InvalidVocabError,
    StateCorruptionError,
    compile_pattern,
    expand_transition_table,
    forward,
)
from kmpbias.kmp import forward_counted, scan
from kmpbias.oracle import naive_failure, naive_search

from conftest import A, B, C, ABACABABA_FAILURE, ABACABABA

patterns = st.integers(2, 4).flatmap(
    lambda a: st.lists(st.integers(0, a - 1), min_size=1, max_size=16)
)


def chain_length(failure, start):
    n = 0
    while start >= 0:
        start = failure[start]
        n += 1
    return n


class TestCompile:
    def test_abacababa_failure_table(self, abacababa):
        assert list(abacababa.failure) == ABACABABA_FAILURE

    def test_abacababa_gamma_is_three(self, abacababa):
        # worst state is i = 7: failure chain 3 -> 1 -> 0 -> -1
        assert abacababa.gamma == 3
        assert chain_length(abacababa.failure, abacababa.failure[7]) == 3

    def test_single_token(self):
        p = compile_pattern([A])
        assert p.failure == (-1,)
        assert p.gamma == 1

    def test_unary_run_matches_border_oracle(self):
        p = compile_pattern([A, A, A, A])
        assert list(p.failure) == naive_failure([A, A, A, A]) == [-1, -1, -1, -1]

    def test_empty_pattern_rejected(self):
        with pytest.raises(InvalidPatternError):
            compile_pattern([])

    def test_negative_token_rejected(self):
        with pytest.raises(InvalidPatternError):
            compile_pattern([0, -3])

    @given(patterns)
    def test_table_invariants(self, toks):
        p = compile_pattern(toks)
        assert p.failure[0] == -1
        assert all(f < i for i, f in enumerate(p.failure))
        assert p.gamma == max(1, max(chain_length(p.failure, f) for f in p.failure))

    @given(patterns)
    def test_shortcut_soundness(self, toks):
        p = compile_pattern(toks)
        for i, f in enumerate(p.failure):
            if f >= 0:
                assert p.tokens[f] != p.tokens[i]

    @given(patterns)
    def test_linear_build(self, toks):
        p = compile_pattern(toks)
        assert p.build_steps <= 2 * len(toks)

    @given(patterns)
    def test_matches_border_oracle(self, toks):
        assert list(compile_pattern(toks).failure) == naive_failure(toks)


class TestForward:
    def test_mismatch_falls_back(self, abacababa):
        assert forward(abacababa, 7, C) == (4, False)

    def test_full_match_resets(self, abacababa):
        assert forward(abacababa, 8, A) == (0, True)

    @pytest.mark.parametrize("toks", [[A], [A, B], ABACABABA])
    def test_first_token(self, toks):
        p = compile_pattern(toks)
        assert forward(p, 0, toks[0]) == (1 % len(toks), len(toks) == 1)

    @pytest.mark.parametrize("length", [-1, 9, 100])
    def test_out_of_range_state(self, abacababa, length):
        with pytest.raises(StateCorruptionError):
            forward(abacababa, length, A)

    @given(patterns, st.integers(0, 4))
    def test_loop_bound_and_result_shape(self, toks, x):
        p = compile_pattern(toks)
        for i in range(len(p)):
            q, full, iters = forward_counted(p, i, x)
            assert iters <= p.gamma
            assert 0 <= q <= i + 1
            if full:
                assert q == 0

    @settings(max_examples=200)
    @given(
        st.integers(2, 26).flatmap(
            lambda a: st.tuples(
                st.lists(st.integers(0, a - 1), min_size=1, max_size=16),
                st.lists(st.integers(0, a - 1), max_size=512),
            )
        )
    )
    def test_scan_equals_naive_search(self, case):
        toks, text = case
        assert scan(compile_pattern(toks), text) == naive_search(toks, text)


class TestTransitionTable:
    def test_row_zero(self, abacababa):
        table, _ = expand_transition_table(abacababa, 3)
        assert list(table[0]) == [1, 0, 0]

    def test_row_seven_agrees_with_forward(self, abacababa):
        table, full = expand_transition_table(abacababa, 3)
        for x in range(3):
            assert (table[7, x], full[7, x]) == forward(abacababa, 7, x)
        # A: 3 -> 1 -> 0 matches at 0; B: extends to 8; C: tokens[3] == C
        assert list(table[7]) == [1, 8, 4]

    def test_single_token_table(self):
        table, full = expand_transition_table(compile_pattern([A]), 2)
        assert table.tolist() == [[0, 0]]
        assert full.tolist() == [[True, False]]

    def test_vocab_too_small(self, abacababa):
        with pytest.raises(InvalidVocabError):
            expand_transition_table(abacababa, 2)

    @given(patterns)
    def test_table_equals_loop(self, toks):
        p = compile_pattern(toks)
        V = max(toks) + 2
        table, full = expand_transition_table(p, V)
        assert table.shape == (len(p), V)
        for i in range(len(p)):
            for x in range(V):
                assert (table[i, x], full[i, x]) == tuple(forward(p, i, x))

    @given(patterns, st.lists(st.integers(0, 4), max_size=64))
    def test_table_driven_scan_is_deterministic_automaton(self, toks, text):
        # one lookup per input token, no epsilon moves: same hits as the loop scanner
        p = compile_pattern(toks)
        table, full = expand_transition_table(p, 5)
        state, hits = 0, []
        for j, x in enumerate(text):
            if full[state, x]:
                hits.append(j - len(p) + 1)
            state = int(table[state, x])
        assert hits == scan(p, text)
        assert np.all((table >= 0) & (table < len(p)))
