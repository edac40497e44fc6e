import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from reachintent.errors import InvalidInputError, ParameterError, PreconditionError
from reachintent.hmm import (
    IRRATIONAL,
    UNKNOWN,
    EmissionHistory,
    HmmParams,
    batch_viterbi,
    build_transition,
    delta_gap,
    emission_row,
    goal_state,
    initial_belief,
    phi,
    state_to_index,
    viterbi_path,
    viterbi_step,
)
from helpers import brute_force_best, path_indices, sequence_score

REFERENCE = HmmParams(alpha=0.3, beta=0.05, gamma=0.05, delta=0.1)


def random_emission_rows(rng, goal_count, steps):
    rows = []
    for _ in range(steps):
        v = rng.uniform(0.0, 1.0, goal_count)
        phi_value = float(rng.uniform(0.0, 1.0))
        rows.append(emission_row(v, phi_value))
    return rows


class TestBuildTransition:
    def test_reference_two_goal_matrix(self):
        expected = np.array(
            [
                [0.7, 0.0, 0.3, 0.0],
                [0.0, 0.7, 0.3, 0.0],
                [0.05, 0.05, 0.85, 0.05],
                [0.0, 0.0, 0.1, 0.9],
            ]
        )
        assert build_transition(REFERENCE, 2) == pytest.approx(expected, abs=1e-15)

    def test_zero_alpha_locks_goal_states(self):
        T = build_transition(HmmParams(alpha=0.0), 3)
        for i in range(3):
            row = np.zeros(5)
            row[i] = 1.0
            assert np.array_equal(T[i], row)

    def test_infeasible_unknown_row_rejected(self):
        with pytest.raises(ParameterError, match="beta"):
            build_transition(HmmParams(beta=0.05, gamma=0.05), 20)

    def test_goal_to_goal_and_irrational_to_goal_stay_zero(self):
        T = build_transition(REFERENCE, 4)
        for i in range(4):
            for j in range(4):
                if i != j:
                    assert T[i, j] == 0.0
        assert np.all(T[5, :4] == 0.0)

    @given(
        alpha=st.floats(0.0, 1.0),
        beta=st.floats(0.0, 1.0),
        gamma=st.floats(0.0, 1.0),
        delta=st.floats(0.0, 1.0),
        goal_count=st.integers(1, 50),
    )
    def test_rows_stochastic_for_all_valid_draws(self, alpha, beta, gamma, delta, goal_count):
        if goal_count * beta + gamma > 1.0:
            beta = (1.0 - gamma) / (2.0 * goal_count)
        if goal_count * beta + gamma > 1.0:
            return
        T = build_transition(HmmParams(alpha=alpha, beta=beta, gamma=gamma, delta=delta), goal_count)
        assert np.all(T >= 0.0)
        assert T.sum(axis=1) == pytest.approx(np.ones(goal_count + 2), abs=1e-12)


class TestPhi:
    def test_windowed_mean_peak(self):
        history = [np.array([0.9, 0.0]), np.array([0.8, 0.0]), np.array([1.0, 0.0])]
        assert phi(history, 3) == pytest.approx(0.9)

    def test_all_zero_history(self):
        assert phi([np.zeros(3)] * 4, 2) == 0.0

    def test_window_limits_the_mean(self):
        history = [np.array([0.2, 0.6]), np.array([0.4, 0.0])]
        assert phi(history, 2) == pytest.approx(0.3)
        # Only the last vector counts with a window of one.
        assert phi(history, 1) == pytest.approx(0.4)

    def test_empty_history_rejected(self):
        with pytest.raises(PreconditionError):
            phi([], 5)


class TestDeltaGap:
    def test_gap_between_top_two(self):
        assert delta_gap(np.array([0.7, 0.2, 0.1])) == pytest.approx(0.5)

    def test_tie_has_zero_gap(self):
        assert delta_gap(np.array([0.5, 0.5])) == 0.0

    def test_single_goal_uses_zero_second(self):
        assert delta_gap(np.array([0.8])) == pytest.approx(0.8)


class TestEmissionRow:
    def test_fully_decided_evidence(self):
        # tanh(1)=0.7616 on the goal, delta gap 1 zeroes the unknown weight.
        row = emission_row(np.array([1.0, 0.0]), 0.9)
        assert row == pytest.approx([1.0, 0.0, 0.0, 0.0], abs=1e-12)

    def test_tied_evidence_splits_with_unknown(self):
        row = emission_row(np.array([0.5, 0.5]), 0.9)
        assert row == pytest.approx([0.2741, 0.2741, 0.4518, 0.0], abs=1e-4)

    def test_low_phi_routes_mass_to_irrational(self):
        row = emission_row(np.array([0.0, 0.0]), 0.2)
        assert row == pytest.approx([0.0, 0.0, 0.1305, 0.8695], abs=1e-4)

    def test_rows_always_normalized(self, rng):
        for _ in range(50):
            row = emission_row(rng.uniform(0, 1, 3), float(rng.uniform(0, 1)))
            assert row.sum() == pytest.approx(1.0, abs=1e-12)
            assert np.all(row >= 0.0)

    def test_out_of_range_inputs_rejected(self):
        with pytest.raises(InvalidInputError):
            emission_row(np.array([1.2, 0.0]), 0.9)
        with pytest.raises(InvalidInputError):
            emission_row(np.array([0.5, 0.5]), 1.5)


class TestInitialBelief:
    @pytest.mark.parametrize("goal_count", [1, 3, 7])
    def test_all_mass_on_unknown(self, goal_count):
        belief = initial_belief(goal_count)
        assert belief[goal_count] == 1.0
        assert belief.sum() == pytest.approx(1.0)
        assert np.count_nonzero(belief) == 1


class TestViterbiStep:
    def test_identity_transition_with_flat_row_is_a_fixed_point(self):
        belief = np.array([0.2, 0.3, 0.4, 0.1])
        step = viterbi_step(belief, np.eye(4), np.full(4, 0.25))
        assert step.belief == pytest.approx(belief, abs=1e-12)
        assert not step.reset

    def test_hand_evaluated_recursion(self):
        # Frozen from the max-product recursion evaluated by hand:
        # scores = [0.03, 0.005, 0.17, 0.005], normalized below.
        T = build_transition(REFERENCE, 2)
        step = viterbi_step(np.array([0.0, 0.0, 1.0, 0.0]), T, np.array([0.6, 0.1, 0.2, 0.1]))
        assert step.belief == pytest.approx([0.1429, 0.0238, 0.8095, 0.0238], abs=1e-4)
        assert list(step.backpointers) == [2, 2, 2, 2]

    def test_output_always_normalized(self, rng):
        T = build_transition(REFERENCE, 3)
        belief = initial_belief(3)
        for row in random_emission_rows(rng, 3, 50):
            belief = viterbi_step(belief, T, row).belief
            assert belief.sum() == pytest.approx(1.0, abs=1e-12)

    def test_all_zero_scores_reset_to_initial(self):
        T = build_transition(REFERENCE, 2)
        # All mass irrational, but the row only supports goal states, which
        # are unreachable from the irrational state.
        step = viterbi_step(np.array([0.0, 0.0, 0.0, 1.0]), T, np.array([0.5, 0.5, 0.0, 0.0]))
        assert step.reset
        assert step.belief == pytest.approx(initial_belief(2))

    def test_dimension_mismatch_rejected(self):
        with pytest.raises(InvalidInputError):
            viterbi_step(np.ones(3) / 3, np.eye(4), np.ones(4) / 4)


class TestViterbiPath:
    def test_single_step_backtrace(self):
        T = build_transition(REFERENCE, 2)
        step = viterbi_step(initial_belief(2), T, emission_row(np.zeros(2), 0.0))
        path = viterbi_path([step.backpointers], step.belief)
        assert path == [UNKNOWN]

    def test_forced_goal_passes_through_unknown_first(self):
        # Ambiguous evidence first, then strong support for goal 0: the best
        # sequence lingers in the unknown state before committing. Oracle:
        # exhaustive max-product over all 4**3 sequences.
        T = build_transition(REFERENCE, 2)
        rows = [
            emission_row(np.array([0.3, 0.25]), 0.9),
            emission_row(np.array([0.95, 0.05]), 0.9),
            emission_row(np.array([0.95, 0.05]), 0.9),
        ]
        belief = initial_belief(2)
        backptrs = []
        for row in rows:
            step = viterbi_step(belief, T, row)
            belief = step.belief
            backptrs.append(step.backpointers)
        path = viterbi_path(backptrs, belief)
        assert path[-1] == goal_state(0)
        assert UNKNOWN in path[:-1]
        best_score, best_seq = brute_force_best(T, initial_belief(2), rows)
        assert tuple(path_indices(path, 2)) == best_seq

    def test_empty_trellis_rejected(self):
        with pytest.raises(PreconditionError):
            viterbi_path([], initial_belief(2))

    @settings(deadline=None)
    @given(
        seed=st.integers(0, 999),
        goal_count=st.integers(1, 3),
        steps=st.integers(1, 8),
    )
    def test_decoded_path_score_matches_exhaustive_maximum(self, seed, goal_count, steps):
        rng = np.random.default_rng(seed)
        T = build_transition(REFERENCE, goal_count)
        rows = random_emission_rows(rng, goal_count, steps)
        initial = initial_belief(goal_count)
        path, _ = batch_viterbi(T, initial, rows)
        decoded = sequence_score(T, initial, rows, path_indices(path, goal_count))
        best_score, _ = brute_force_best(T, initial, rows)
        assert decoded == pytest.approx(best_score, rel=1e-9)

    def test_paths_only_use_positive_transitions(self, rng):
        T = build_transition(REFERENCE, 3)
        rows = random_emission_rows(rng, 3, 60)
        belief = initial_belief(3)
        backptrs = []
        for row in rows:
            step = viterbi_step(belief, T, row)
            belief = step.belief
            backptrs.append(step.backpointers)
        path = path_indices(viterbi_path(backptrs, belief), 3)
        for a, b in zip(path, path[1:]):
            assert T[a, b] > 0.0


class TestBatchViterbi:
    def test_online_and_batch_agree(self, rng):
        for trial in range(20):
            goal_count = int(rng.integers(1, 6))
            steps = int(rng.integers(1, 60))
            T = build_transition(REFERENCE, goal_count)
            rows = random_emission_rows(rng, goal_count, steps)
            belief = initial_belief(goal_count)
            online = []
            for row in rows:
                belief = viterbi_step(belief, T, row).belief
                online.append(belief)
            _, batch = batch_viterbi(T, initial_belief(goal_count), rows)
            for a, b in zip(online, batch):
                assert a == pytest.approx(b, abs=1e-12)

    def test_single_row_base_case_under_identity_transition(self):
        initial = np.array([0.1, 0.2, 0.6, 0.1])
        row = np.array([0.4, 0.3, 0.2, 0.1])
        _, beliefs = batch_viterbi(np.eye(4), initial, [row])
        expected = initial * row
        assert beliefs[0] == pytest.approx(expected / expected.sum(), abs=1e-12)

    def test_row_scaling_cancels(self, rng):
        T = build_transition(REFERENCE, 2)
        rows = random_emission_rows(rng, 2, 30)
        scaled = [row.copy() for row in rows]
        scaled[12] = scaled[12] * 7.0
        path_a, beliefs_a = batch_viterbi(T, initial_belief(2), rows)
        path_b, beliefs_b = batch_viterbi(T, initial_belief(2), scaled)
        assert path_a == path_b
        for a, b in zip(beliefs_a, beliefs_b):
            assert a == pytest.approx(b, abs=1e-12)

    def test_empty_history_rejected(self):
        with pytest.raises(PreconditionError):
            batch_viterbi(np.eye(3), np.ones(3) / 3, [])


class TestIrrationalDynamics:
    def test_irrational_belief_monotone_after_taking_over(self):
        # Repeated low-phi rows: once the irrational state is the argmax its
        # belief share must not decrease until rational evidence returns.
        T = build_transition(REFERENCE, 2)
        belief = initial_belief(2)
        shares = []
        for _ in range(40):
            belief = viterbi_step(belief, T, emission_row(np.zeros(2), 0.0)).belief
            shares.append(belief[3])
        first_argmax = next(i for i, share in enumerate(shares) if share > 0.5)
        tail = shares[first_argmax:]
        assert all(b >= a - 1e-12 for a, b in zip(tail, tail[1:]))


class TestEmissionHistory:
    def test_push_tracks_window_and_rows(self):
        history = EmissionHistory(window=3)
        for value in (0.9, 0.8, 1.0, 0.6):
            history.push(np.array([value, 0.0]))
        assert len(history.v_ring) == 3
        assert len(history.rows) == 4
        assert all(row.sum() == pytest.approx(1.0, abs=1e-12) for row in history.rows)

    def test_goal_edits_adjust_the_ring(self):
        history = EmissionHistory(window=4)
        history.push(np.array([0.2, 0.6]))
        history.extend_goal()
        assert history.v_ring[0] == pytest.approx([0.2, 0.6, 0.0])
        assert history.rows == []
        history.drop_goal(1)
        assert history.v_ring[0] == pytest.approx([0.2, 0.0])
