"""Hand-traceable temporal memory behaviour on tiny instances."""

import unittest

import numpy as np

from driftwatch.errors import InputError
from driftwatch.htm import Sdr, TemporalConfig, TemporalMemory


class TinyTemporalMemoryTest(unittest.TestCase):
    """1 cell per column, 8 columns: cell activity == column activity."""

    def setUp(self):
        self.cfg = TemporalConfig(
            cells_per_column=1,
            segment_activation_threshold=1,
            initial_permanence=0.55,
            permanence_connected=0.5,
            permanence_inc=0.1,
            permanence_dec=0.05,
            max_synapses_per_segment=4,
            seed=42,
        )
        self.tm = TemporalMemory(self.cfg, n_columns=8)
        self.A = Sdr(8, [0, 1])
        self.B = Sdr(8, [2, 3])

    def test_first_step_predicts_nothing(self):
        out = self.tm.step(self.A, learn=True)
        self.assertEqual(out.n_active, 0)

    def test_two_symbol_cycle_learns_both_transitions(self):
        predictions = []
        for sym in [self.A, self.B, self.A, self.B, self.A, self.B]:
            predictions.append(self.tm.step(sym, learn=True))
        # After the second A (3rd step) the A->B transition exists, so
        # stepping on A must predict a superset of B's columns.
        covered = set(predictions[2].active.tolist())
        self.assertTrue(
            set(self.B.active.tolist()) <= covered,
            f"A should predict B's columns, got {sorted(covered)}",
        )
        # and once learned, B predicts A back
        covered_back = set(predictions[3].active.tolist())
        self.assertTrue(set(self.A.active.tolist()) <= covered_back)

    def test_no_learn_is_pure(self):
        for sym in [self.A, self.B, self.A, self.B]:
            self.tm.step(sym, learn=True)
        before = {k: v.copy() for k, v in self.tm.state_arrays().items()}
        self.tm.step(self.A, learn=False)
        self.tm.step(self.B, learn=False)
        after = self.tm.state_arrays()
        self.assertEqual(sorted(before), sorted(after))
        for key in before:
            np.testing.assert_array_equal(before[key], after[key], err_msg=key)

    def test_no_learn_still_predicts(self):
        for sym in [self.A, self.B, self.A, self.B]:
            self.tm.step(sym, learn=True)
        out = self.tm.step(self.A, learn=False)
        self.assertTrue(set(self.B.active.tolist()) <= set(out.active.tolist()))

    def test_width_mismatch_rejected(self):
        with self.assertRaises(InputError):
            self.tm.step(Sdr(9, [0]), learn=True)


class MultiCellTest(unittest.TestCase):
    def test_burst_grows_on_least_used_cell(self):
        cfg = TemporalConfig(
            cells_per_column=4,
            segment_activation_threshold=1,
            max_synapses_per_segment=8,
            seed=0,
        )
        tm = TemporalMemory(cfg, n_columns=8)
        tm.step(Sdr(8, [0, 1]), learn=True)   # no previous winners: no growth
        self.assertEqual(tm.n_segments, 0)
        tm.step(Sdr(8, [2, 3]), learn=True)   # grows one segment per column
        self.assertEqual(tm.n_segments, 2)
        # least-used cell of a fresh column is its cell 0
        self.assertEqual(sorted(tm.seg_owner[:2].tolist()), [8, 12])
        # synapses point at the previous winners (cell 0 of columns 0 and 1)
        grown_pre = sorted(set(tm.seg_pre[:2][tm.seg_pre[:2] >= 0].tolist()))
        self.assertEqual(grown_pre, [0, 4])

    def test_reinforcement_raises_permanence_of_correct_prediction(self):
        cfg = TemporalConfig(
            cells_per_column=2,
            segment_activation_threshold=1,
            initial_permanence=0.55,
            permanence_inc=0.1,
            permanence_dec=0.05,
            max_synapses_per_segment=4,
            seed=1,
        )
        tm = TemporalMemory(cfg, n_columns=8)
        A, B = Sdr(8, [0, 1]), Sdr(8, [2, 3])
        for sym in [A, B, A, B]:
            tm.step(sym, learn=True)
        # The A->B segments predicted B correctly on the final step, so their
        # synapse permanences must sit above the initial value.
        self.assertGreater(tm.seg_perm[:tm.n_segments].max(), 0.55)

    def test_predicted_column_activates_only_predicted_cells(self):
        cfg = TemporalConfig(
            cells_per_column=4,
            segment_activation_threshold=1,
            max_synapses_per_segment=8,
            seed=3,
        )
        tm = TemporalMemory(cfg, n_columns=8)
        A, B = Sdr(8, [0, 1]), Sdr(8, [2, 3])
        for sym in [A, B, A]:
            tm.step(sym, learn=True)
        # B is now predicted; feeding B should activate exactly the predicted
        # cells inside B's columns rather than bursting all of them.
        predicted_in_b = int(tm.prev_predictive.reshape(8, 4)[[2, 3]].sum())
        self.assertGreater(predicted_in_b, 0)
        tm.step(B, learn=True)
        self.assertEqual(int(tm.prev_active.sum()), predicted_in_b)


if __name__ == "__main__":
    unittest.main()
