"""Sample database: ordering, deletion, atomic updates, persistence."""

import threading

import numpy as np
import pytest

from rollmc import RestoreError, SampleDatabase


def _fill(db, n, start_seq=0, dim=2, weight=1.0, cutoff=1):
    vals = np.arange(n * dim, dtype=float).reshape(n, dim) + start_seq
    db.insert_batch(
        vals,
        np.full(n, weight),
        np.arange(start_seq, start_seq + n, dtype=np.int64),
        np.full(n, cutoff, dtype=np.int64),
    )


class TestInsertAndSnapshot:
    def test_roundtrip_preserves_order(self):
        db = SampleDatabase(n_max=10)
        _fill(db, 4)
        snap = db.snapshot()
        assert snap.n == 4
        np.testing.assert_array_equal(snap.production_seqs, [0, 1, 2, 3])
        np.testing.assert_array_equal(snap.values[2], [4.0, 5.0])

    def test_dimension_is_locked_after_first_insert(self):
        db = SampleDatabase(n_max=10)
        _fill(db, 2, dim=3)
        with pytest.raises(ValueError):
            _fill(db, 2, start_seq=10, dim=2)

    def test_sequence_numbers_must_increase(self):
        db = SampleDatabase(n_max=10)
        _fill(db, 3)
        with pytest.raises(ValueError):
            _fill(db, 2, start_seq=2)

    def test_rejects_bad_weights(self):
        db = SampleDatabase(n_max=10)
        with pytest.raises(ValueError):
            _fill(db, 2, weight=-1.0)
        with pytest.raises(ValueError):
            _fill(db, 2, weight=np.inf)


class TestDeletion:
    def test_overflow_removes_oldest(self):
        db = SampleDatabase(n_max=3)
        _fill(db, 5)
        removed = db.delete_overflow()
        np.testing.assert_array_equal(removed, [0, 1])
        np.testing.assert_array_equal(db.snapshot().production_seqs, [2, 3, 4])

    def test_no_overflow_is_a_noop(self):
        db = SampleDatabase(n_max=5)
        _fill(db, 3)
        assert db.delete_overflow().size == 0
        assert len(db) == 3

    def test_random_sequences_keep_most_recent(self):
        # reference model: a plain list of seq numbers
        rng = np.random.default_rng(42)
        for _ in range(100):
            db = SampleDatabase(n_max=int(rng.integers(1, 12)))
            reference: list[int] = []
            next_seq = 0
            for _ in range(rng.integers(1, 30)):
                move = rng.random()
                if move < 0.5:
                    m = int(rng.integers(1, 6))
                    _fill(db, m, start_seq=next_seq)
                    reference.extend(range(next_seq, next_seq + m))
                    next_seq += m
                elif move < 0.75:
                    db.set_n_max(int(rng.integers(1, 12)))
                else:
                    db.delete_overflow()
                    reference = reference[max(0, len(reference) - db.n_max) :]
                    assert len(db) <= db.n_max
                np.testing.assert_array_equal(
                    db.snapshot().production_seqs,
                    reference[-len(db) :] if len(db) else [],
                )


class TestAtomicUpdates:
    def test_set_weights(self):
        db = SampleDatabase(n_max=10)
        _fill(db, 3)
        db.set_weights(np.array([0, 1, 2]), np.array([0.5, 1.5, 2.5]))
        np.testing.assert_array_equal(db.snapshot().weights, [0.5, 1.5, 2.5])

    def test_set_weights_prefix_only(self):
        db = SampleDatabase(n_max=10)
        _fill(db, 3)
        db.set_weights(np.array([0, 1]), np.array([9.0, 9.0]))
        np.testing.assert_array_equal(db.snapshot().weights, [9.0, 9.0, 1.0])

    def test_set_weights_must_match_stored_order(self):
        db = SampleDatabase(n_max=10)
        _fill(db, 3)
        with pytest.raises(ValueError):
            db.set_weights(np.array([1, 0]), np.array([1.0, 1.0]))

    def test_replace_values_may_change_dimension(self):
        db = SampleDatabase(n_max=10)
        _fill(db, 3, dim=2)
        new_vals = np.zeros((3, 4))
        db.replace_values(np.array([0, 1, 2]), new_vals)
        snap = db.snapshot()
        assert snap.values.shape == (3, 4)
        np.testing.assert_array_equal(snap.weights, np.ones(3))
        assert db.dimension == 4
        _fill(db, 1, start_seq=7, dim=4)
        assert len(db) == 4

    def test_replace_values_requires_full_coverage(self):
        db = SampleDatabase(n_max=10)
        _fill(db, 3)
        with pytest.raises(ValueError):
            db.replace_values(np.array([0, 1]), np.zeros((2, 2)))


class TestPersistence:
    def test_save_load_roundtrip(self, tmp_path):
        db = SampleDatabase(n_max=7)
        _fill(db, 5, dim=3, weight=0.25, cutoff=4)
        db.set_target_index(6)
        path = str(tmp_path / "samples.db")
        db.save(path)
        loaded = SampleDatabase.load(path)
        snap, orig = loaded.snapshot(), db.snapshot()
        np.testing.assert_array_equal(snap.values, orig.values)
        np.testing.assert_array_equal(snap.weights, orig.weights)
        np.testing.assert_array_equal(snap.production_seqs, orig.production_seqs)
        np.testing.assert_array_equal(snap.info_cutoffs, orig.info_cutoffs)
        assert loaded.target_index == 6
        assert loaded.n_max == 7

    def test_empty_roundtrip(self, tmp_path):
        db = SampleDatabase(n_max=3)
        path = str(tmp_path / "empty.db")
        db.save(path)
        assert len(SampleDatabase.load(path)) == 0

    def test_dimension_mismatch_is_rejected(self, tmp_path):
        db = SampleDatabase(n_max=3)
        _fill(db, 2, dim=3)
        path = str(tmp_path / "d3.db")
        db.save(path)
        with pytest.raises(RestoreError):
            SampleDatabase.load(path, expect_dimension=2)

    def test_corrupt_files_are_rejected(self, tmp_path):
        bad_magic = tmp_path / "bad.db"
        bad_magic.write_bytes(b"NOPE" + bytes(40))
        with pytest.raises(RestoreError):
            SampleDatabase.load(str(bad_magic))
        db = SampleDatabase(n_max=3)
        _fill(db, 2)
        path = tmp_path / "trunc.db"
        db.save(str(path))
        path.write_bytes(path.read_bytes()[:-8])
        with pytest.raises(RestoreError):
            SampleDatabase.load(str(path))


class TestConcurrency:
    def test_snapshots_never_tear(self):
        # writer keeps the invariant: all weights equal v, possibly followed
        # by one freshly inserted group of weight v + 1
        db = SampleDatabase(n_max=1000)
        _fill(db, 3, weight=1.0)
        stop = threading.Event()
        errors: list[str] = []

        def writer():
            v = 1.0
            seq = 3
            for _ in range(200):
                with db.transaction():
                    snap = db.snapshot()
                    db.set_weights(snap.production_seqs, np.full(snap.n, v))
                _fill(db, 3, start_seq=seq, weight=v + 1.0)
                seq += 3
                v += 1.0

        def reader():
            while not stop.is_set():
                snap = db.snapshot()
                w = snap.weights
                if snap.n == 0:
                    continue
                levels = np.unique(w)
                if len(levels) > 2:
                    errors.append(f"saw {len(levels)} weight levels")
                    return
                if len(levels) == 2:
                    if levels[1] - levels[0] != 1.0 or not np.all(np.diff(w) >= 0):
                        errors.append("interleaved weight versions")
                        return

        threads = [threading.Thread(target=reader) for _ in range(3)]
        for th in threads:
            th.start()
        writer()
        stop.set()
        for th in threads:
            th.join()
        assert not errors, errors
