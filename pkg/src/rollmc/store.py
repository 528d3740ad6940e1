"""Weighted sample database.

Records are kept in production order (strictly increasing ``production_seq``).
Deletion always removes the oldest records first, so storage is a contiguous
window over preallocated column arrays. All mutating entry points take the
instance lock; ``transaction()`` exposes it for compound read-modify-write
sequences (the updater), giving single-writer/multi-reader linearizability in
the concurrent execution mode.
"""

from __future__ import annotations

import struct
import threading
from dataclasses import dataclass

import numpy as np

from .errors import RestoreError

_MAGIC = b"RMCS"
_VERSION = 1
_HEADER = struct.Struct("<4sIqqqq")  # magic, version, dim, target_index, n_max, count


@dataclass
class SampleRecord:
    """One stored sample: identity, provenance and weight."""

    production_seq: int
    info_cutoff: int
    weight: float
    value: np.ndarray


@dataclass(frozen=True)
class StoreSnapshot:
    """A consistent copy of the store contents, in production order."""

    values: np.ndarray
    weights: np.ndarray
    production_seqs: np.ndarray
    info_cutoffs: np.ndarray
    target_index: int

    @property
    def n(self) -> int:
        return len(self.weights)


class SampleDatabase:
    """Bounded, production-ordered collection of weighted samples."""

    def __init__(self, n_max: int, dimension: int | None = None):
        if n_max < 1:
            raise ValueError("n_max must be >= 1")
        self._lock = threading.RLock()
        self._n_max = int(n_max)
        self._dim = dimension
        self._target_index = 0
        self._start = 0
        self._count = 0
        self._cap = 0
        self._values: np.ndarray | None = None
        self._weights = np.empty(0)
        self._seqs = np.empty(0, dtype=np.int64)
        self._cutoffs = np.empty(0, dtype=np.int64)

    # -- bookkeeping ------------------------------------------------------

    def __len__(self) -> int:
        with self._lock:
            return self._count

    @property
    def n_max(self) -> int:
        return self._n_max

    def set_n_max(self, n_max: int) -> None:
        if n_max < 1:
            raise ValueError("n_max must be >= 1")
        with self._lock:
            self._n_max = int(n_max)

    @property
    def dimension(self) -> int | None:
        return self._dim

    @property
    def target_index(self) -> int:
        return self._target_index

    def set_target_index(self, n: int) -> None:
        with self._lock:
            if n < self._target_index:
                raise ValueError("target index must not decrease")
            self._target_index = int(n)

    def transaction(self):
        """Reentrant lock context for compound operations."""
        return self._lock

    @property
    def last_production_seq(self) -> int:
        with self._lock:
            if self._count == 0:
                return -1
            return int(self._seqs[self._start + self._count - 1])

    # -- storage management -----------------------------------------------

    def _grow(self, extra: int) -> None:
        need = self._count + extra
        if self._start + need <= self._cap and self._values is not None:
            return
        new_cap = max(2 * need, 1024)
        new_vals = np.empty((new_cap, self._dim))
        new_w = np.empty(new_cap)
        new_s = np.empty(new_cap, dtype=np.int64)
        new_c = np.empty(new_cap, dtype=np.int64)
        if self._count:
            sl = slice(self._start, self._start + self._count)
            new_vals[: self._count] = self._values[sl]
            new_w[: self._count] = self._weights[sl]
            new_s[: self._count] = self._seqs[sl]
            new_c[: self._count] = self._cutoffs[sl]
        self._values, self._weights = new_vals, new_w
        self._seqs, self._cutoffs = new_s, new_c
        self._start, self._cap = 0, new_cap

    # -- mutation -----------------------------------------------------------

    def insert_batch(
        self,
        values: np.ndarray,
        weights: np.ndarray,
        production_seqs: np.ndarray,
        info_cutoffs: np.ndarray,
    ) -> None:
        """Append a batch of records; sequence numbers must keep increasing."""
        values = np.atleast_2d(np.asarray(values, dtype=float))
        weights = np.asarray(weights, dtype=float)
        seqs = np.asarray(production_seqs, dtype=np.int64)
        cutoffs = np.asarray(info_cutoffs, dtype=np.int64)
        m = len(weights)
        if values.shape[0] != m or seqs.shape[0] != m or cutoffs.shape[0] != m:
            raise ValueError("batch arrays disagree in length")
        if m == 0:
            return
        if np.any(weights < 0.0) or not np.all(np.isfinite(weights)):
            raise ValueError("weights must be finite and nonnegative")
        if np.any(np.diff(seqs) <= 0):
            raise ValueError("production_seqs must be strictly increasing")
        with self._lock:
            if self._dim is None:
                self._dim = values.shape[1]
            if values.shape[1] != self._dim:
                raise ValueError(
                    f"value dimension {values.shape[1]} does not match store dimension {self._dim}"
                )
            if self._count and seqs[0] <= self._seqs[self._start + self._count - 1]:
                raise ValueError("production_seqs must exceed all stored ones")
            self._grow(m)
            lo = self._start + self._count
            self._values[lo : lo + m] = values
            self._weights[lo : lo + m] = weights
            self._seqs[lo : lo + m] = seqs
            self._cutoffs[lo : lo + m] = cutoffs
            self._count += m

    def insert_records(self, records: list[SampleRecord]) -> None:
        if not records:
            return
        self.insert_batch(
            np.array([r.value for r in records], dtype=float),
            np.array([r.weight for r in records], dtype=float),
            np.array([r.production_seq for r in records], dtype=np.int64),
            np.array([r.info_cutoff for r in records], dtype=np.int64),
        )

    def delete_overflow(self) -> np.ndarray:
        """Drop the oldest records until ``len(self) <= n_max``; return their seqs."""
        with self._lock:
            excess = self._count - self._n_max
            if excess <= 0:
                return np.empty(0, dtype=np.int64)
            removed = self._seqs[self._start : self._start + excess].copy()
            self._start += excess
            self._count -= excess
            return removed

    def set_weights(self, production_seqs: np.ndarray, weights: np.ndarray) -> None:
        """Atomically overwrite the weights of the identified records.

        The sequence numbers must be exactly the store's current leading
        records in order (the updater rewrites the snapshot it read).
        """
        seqs = np.asarray(production_seqs, dtype=np.int64)
        w = np.asarray(weights, dtype=float)
        if seqs.shape != w.shape:
            raise ValueError("seqs and weights disagree in length")
        if np.any(w < 0.0) or not np.all(np.isfinite(w)):
            raise ValueError("weights must be finite and nonnegative")
        with self._lock:
            m = len(seqs)
            if m > self._count or not np.array_equal(
                seqs, self._seqs[self._start : self._start + m]
            ):
                raise ValueError("set_weights must target the stored leading records")
            self._weights[self._start : self._start + m] = w

    def replace_values(self, production_seqs: np.ndarray, new_values: np.ndarray) -> None:
        """Atomically replace sample values (the dimension may change)."""
        seqs = np.asarray(production_seqs, dtype=np.int64)
        vals = np.atleast_2d(np.asarray(new_values, dtype=float))
        if vals.shape[0] != len(seqs):
            raise ValueError("seqs and values disagree in length")
        with self._lock:
            m = len(seqs)
            if m != self._count or not np.array_equal(
                seqs, self._seqs[self._start : self._start + m]
            ):
                raise ValueError("replace_values must target all stored records in order")
            if vals.shape[1] == self._dim and m:
                self._values[self._start : self._start + m] = vals
                return
            self._dim = vals.shape[1] if m else self._dim
            sl = slice(self._start, self._start + m)
            weights = self._weights[sl].copy()
            cutoffs = self._cutoffs[sl].copy()
            self._values = vals.copy()
            self._weights, self._seqs = weights, seqs.copy()
            self._cutoffs = cutoffs
            self._start, self._cap = 0, m

    # -- reads ---------------------------------------------------------------

    def snapshot(self) -> StoreSnapshot:
        with self._lock:
            sl = slice(self._start, self._start + self._count)
            vals = (
                self._values[sl].copy()
                if self._values is not None
                else np.empty((0, self._dim or 0))
            )
            return StoreSnapshot(
                values=vals,
                weights=self._weights[sl].copy(),
                production_seqs=self._seqs[sl].copy(),
                info_cutoffs=self._cutoffs[sl].copy(),
                target_index=self._target_index,
            )

    def records(self) -> list[SampleRecord]:
        snap = self.snapshot()
        return [
            SampleRecord(int(s), int(c), float(w), v)
            for s, c, w, v in zip(
                snap.production_seqs, snap.info_cutoffs, snap.weights, snap.values
            )
        ]

    # -- persistence ----------------------------------------------------------

    def save(self, path: str) -> None:
        """Write the store to ``path`` in the fixed little-endian layout."""
        with self._lock:
            snap = self.snapshot()
            dim = self._dim if self._dim is not None else 0
        rec = np.empty(
            snap.n,
            dtype=np.dtype(
                [("seq", "<i8"), ("cutoff", "<i8"), ("weight", "<f8"), ("value", "<f8", (dim,))],
                align=False,
            ),
        )
        rec["seq"] = snap.production_seqs
        rec["cutoff"] = snap.info_cutoffs
        rec["weight"] = snap.weights
        if dim:
            rec["value"] = snap.values
        with open(path, "wb") as fh:
            fh.write(_HEADER.pack(_MAGIC, _VERSION, dim, snap.target_index, self._n_max, snap.n))
            fh.write(rec.tobytes())

    @classmethod
    def load(cls, path: str, expect_dimension: int | None = None) -> "SampleDatabase":
        with open(path, "rb") as fh:
            head = fh.read(_HEADER.size)
            if len(head) != _HEADER.size:
                raise RestoreError(f"{path}: truncated header")
            magic, version, dim, target, n_max, count = _HEADER.unpack(head)
            if magic != _MAGIC:
                raise RestoreError(f"{path}: not a sample database")
            if version != _VERSION:
                raise RestoreError(f"{path}: unsupported format version {version}")
            if expect_dimension is not None and dim != expect_dimension:
                raise RestoreError(
                    f"{path}: dimension {dim} does not match expected {expect_dimension}"
                )
            body = fh.read()
        dtype = np.dtype(
            [("seq", "<i8"), ("cutoff", "<i8"), ("weight", "<f8"), ("value", "<f8", (dim,))],
            align=False,
        )
        if len(body) != count * dtype.itemsize:
            raise RestoreError(f"{path}: body size does not match record count")
        rec = np.frombuffer(body, dtype=dtype)
        db = cls(n_max=max(int(n_max), 1), dimension=int(dim) if dim else None)
        db._target_index = int(target)
        if count:
            db.insert_batch(
                rec["value"].astype(float),
                rec["weight"].astype(float),
                rec["seq"].astype(np.int64),
                rec["cutoff"].astype(np.int64),
            )
        return db
