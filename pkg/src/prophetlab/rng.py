"""Counter-based random streams.

Every uniform is a pure function of ``(seed, trial, slot)``: trials can be
generated in any order, in any block size, on any thread, and the numbers
come out the same.  The mixing function is the SplitMix64 finalizer.
"""
from __future__ import annotations

import numpy as np

_MASK = (1 << 64) - 1
_GOLDEN = 0x9E3779B97F4A7C15
_SLOT_MUL = 0xD1B54A32D192ED03
_INV_2_53 = 1.0 / (1 << 53)


def _mix_int(z: int) -> int:
    z &= _MASK
    z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & _MASK
    z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & _MASK
    return z ^ (z >> 31)


def _mix_arr(z: np.ndarray) -> np.ndarray:
    z = z.astype(np.uint64, copy=True)
    z ^= z >> np.uint64(30)
    z *= np.uint64(0xBF58476D1CE4E5B9)
    z ^= z >> np.uint64(27)
    z *= np.uint64(0x94D049BB133111EB)
    z ^= z >> np.uint64(31)
    return z


def _trial_key_int(seed: int, trial: int) -> int:
    return _mix_int((_mix_int(seed * _GOLDEN + 1) + trial * _GOLDEN) & _MASK)


def uniform(seed: int, trial: int, slot: int) -> float:
    """One uniform in [0, 1) for the given counter triple."""
    key = _trial_key_int(seed, trial)
    x = _mix_int(key ^ ((slot + 1) * _SLOT_MUL & _MASK))
    return (x >> 11) * _INV_2_53


def uniforms(seed: int, trials: np.ndarray, slot: int) -> np.ndarray:
    """Vectorised :func:`uniform` over an array of trial indices."""
    trials = np.asarray(trials, dtype=np.uint64)
    base = np.uint64(_mix_int(seed * _GOLDEN + 1))
    with np.errstate(over="ignore"):
        key = _mix_arr(base + trials * np.uint64(_GOLDEN))
        x = _mix_arr(key ^ np.uint64((slot + 1) * _SLOT_MUL & _MASK))
    return (x >> np.uint64(11)).astype(np.float64) * _INV_2_53


class Stream:
    """Sequential view of one trial's counter space, starting at ``slot``."""

    def __init__(self, seed: int, trial: int, slot: int = 0):
        self.seed = seed
        self.trial = trial
        self.slot = slot

    def random(self) -> float:
        u = uniform(self.seed, self.trial, self.slot)
        self.slot += 1
        return u

    def choice_index(self, probs) -> int:
        """Index drawn from a finite probability vector."""
        u = self.random()
        acc = 0.0
        for i, p in enumerate(probs):
            acc += p
            if u < acc:
                return i
        return len(probs) - 1
