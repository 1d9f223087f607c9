"""Shared helpers for the test suite."""

import numpy as np

from modmi.ingestion import FeatureMatrix, LabelSequence


def seq(symbols, alphabet_size=None, rate=25.0, tag="") -> LabelSequence:
    symbols = np.asarray(symbols, dtype=np.int64)
    if alphabet_size is None:
        alphabet_size = int(symbols.max()) + 1
    return LabelSequence(symbols, alphabet_size, rate, tag)


def features(values, rate=25.0, tag="") -> FeatureMatrix:
    return FeatureMatrix(np.asarray(values, dtype=np.float32), rate, tag)


def random_streams(rng, n_streams, length, alphabet=4, correlated=True):
    """Aligned random label streams; optionally push them off independence."""
    base = rng.integers(0, alphabet, size=length)
    out = []
    for _ in range(n_streams):
        if correlated:
            noise = rng.integers(0, alphabet, size=length)
            mix = rng.random(length) < 0.5
            symbols = np.where(mix, base, noise)
        else:
            symbols = rng.integers(0, alphabet, size=length)
        out.append(seq(symbols, alphabet))
    return out
