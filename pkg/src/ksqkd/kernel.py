"""Kernel selection and integer-table construction for the round loop.

At import time the compiled Cython kernel is preferred; the pure-Python
twin in ``_kernel_py`` is the fallback.  Setting ``KSQKD_PURE_PYTHON=1``
in the environment forces the fallback, which is how the benchmark and
the equivalence tests exercise both paths.
"""

from __future__ import annotations

import os
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from . import _kernel_py
from .ksset import KSSet, SymbolAssignment, exact_basis_probs

if os.environ.get("KSQKD_PURE_PYTHON") == "1":
    _impl = _kernel_py
else:
    try:
        from . import _kernel as _impl  # type: ignore[attr-defined]
    except ImportError:
        _impl = _kernel_py

BACKEND = _impl.BACKEND

ADVERSARY_CODES = {"none": 0, "ball": 1, "intercept_resend": 2}
NOISE_CODES = {"none": 0, "depolarizing": 1}

# Common denominator of every Born probability among KS18 rays/bases.
PROB_DENOM = 16


@dataclass(frozen=True)
class KernelTables:
    """Integer lookup tables driving the round loop."""

    pos_table: np.ndarray   # int32[nv, nb], -1 when vector not in basis
    cum_table: np.ndarray   # int32[nv, nb, 4], cumulative numerators / 16
    members: np.ndarray     # int32[nb, 4]
    labels: tuple[str, ...]


def build_tables(ks: KSSet) -> KernelTables:
    """Precompute exact positions and cumulative Born numerators.

    Requires every in-set Born probability to be a multiple of 1/16,
    which holds for the builtin set (amplitudes in {-1, 0, 1}).
    """
    nv, nb = len(ks.vectors), len(ks.bases)
    pos = np.full((nv, nb), -1, dtype=np.int32)
    cum = np.zeros((nv, nb, 4), dtype=np.int32)
    members = np.zeros((nb, 4), dtype=np.int32)
    for bi, b in enumerate(ks.bases):
        members[bi] = b.members
        for p, vid in enumerate(b.members):
            pos[vid, bi] = p
    for v in ks.vectors:
        for bi, b in enumerate(ks.bases):
            probs = exact_basis_probs(ks, v.id, b.label)
            acc = Fraction(0)
            for k, pk in enumerate(probs):
                acc += pk
                num = acc * PROB_DENOM
                if num.denominator != 1:
                    raise ValueError(
                        f"probability {pk} of vector {v.id} in basis {b.label} "
                        f"is not a multiple of 1/{PROB_DENOM}"
                    )
                cum[v.id, bi, k] = int(num)
    return KernelTables(pos, cum, members, tuple(b.label for b in ks.bases))


def assignment_table(ks: KSSet, assignment: SymbolAssignment | None) -> np.ndarray:
    table = np.zeros((len(ks.bases), 4), dtype=np.int32)
    if assignment is not None:
        for bi, b in enumerate(ks.bases):
            table[bi] = assignment.symbols[b.label]
    return table


def run_rounds_kernel(*args, backend: str | None = None):
    """Dispatch to the selected kernel; `backend` overrides for benchmarks."""
    if backend is None:
        return _impl.run_rounds_kernel(*args)
    if backend == "python":
        return _kernel_py.run_rounds_kernel(*args)
    if backend == "cython":
        from . import _kernel  # raises ImportError if not built
        return _kernel.run_rounds_kernel(*args)
    raise ValueError(f"unknown kernel backend {backend!r}")
