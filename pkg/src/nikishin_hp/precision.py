"""Working-precision context shared by every numeric kernel in the package.

All scalars are mpmath floats; the binary working precision P is a property of
the ambient mpmath context, set once per computation and read by every
operation.  Solver noise thresholds are expressed as fixed fractions of P
(2^-P/2 separates signal from roundoff, 2^-P/3 and 2^-P/4 are the looser
gates used where error accumulates through products and root finding).
"""

from __future__ import annotations

from contextlib import contextmanager

from mpmath import mp, mpf

DEFAULT_PRECISION_BITS = 256
MIN_PRECISION_BITS = 64
MAX_PRECISION_BITS = 4096


def set_precision(bits: int) -> int:
    """Set the ambient working precision (bits, >= 64). Returns the value set."""
    bits = int(bits)
    if bits < MIN_PRECISION_BITS:
        raise ValueError(f"working precision must be >= {MIN_PRECISION_BITS} bits, got {bits}")
    mp.prec = bits
    return bits


@contextmanager
def working_precision(bits: int):
    """Temporarily run at a different working precision."""
    if bits < MIN_PRECISION_BITS:
        raise ValueError(f"working precision must be >= {MIN_PRECISION_BITS} bits, got {bits}")
    old = mp.prec
    mp.prec = int(bits)
    try:
        yield mp
    finally:
        mp.prec = old


def noise_floor(fraction: float = 0.5) -> mpf:
    """2^-(P*fraction) at the ambient precision P.

    fraction 0.5 is the default "numerically zero" gate; 1/3 and 1/4 are the
    progressively looser gates for product identities and junction spacing.
    """
    return mpf(2) ** (-int(mp.prec * fraction))
