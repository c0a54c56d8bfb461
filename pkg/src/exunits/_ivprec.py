from contextlib import contextmanager

from mpmath import iv


@contextmanager
def ivprec(bits: int):
    """Temporarily set the working precision of mpmath's interval context."""
    old = iv.prec
    iv.prec = bits
    try:
        yield
    finally:
        iv.prec = old


def bounds(x):
    """Exact (lo, hi) endpoints of an mpmath interval as mp numbers."""
    from mpmath import mp

    lo, hi = x._mpi_
    return mp.make_mpf(lo), mp.make_mpf(hi)
