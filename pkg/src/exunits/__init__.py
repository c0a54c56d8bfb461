"""Exceptional units in cyclic fields of prime degree.

Modules: arith (integers), polyring (polynomials, resultants), sieve
(candidate conductors), cyclofield (Gaussian period fields), units
(cyclotomic units, regulators, saturation), lattice (LLL), solver (the
unit equation) and cli.
"""

__version__ = "0.1.0"
