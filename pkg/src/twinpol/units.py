"""Unit constants and conversions.

Everything internal is in Hartree atomic units; these constants exist only
for I/O (config files, CSV mirrors, thermal weights).
"""

CM1_PER_HARTREE = 219474.6313632
KB_HARTREE_PER_K = 3.166811563e-6


def cm1_to_au(x):
    return x / CM1_PER_HARTREE


def au_to_cm1(x):
    return x * CM1_PER_HARTREE
