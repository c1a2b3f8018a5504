"""Bitmask subsets of a fixed ground set.

A subset of {0, .., n-1} is a plain int: bit i is set iff element i is in.
The unsigned integer value doubles as the global tie-break order: wherever
an argmax must be unique, the smaller mask wins among equal-valued sets.
"""

WORD_CAPACITY = 64


def full_mask(n):
    return (1 << n) - 1


def bit(i):
    return 1 << i


def popcount(mask):
    return mask.bit_count()


def iter_elements(mask):
    """Yield set element indices in ascending order."""
    while mask:
        low = mask & -mask
        yield low.bit_length() - 1
        mask ^= low


def elements(mask):
    return list(iter_elements(mask))


def from_elements(indices):
    mask = 0
    for i in indices:
        mask |= 1 << i
    return mask


def iter_submasks(mask):
    """Yield all submasks of mask (descending integer order), ending with 0."""
    sub = mask
    while True:
        yield sub
        if sub == 0:
            return
        sub = (sub - 1) & mask


def subset_str(mask):
    """Human-readable form with 1-based element indices, e.g. '{1,3}'."""
    return "{" + ",".join(str(i + 1) for i in iter_elements(mask)) + "}"


def better(value_a, set_a, value_b, set_b):
    """Strict comparison in the global total order.

    (value_a, set_a) beats (value_b, set_b) iff its value is larger, or the
    values are equal and set_a has the smaller mask. Equal pairs never beat
    each other, so incumbents are stable.
    """
    return value_a > value_b or (value_a == value_b and set_a < set_b)
