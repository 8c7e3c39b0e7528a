""" Robust appointment slot template design

    Slot durations for groups of patient types, chosen against the worst
    case over moment and mode probability ambiguity.
"""

__version__ = '0.1.0'
