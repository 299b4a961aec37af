"""Frequency unit handling.

Everything inside the package is an angular frequency in rad/s.  Configuration
files and CLI flags quote frequencies in Hz/kHz/MHz, by default in the
cycles-per-second sense (so a quoted value f means 2*pi*f rad/s).  Setting the
convention flag ``two_pi=False`` declares the quoted numbers to be angular
frequencies already.
"""

import math

_SCALE = {"Hz": 1.0, "kHz": 1e3, "MHz": 1e6}


def to_angular(value, unit="kHz", two_pi=True):
    """Convert a quoted frequency (scalar or array) to rad/s."""
    try:
        scale = _SCALE[unit]
    except KeyError:
        raise ValueError(f"unknown frequency unit {unit!r}; use Hz, kHz or MHz")
    factor = scale * (2.0 * math.pi if two_pi else 1.0)
    return value * factor


def from_angular(value, unit="kHz", two_pi=True):
    """Convert rad/s back to the quoted convention."""
    try:
        scale = _SCALE[unit]
    except KeyError:
        raise ValueError(f"unknown frequency unit {unit!r}; use Hz, kHz or MHz")
    factor = scale * (2.0 * math.pi if two_pi else 1.0)
    return value / factor


def khz(value):
    """Shorthand for the package-default convention: 2*pi x value kHz."""
    return to_angular(value, "kHz", True)


def mhz(value):
    """Shorthand for 2*pi x value MHz."""
    return to_angular(value, "MHz", True)
