"""Exact cardinal arithmetic on {0, 1, 2, ...} together with omega (aleph_0)."""

from __future__ import annotations

from functools import total_ordering
from typing import Union

__all__ = ["ExtNat", "OMEGA", "ext"]


@total_ordering
class ExtNat:
    """A nonnegative integer or ``OMEGA``.

    Instances are immutable and interoperate with plain ``int`` operands:

    >>> ExtNat(2) + 3
    ExtNat(5)
    >>> OMEGA - 1
    OMEGA
    >>> 0 * OMEGA
    ExtNat(0)
    """

    __slots__ = ("_v",)

    def __init__(self, value: Union[int, "ExtNat", str, None]):
        if isinstance(value, ExtNat):
            v = value._v
        elif value is None or (isinstance(value, str) and value.lower() in ("omega", "ω", "w")):
            v = None
        elif isinstance(value, bool):
            raise TypeError("bool is not a cardinal")
        elif isinstance(value, int):
            if value < 0:
                raise ValueError(f"negative cardinal: {value}")
            v = value
        elif isinstance(value, str) and value.isdigit():
            v = int(value)
        else:
            raise TypeError(f"cannot build ExtNat from {value!r}")
        object.__setattr__(self, "_v", v)

    def __setattr__(self, name, value):
        raise AttributeError("ExtNat is immutable")

    @property
    def is_finite(self) -> bool:
        return self._v is not None

    @property
    def is_omega(self) -> bool:
        return self._v is None

    @property
    def value(self) -> int | None:
        """The integer value, or ``None`` for omega."""
        return self._v

    def __int__(self) -> int:
        if self._v is None:
            raise ValueError("omega has no integer value")
        return self._v

    def substitute(self, cap: int) -> int:
        """Integer value with omega replaced by ``cap``."""
        return cap if self._v is None else self._v

    def __add__(self, other):
        o = _coerce(other)
        if o is None:
            return NotImplemented
        if self._v is None or o._v is None:
            return OMEGA
        return ExtNat(self._v + o._v)

    __radd__ = __add__

    def __mul__(self, other):
        o = _coerce(other)
        if o is None:
            return NotImplemented
        if self._v == 0 or o._v == 0:
            return ExtNat(0)
        if self._v is None or o._v is None:
            return OMEGA
        return ExtNat(self._v * o._v)

    __rmul__ = __mul__

    def __sub__(self, other):
        o = _coerce(other)
        if o is None:
            return NotImplemented
        if o._v is None:
            raise ValueError("subtraction of omega is undefined")
        if self._v is None:
            return OMEGA
        if o._v > self._v:
            raise ValueError(f"{self} - {o} is negative")
        return ExtNat(self._v - o._v)

    def __eq__(self, other):
        o = _coerce(other)
        if o is None:
            return NotImplemented
        return self._v == o._v

    def __lt__(self, other):
        o = _coerce(other)
        if o is None:
            return NotImplemented
        if self._v is None:
            return False
        if o._v is None:
            return True
        return self._v < o._v

    def __hash__(self):
        return hash(self._v) if self._v is not None else hash("omega")

    def sort_key(self) -> tuple[int, int]:
        return (1, 0) if self._v is None else (0, self._v)

    def __repr__(self):
        return "OMEGA" if self._v is None else f"ExtNat({self._v})"

    def __str__(self):
        return "omega" if self._v is None else str(self._v)

    def to_json(self) -> int | str:
        return "omega" if self._v is None else self._v


def _coerce(x) -> ExtNat | None:
    if isinstance(x, ExtNat):
        return x
    if isinstance(x, int) and not isinstance(x, bool):
        return ExtNat(x)
    return None


OMEGA = ExtNat(None)


def ext(x) -> ExtNat:
    """Coerce an int, ``"omega"`` or ``ExtNat`` to ``ExtNat``."""
    return x if isinstance(x, ExtNat) else ExtNat(x)
