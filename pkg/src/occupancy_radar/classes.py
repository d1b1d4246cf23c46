"""The eight row-occupancy classes."""
from __future__ import annotations

import enum


class OccupancyClass(enum.IntEnum):
    NoOne = 0
    Row1 = 1
    Row2 = 2
    Row3 = 3
    Row12 = 4
    Row13 = 5
    Row23 = 6
    Row123 = 7

    @property
    def rows(self) -> tuple:
        """1-based indices of occupied rows."""
        return _ROWS[self]

    @classmethod
    def parse(cls, value) -> "OccupancyClass":
        if isinstance(value, OccupancyClass):
            return value
        if isinstance(value, str):
            try:
                return cls[value]
            except KeyError:
                raise ValueError(f"unknown occupancy class {value!r}") from None
        try:
            return cls(int(value))
        except (ValueError, TypeError):
            raise ValueError(f"unknown occupancy class {value!r}") from None


_ROWS = {
    OccupancyClass.NoOne: (),
    OccupancyClass.Row1: (1,),
    OccupancyClass.Row2: (2,),
    OccupancyClass.Row3: (3,),
    OccupancyClass.Row12: (1, 2),
    OccupancyClass.Row13: (1, 3),
    OccupancyClass.Row23: (2, 3),
    OccupancyClass.Row123: (1, 2, 3),
}

N_CLASSES = len(OccupancyClass)
CLASS_NAMES = [c.name for c in OccupancyClass]
