"""
IO module - artifact persistence
"""

from .artifacts import (
    read_control,
    read_json,
    read_measure_csv,
    read_plan_csv,
    read_table,
    write_control,
    write_json,
    write_measure_csv,
    write_plan_csv,
    write_table,
)

__all__ = [
    "read_control",
    "read_json",
    "read_measure_csv",
    "read_plan_csv",
    "read_table",
    "write_control",
    "write_json",
    "write_measure_csv",
    "write_plan_csv",
    "write_table",
]
