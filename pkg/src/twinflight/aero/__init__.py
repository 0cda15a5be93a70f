"""Aerodynamic database: gridded tables, coefficient buildup, disk format."""

from .database import (
    COEFFICIENTS,
    AeroDatabase,
    CoefficientSet,
    CoefficientTables,
    FlightCondition,
    LookupFlags,
    coefficient_buildup,
    coefficients_to_forces,
)
from .io import DatabaseFormatError, load_database, save_database
from .tables import AeroTable, interpolate, interpolate_with_flag, table_from_function

__all__ = [
    "COEFFICIENTS",
    "AeroDatabase",
    "AeroTable",
    "CoefficientSet",
    "CoefficientTables",
    "DatabaseFormatError",
    "FlightCondition",
    "LookupFlags",
    "coefficient_buildup",
    "coefficients_to_forces",
    "interpolate",
    "interpolate_with_flag",
    "load_database",
    "save_database",
    "table_from_function",
]
