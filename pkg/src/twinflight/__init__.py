"""Digital-twin simulator for a tilting-rotor eVTOL testbed."""

__version__ = "0.1.0"
