"""Caregiver-assisted yes/no word communication toolkit."""

__version__ = "0.1.0"
