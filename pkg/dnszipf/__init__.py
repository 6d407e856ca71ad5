"""Character-frequency DNS tunnel detection."""

__version__ = "1.0.0"
