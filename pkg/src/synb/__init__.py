"""synb: procedural low-resolution symbol-image dataset generator."""

__version__ = "0.1.0"
