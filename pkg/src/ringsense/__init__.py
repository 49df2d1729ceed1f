"""Imageless concealed-object detection from rotating-interferometer ring samples."""

__version__ = "0.1.0"
