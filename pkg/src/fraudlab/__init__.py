"""Download-fraud detection laboratory."""
from importlib.metadata import PackageNotFoundError, version

try:
    __version__ = version("fraudlab")
except PackageNotFoundError:  # pragma: no cover
    # package is not installed
    __version__ = "unknown"
