"""Bundled synthetic scenarios (session JSON plus surface CSVs)."""

from importlib.resources import files
from pathlib import Path

NAMES = ("s1_wb", "s1_ahf", "s2_wb", "s2_ahf", "s3_wb", "s3_ahf")


def path(name: str) -> Path:
    """Filesystem path of the bundled session ``name``."""
    if name not in NAMES:
        raise KeyError(f"unknown scenario {name!r}; choose from {', '.join(NAMES)}")
    return Path(str(files(__name__) / f"{name}.json"))
