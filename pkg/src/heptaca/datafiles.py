"""Location of the shipped data files (``HCA_DATA_DIR`` overrides)."""
from __future__ import annotations

import os
from pathlib import Path

PACKAGE_DATA = Path(__file__).resolve().parent / "data"


def data_dir() -> Path:
    env = os.environ.get("HCA_DATA_DIR")
    return Path(env) if env else PACKAGE_DATA


def table_path() -> Path:
    return data_dir() / "table.txt"


def gadget_path(name: str) -> Path:
    p = Path(name)
    if p.suffix == ".gadget" and p.exists():
        return p
    return data_dir() / "gadgets" / f"{name}.gadget"


def errata_path() -> Path:
    return data_dir() / "errata.tsv"


def supplement_path() -> Path:
    return data_dir() / "supplement.txt"
