"""Bundled real data."""

from __future__ import annotations

from importlib import resources

from .core import DataMatrix, read_csv

DATASETS = {
    # 47 stars of the CYG OB1 association: log surface temperature and
    # log light intensity (Vanisma & Greve 1972; Rousseeuw & Leroy 1987).
    "cyg-ob1": "cyg_ob1.csv",
}


def dataset_path(name: str):
    try:
        fname = DATASETS[name]
    except KeyError:
        raise ValueError(f"unknown dataset {name!r}; available: {', '.join(sorted(DATASETS))}") from None
    return resources.files("rclus") / "data" / fname


def load(name: str) -> tuple[DataMatrix, list[str]]:
    with resources.as_file(dataset_path(name)) as p:
        return read_csv(p)


def load_cyg_ob1() -> DataMatrix:
    return load("cyg-ob1")[0]
