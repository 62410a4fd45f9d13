"""Interpoint-distance cluster validity: R_clus, baseline indices,
clustering algorithms, simulation generators and a sweep CLI."""

from .baselines import calinski_harabasz, connectivity, dunn, nncer, silhouette_asw
from .clustering import DbscanConfig, KMeansConfig, dbscan, hierarchical, kmeans
from .core import NOISE, DataMatrix, Labeling, distance_for, euclidean_distances, register_metric
from .index import BinGrid, member_table, nearest_cluster, r_clus
from .report import RunManifest, emit_report, run_sweep

__version__ = "0.1.0"

__all__ = [
    "NOISE",
    "BinGrid",
    "DataMatrix",
    "DbscanConfig",
    "KMeansConfig",
    "Labeling",
    "RunManifest",
    "calinski_harabasz",
    "connectivity",
    "dbscan",
    "distance_for",
    "dunn",
    "emit_report",
    "euclidean_distances",
    "hierarchical",
    "kmeans",
    "member_table",
    "nearest_cluster",
    "nncer",
    "r_clus",
    "register_metric",
    "run_sweep",
    "silhouette_asw",
]
