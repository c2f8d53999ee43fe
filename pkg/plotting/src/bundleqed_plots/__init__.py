"""Figure rendering for bundleqed CSV/JSON outputs (no physics recomputation)."""

__version__ = "0.1.0"

from .figures import plot_bars, plot_landscape, plot_ratio_curve, plot_wigner
from .io import SchemaError, read_steady_json, read_table, read_wigner_csv

__all__ = ["plot_bars", "plot_landscape", "plot_ratio_curve", "plot_wigner",
           "SchemaError", "read_steady_json", "read_table", "read_wigner_csv"]
