"""Single-qubit quantum circuit learning for volatility time series."""

__version__ = "0.1.0"
