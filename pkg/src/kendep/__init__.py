"""Joint dependence measurement with the area under the Kendall curve."""

__version__ = "0.1.0"
