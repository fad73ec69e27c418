"""Partition reductions, heavy parts and secretary experiments on the complete binary matroid B_d."""

__version__ = "0.1.0"
