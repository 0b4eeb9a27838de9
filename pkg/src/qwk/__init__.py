"""Exact verification kernel for quantization maps of quadratic Lie algebras."""

__version__ = "0.1.0"
