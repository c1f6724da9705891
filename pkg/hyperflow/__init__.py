"""hyperflow: hyperdistribution semantics, leakage measures and secure refinement for probabilistic programs."""

__version__ = "0.1.0"
