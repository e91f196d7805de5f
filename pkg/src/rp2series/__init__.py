"""Group-theoretic computations on braid groups of the real projective plane."""

__version__ = "0.1.0"
