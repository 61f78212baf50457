"""Power allocation games on parallel multiple-access channels: equilibria, structure and dynamics."""

__version__ = "0.1.0"
