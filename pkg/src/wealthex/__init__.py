"""Conservative wealth-exchange simulations on fully connected and random networks."""

__version__ = "0.1.0"
