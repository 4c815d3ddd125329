"""Query evaluation over data graphs: REMs, register logic, walk logic."""

__version__ = "0.1.0"
