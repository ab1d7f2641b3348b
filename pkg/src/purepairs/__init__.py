"""Pure pairs and transversal induced subgraphs in blockaded graphs."""

__version__ = "0.1.0"
