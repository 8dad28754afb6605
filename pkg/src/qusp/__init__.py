"""qusp: exact computations for quasi-uniform spaces.

Two layers share one package:

* a finite layer (``relcore``, ``quniform``, ``hyper``, ``metrize``) that
  decides hyperspace comparison questions exhaustively on bitset-encoded
  relations, with exact rational distances where metrics appear;
* a countable layer (``intervals``, ``ratcover``) working on rational
  interval sets inside (0, 1), which constructs well-monotone covers and
  emits machine-checkable certificates for their hyperspace properties.

The ``qusp`` command line (see ``qusp.cli``) runs scenario files and
exhaustive scans and emits deterministic JSON reports or DOT graphs.
"""

__version__ = "0.1.0"
