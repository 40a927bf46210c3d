"""olisteer: interactive weighted-MDS steering engine.

Projects high-dimensional feature vectors to a 2D workspace and learns
per-feature distance weights from observation-level drag interactions,
with an HTTP service, a simulated-analyst benchmark harness, and
feature-file tooling.
"""

__version__ = "0.1.0"
