"""Self-dual FK(q) planar maps, burger words, and the loop-O(n) partition function."""

__version__ = "0.1.0"
