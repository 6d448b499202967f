"""Zero loci of polynomial sequences generated by 1/(P(t) + z t^r)."""

__version__ = "0.1.0"
