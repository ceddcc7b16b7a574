"""hlab: exact desk-scale verification of hereditary-property measures,
entropy constants, partial Steiner systems, and supersaturation bounds
for random r-uniform hypergraphs."""

__version__ = "0.1.0"
