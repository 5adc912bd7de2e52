"""
Exact first cohomology and its locally trivial part for subgroups of
GL_2(Z/p^n), n in {1, 2}, with a harness that checks statements about them
over sampled families of groups.
"""
__version__ = "0.1.0"
