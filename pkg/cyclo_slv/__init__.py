"""
Exact cyclotomic divisibility, lower bounds, SLV sets and Favard length estimates
"""

__version__ = "1.0.0"
