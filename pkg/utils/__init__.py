"""
Utility functions for the cyclotomic / SLV toolkit
"""
