"""
Analysis, allocation and simulation engines.
"""
