"""
Data models: topologies, allocations, flow solutions, simulation records.
"""
