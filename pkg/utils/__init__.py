"""
Serialization, console output, result storage and seeding helpers.
"""
