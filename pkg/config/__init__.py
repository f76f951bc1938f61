"""
Settings, parameter profiles and experiment configuration.
"""
