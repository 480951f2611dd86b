"""
Scan throughput benchmarks (pytest-benchmark).
"""
