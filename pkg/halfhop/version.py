"""
Package version information

Must comply with PEP440.
"""
VERSION = '0.1.0'
