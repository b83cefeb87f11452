"""
Utils package.
"""

