"""
Polarization-domain physical-layer encryption simulator.
"""

__version__ = "1.0.0"
