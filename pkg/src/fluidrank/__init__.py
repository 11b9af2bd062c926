"""Fluidic-logic simulation, valve-netlist compilation, and information-theoretic
ranking of reconfigurable pneumatic haptic displays."""

__version__ = "0.1.0"
