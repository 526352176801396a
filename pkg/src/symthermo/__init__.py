"""Numerical geometry of thermodynamic systems.

Equations of state as constraints on a symplectic phase space, their
contact and symplectized descriptions, the scaling symmetry and the
quasi-static flows it admits.
"""
__version__ = "0.1.0"
