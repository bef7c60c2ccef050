"""Numerical helpers shared by the services: extrapolation, quadrature and root brackets."""
