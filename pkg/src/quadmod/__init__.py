"""Conformal moduli of polygonal quadrilaterals."""
