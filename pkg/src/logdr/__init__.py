"""Exact computation of logarithmic double ramification cycles."""
