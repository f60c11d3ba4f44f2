"""Symbolic Morales-Ramis pipeline: Hamiltonian -> invariant plane -> variational equations -> Galois verdict."""

__version__ = "0.1.0"
