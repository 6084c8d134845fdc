"""Conditional gradient solver for infinite infimal convolutions of
Fourier-weight seminorms on the periodic torus."""

from .kernels import BACKEND

__version__ = "0.1.0"
