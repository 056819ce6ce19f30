"""Exact cluster algebra computations and freezing operators."""

from .errors import *  # noqa: F401,F403
from .ring import LaurentElement, VCoeff, parse, render, twisted_mul
from .seed import Seed, catalog, freeze_seed, get_seed, mutate_seed, mutate_word

__version__ = "0.1.0"
