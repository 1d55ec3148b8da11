"""Linear-time branching-time spectroscopy via energy games."""
from .energy import INF, MinOf, apply_update, complement_antichain, invert_update
from .hml import SPECTRUM, Conj, Neg, Observe, T, evaluate, expr_price, lookup, render
from .lts import Lts, bisim_quotient, parse_aut, read_aut, saturate_weak, write_aut
from .spectroscopy import SystemSpectrum, spectroscope, strategy_formula

__version__ = "0.1.0"
