"""Stochastic recurrent networks: training, evaluation and generation.

Model methods work in model space; real-valued data written by ``train`` is
standardized with the statistics in ``Model.standardization``.
"""

from ._core import Model, NumericalError, ParseError, run, synth_coupled, synth_sines

__all__ = ["Model", "NumericalError", "ParseError", "run", "synth_coupled", "synth_sines"]
__version__ = "0.1.0"
