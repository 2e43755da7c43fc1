"""
Asymptotics package for the wave asymptotics toolkit
Contains singulants and Stokes lines, inner recurrences, and amplitude predictions
"""

from .singulant import StokesPath, chi_numeric, chi_merged, trace_stokes_line
from .recurrence import CoeffSeq, DivergenceFit, omega_separated, omega_cc, fit_divergence
from .amplitude import AmplitudePrediction, amp_single, amp_separated, amp_coalescing

__all__ = ['StokesPath', 'chi_numeric', 'chi_merged', 'trace_stokes_line',
           'CoeffSeq', 'DivergenceFit', 'omega_separated', 'omega_cc', 'fit_divergence',
           'AmplitudePrediction', 'amp_single', 'amp_separated', 'amp_coalescing']
