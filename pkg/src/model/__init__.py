"""
Model package for the wave asymptotics toolkit
Contains the forcing families and the complex ODE integrator
"""

from .forcing import ForcingSpec, ForcingKind, Single, Separated, Coalescing, eval_qs
from .ode import Trajectory, WaveMeasurement, integrate_phi, measure_wave

__all__ = ['ForcingSpec', 'ForcingKind', 'Single', 'Separated', 'Coalescing', 'eval_qs',
           'Trajectory', 'WaveMeasurement', 'integrate_phi', 'measure_wave']
