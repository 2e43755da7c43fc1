"""
Harness package for the wave asymptotics toolkit
Contains figure sweeps, the acceptance suite, reference recurrences and the command-line interface
"""

from .sweep import Experiment, SweepConfig, SweepRow, run_sweep, run_stokes_map
from .acceptance import AcceptanceSuite, CheckResult, CheckStatus, run_acceptance

__all__ = ['Experiment', 'SweepConfig', 'SweepRow', 'run_sweep', 'run_stokes_map',
           'AcceptanceSuite', 'CheckResult', 'CheckStatus', 'run_acceptance']
