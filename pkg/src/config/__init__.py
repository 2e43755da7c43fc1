"""
Configuration package for the wave asymptotics toolkit
"""

from .settings import ConfigManager, load_config, DEFAULT_CONFIG

__all__ = ['ConfigManager', 'load_config', 'DEFAULT_CONFIG']
