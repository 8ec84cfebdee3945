# =============================================================================
# FILE: config/__init__.py
# PURPOSE: Expose the settings module and the one-time logging setup
# =============================================================================
#
# Library modules only ever do:
#
#   from config import settings
#
# The command line entry point additionally calls configure_logging() once,
# before anything logs. Library code never configures logging itself.
#
# =============================================================================

import logging.config

from . import settings


def configure_logging(level=None):
    """Apply settings.LOGGING, optionally overriding the root level."""
    conf = dict(settings.LOGGING)
    if level:
        conf['root'] = {**conf['root'], 'level': level.upper()}
    logging.config.dictConfig(conf)


__all__ = ('settings', 'configure_logging')
