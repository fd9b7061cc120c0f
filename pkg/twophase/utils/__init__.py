"""Utilities package"""
from .config import Settings, get_settings, load_config, reset_settings, use_config
from .helpers import format_number, get_timestamp_string, parse_number_list
from .logging_config import LogContext, log_performance, setup_logging

__all__ = [
    'Settings',
    'get_settings',
    'load_config',
    'reset_settings',
    'use_config',
    'format_number',
    'get_timestamp_string',
    'parse_number_list',
    'LogContext',
    'log_performance',
    'setup_logging',
]
