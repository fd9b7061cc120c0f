"""Command-line frontend, document schemas and exporters"""
from .schemas import LayerDocument, ProfileDocument, dump_profile, load_profile, parse_profile

__all__ = [
    'LayerDocument',
    'ProfileDocument',
    'dump_profile',
    'load_profile',
    'parse_profile',
]
