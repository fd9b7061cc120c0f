"""
Helper utility functions
"""
import math
from datetime import datetime, timezone
from typing import List, Optional


SIGNIFICANT_DIGITS = 15


def format_number(value: Optional[float], digits: int = SIGNIFICANT_DIGITS) -> str:
    """
    Format a number with a fixed count of significant digits

    Args:
        value: Number to format (None and NaN render as empty/"nan")
        digits: Significant digits

    Returns:
        Locale-independent string with '.' as decimal separator
    """
    if value is None:
        return ""
    if isinstance(value, bool):
        return str(value).lower()
    if isinstance(value, int):
        return str(value)
    if math.isnan(value):
        return "nan"
    return f"{value:.{digits}g}"


def parse_number_list(text: str, cast=float) -> List:
    """
    Parse a comma separated list such as "2,3,4"

    Args:
        text: Comma separated values
        cast: Conversion applied to every item

    Returns:
        List of converted values
    """
    items = [item.strip() for item in text.split(",") if item.strip()]
    if not items:
        raise ValueError("empty list")
    return [cast(item) for item in items]


def get_timestamp_string(dt: datetime = None, format: str = "%Y-%m-%dT%H:%M:%SZ") -> str:
    """
    Get formatted UTC timestamp string

    Args:
        dt: Datetime object (default: current time)
        format: String format

    Returns:
        Formatted timestamp string
    """
    if dt is None:
        dt = datetime.now(timezone.utc)
    return dt.strftime(format)
