"""
Colored terminal strings for the command line and the test runner.

Colors are turned off when NO_COLOR is set or stderr is not a terminal,
so redirected output stays plain.
"""

import os
import sys

_CODES = {
    "green": "\033[92m",
    "yellow": "\033[93m",
    "red": "\033[91m",
    "bold": "\033[1m",
}
_RESET = "\033[0m"


def colors_enabled():
    return not os.environ.get("NO_COLOR") and sys.stderr.isatty()


def paint(color, content):
    """`content` wrapped in the ANSI code of `color` (one of green, yellow, red, bold)."""
    if color not in _CODES:
        raise ValueError("Unknown color %s" % color)
    if not colors_enabled():
        return content
    return _CODES[color] + content + _RESET


def warning(content):
    return paint("yellow", content)


def error(content):
    return paint("red", content)


def success(content):
    return paint("green", content)


def bold(content):
    return paint("bold", content)


def verdict(ok, passed="PASS", failed="FAIL"):
    """Colored PASS/FAIL tag."""
    return success(passed) if ok else error(failed)
