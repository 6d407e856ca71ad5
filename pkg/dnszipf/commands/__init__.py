"""One module per command; each exposes register(subparsers) and run(args) -> exit code."""

import math

EXIT_OK = 0
EXIT_DETECTED = 1
EXIT_USAGE = 2
EXIT_DATA = 3


def fmt(value: float) -> str:
    return "nan" if math.isnan(value) else f"{value:.6f}"
