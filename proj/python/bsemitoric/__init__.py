"""Python front end to the bsemitoric core.

Geometry and evaluation calls map one-to-one onto the native module. Reports
(classification, t-sweeps, verification) arrive as JSON from the core and are
returned here as plain dictionaries.
"""

import json
import sys

from . import _core
from ._core import (
    Error,
    System,
    integrate,
    period_check,
    probe_preimage,
    reversed_boundary,
    sample_image,
    scan_rank1,
    t_critical,
    to_chart,
)

__version__ = _core.__version__

SYSTEMS = ("cso", "bcso", "bcsorev", "cam", "cam1", "cam2", "cam3", "cambroken")


def classify(system, grid_scan=True, grid=32):
    """Fixed points of ``system`` with their Williamson types."""
    return json.loads(_core._classify(system, grid_scan, grid))


def tsweep(name, R1=1.0, R2=2.0, steps=101):
    """Type table of the four double poles against t, plus transition values."""
    return json.loads(_core._tsweep(name, R1, R2, steps))


def verify(system, seed=20240521, points=1000):
    """Involution, gradient, Hessian, overlap and Z-rank suites."""
    return json.loads(_core._verify(system, seed, points))


def coverage(image):
    """Coverage summary of a :func:`sample_image` result."""
    return json.loads(image["coverage"])


def run(args):
    """Runs the command-line interface in-process; returns (code, stdout, stderr)."""
    return _core._run([str(a) for a in args])


def main():
    code, out, err = run(sys.argv[1:])
    sys.stdout.write(out)
    sys.stderr.write(err)
    return code


__all__ = [
    "Error",
    "SYSTEMS",
    "System",
    "classify",
    "coverage",
    "integrate",
    "main",
    "period_check",
    "probe_preimage",
    "reversed_boundary",
    "run",
    "sample_image",
    "scan_rank1",
    "t_critical",
    "to_chart",
    "tsweep",
    "verify",
]
