"""Reading sets and writing reports."""

import json
import os
import tempfile
from datetime import datetime, timezone
from fractions import Fraction

from . import __version__
from .addcomb import ResidueSet

DEFAULT_SEED = 0xB0D1


def read_set(path):
    """Read a ResidueSet from a JSON array or newline-delimited integers.

    In both layouts the first value is the modulus.
    """
    with open(path) as fh:
        text = fh.read()
    return parse_set(text)


def parse_set(text):
    stripped = text.strip()
    if stripped.startswith("["):
        vals = json.loads(stripped)
    else:
        vals = [int(line) for line in stripped.splitlines() if line.strip() and not line.lstrip().startswith("#")]
    if not vals:
        raise ValueError("set file is empty")
    n, *els = (int(v) for v in vals)
    return ResidueSet(n, tuple(els))


def format_set(A, as_json=False):
    vals = [A.modulus, *A.elements]
    if as_json:
        return json.dumps(vals)
    return "\n".join(str(v) for v in vals) + "\n"


def write_atomic(path, text):
    """Write via a temporary file in the same directory, then rename."""
    directory = os.path.dirname(os.path.abspath(path))
    fd, tmp = tempfile.mkstemp(dir=directory, prefix=".tmp-", suffix=os.path.basename(path))
    try:
        with os.fdopen(fd, "w", newline="") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def _default(o):
    if isinstance(o, Fraction):
        return f"{o.numerator}/{o.denominator}"
    if hasattr(o, "tolist"):
        return o.tolist()
    if isinstance(o, complex):
        return [o.real, o.imag]
    if isinstance(o, (set, frozenset, tuple)):
        return list(o)
    raise TypeError(f"not JSON serializable: {type(o).__name__}")


def envelope(command, config, seed, result, started, elapsed):
    """Wrap a result with the tool version, config echo, seed and timing.

    Everything outside ``timing`` is a deterministic function of the config.
    """
    return {
        "tool": "chirprip",
        "version": __version__,
        "command": command,
        "config": config,
        "seed": seed,
        "result": result,
        "timing": {
            "started": datetime.fromtimestamp(started, timezone.utc).isoformat(),
            "wall_seconds": round(elapsed, 6),
        },
    }


def dumps(obj):
    return json.dumps(obj, indent=2, sort_keys=True, default=_default) + "\n"
