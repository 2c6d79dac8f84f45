"""Certify optimizer search paths and forge convex penalties that replay them.

The heavy lifting lives in the C++ extension; this wrapper trades its JSON-string
interface for plain dicts.
"""

import json as _json

from . import _core

ConfigError = _core.ConfigError
GroupingError = _core.GroupingError
BuildError = _core.BuildError
DomainError = _core.DomainError

__all__ = [
    "gradient_descent_path",
    "ingest_path",
    "check_path",
    "build_penalty",
    "verify_schedule",
    "eval_penalty",
    "render_scene",
    "ConfigError",
    "GroupingError",
    "BuildError",
    "DomainError",
]


def gradient_descent_path(loss, x0, step, iters):
    """Run gradient descent on a loss spec dict; returns a path dict."""
    return _json.loads(_core.gradient_descent_path(_json.dumps(loss), list(x0), step, iters))


def ingest_path(loss, points):
    """Wrap externally produced iterates into a path dict."""
    return _json.loads(_core.ingest_path(_json.dumps(loss), [list(p) for p in points]))


def check_path(path, group_tol=0.0):
    """Admissibility report dict for a path dict."""
    return _json.loads(_core.check_path(_json.dumps(path), group_tol))


def build_penalty(path, group_tol=0.0):
    """Penalty model + lambda schedule dict for an admissible path dict."""
    return _json.loads(_core.build_penalty(_json.dumps(path), group_tol))


def verify_schedule(path, penalty, tol=1e-2, seed=0):
    """Replay every path point through the derivative-free oracle."""
    return _json.loads(
        _core.verify_schedule(_json.dumps(path), _json.dumps(penalty), tol, seed)
    )


def eval_penalty(penalty, point):
    """Evaluate the penalty surface at a 2-d point."""
    x, y = point
    return _core.eval_penalty(_json.dumps(penalty), float(x), float(y))


def render_scene(path, penalty):
    """Deterministic SVG string for the path + penalty scene."""
    return _core.render_scene(_json.dumps(path), _json.dumps(penalty))
