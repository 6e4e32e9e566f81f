"""Bundled audit configurations.

Each JSON file is a ready-to-run ``vofrac audit`` config:

* ``exact_bank.json`` -- the exact two-point theorems over mixed
  constant/variable orders (includes the hand-checkable anchors).
* ``reconciliation_bank.json`` -- product rules I-IV with mixed-term
  reconciliation (includes the 1/12 anchor residual).
* ``degenerate.json`` -- every asserted identity on its provably-exact
  degenerate family, at least three cases each.
* ``falsification.json`` -- the vanishing-combination corollary at the
  anchor where the printed claim of 0 actually evaluates to 1/6.
* ``determinism.json`` -- a small cheap bank for byte-identical-report
  checks across worker counts.
* ``unresolved.json`` -- a starved panel budget driving most cases
  unresolved (exit code 2 fixture).
* ``strict_gate.json`` -- an exact case that cannot be verified under a
  starved panel budget (exit code 3 fixture under ``--strict``).
* ``bad_identity.json`` -- malformed identity id (exit code 1 fixture).
"""

from importlib.resources import files


def config_path(name: str) -> str:
    """Absolute path of a bundled config file (e.g. ``exact_bank.json``)."""
    return str(files(__package__).joinpath(name))
