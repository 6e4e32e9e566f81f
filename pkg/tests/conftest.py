"""Shared pytest configuration.

Hypothesis runs derandomized with no deadline so the suite is reproducible
and immune to slow-example flakiness on loaded machines.
"""

from hypothesis import HealthCheck, settings

settings.register_profile(
    "ci",
    derandomize=True,
    deadline=None,
    max_examples=60,
    suppress_health_check=[HealthCheck.too_slow],
)
settings.load_profile("ci")
