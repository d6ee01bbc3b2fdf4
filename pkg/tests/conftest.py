"""Shared test configuration.

Monte-Carlo comparisons use fixed seeds throughout, so every test is
deterministic; tolerances are set from the frozen run, with margin.
"""

from hypothesis import HealthCheck, settings

settings.register_profile(
    "default",
    deadline=None,
    suppress_health_check=[HealthCheck.too_slow],
)
settings.load_profile("default")
