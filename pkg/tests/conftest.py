# Copyright 2023 Canonical Ltd.
# See LICENSE file for licensing details.
from hypothesis import HealthCheck, settings

# Exact polynomial arithmetic is slow enough to trip the default deadline.
settings.register_profile(
    "unit", max_examples=30, deadline=None, suppress_health_check=[HealthCheck.too_slow]
)
settings.load_profile("unit")
