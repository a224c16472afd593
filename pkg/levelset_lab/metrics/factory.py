from typing import Any

from .profiles import (
    ConformalProfile,
    FlatProfile,
    SchwarzschildProfile,
    SmoothedSchwarzschildProfile,
    TabulatedProfile,
)


class ProfileFactory:
    def __init__(self):
        self._profiles: dict[str, type[ConformalProfile]] = {}

    def register_profile(self, key: str, profile: type[ConformalProfile]) -> None:
        self._profiles[key] = profile

    def get_profile(self, key: str, **kwargs: Any) -> ConformalProfile:
        if not self.is_registered(key):
            raise KeyError(f"No valid profile registered for {key}")

        return self._profiles[key](**kwargs)

    def is_registered(self, key: str) -> bool:
        return key in self._profiles


def default_profile_factory() -> ProfileFactory:
    """Factory with one entry per built-in metric kind."""
    # Imported here: models imports this module
    from .models import MetricKind

    factory = ProfileFactory()
    factory.register_profile(MetricKind.FLAT, FlatProfile)
    factory.register_profile(MetricKind.SCHWARZSCHILD_ISOTROPIC, SchwarzschildProfile)
    factory.register_profile(
        MetricKind.SMOOTHED_SCHWARZSCHILD, SmoothedSchwarzschildProfile
    )
    factory.register_profile(MetricKind.CUSTOM_RADIAL_CONFORMAL, TabulatedProfile)
    return factory
