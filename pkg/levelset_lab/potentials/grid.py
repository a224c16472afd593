from dataclasses import dataclass

import numpy as np
from numpy.typing import NDArray

from ..metrics import MetricModel

DEFAULT_NUM_NODES = 4096
R_MAX_FACTOR = 1e6


@dataclass(frozen=True)
class RadialGrid:
    r_min: float
    r_max: float
    num_nodes: int = DEFAULT_NUM_NODES

    def __post_init__(self):
        if self.r_min <= 0:
            raise ValueError(f"Invalid r_min: {self.r_min}. Must be positive")

        if self.r_max <= self.r_min:
            raise ValueError(
                f"Invalid r_max: {self.r_max}. Must be greater than r_min={self.r_min}"
            )

        if self.num_nodes < 8:
            raise ValueError(f"Invalid num_nodes: {self.num_nodes}. Must be >= 8")

    @classmethod
    def for_model(
        cls,
        model: MetricModel,
        num_nodes: int = DEFAULT_NUM_NODES,
        r_max: float | None = None,
    ) -> "RadialGrid":
        """
        Default log-spaced grid to 1e6 * max(m, r0, 1). It starts at the
        boundary r0 when the model has one, otherwise at max(a/100, 1e-3 m),
        or 1e-3 when both vanish.
        """
        r0 = model.inner_radius or 0.0
        if r0 > 0:
            r_min = r0
        else:
            r_min = max(model.smoothing_a / 100.0, 1e-3 * model.mass_param)
            if r_min <= 0:
                r_min = 1e-3

            profile_floor = model.conformal_profile.r_min
            if model.conformal_profile.singular_at_origin and r_min <= profile_floor:
                r_min = 1.001 * profile_floor
            elif r_min < profile_floor:
                r_min = profile_floor

        if r_max is None:
            r_max = R_MAX_FACTOR * max(abs(model.mass_param), r0, 1.0)

        return cls(r_min=r_min, r_max=r_max, num_nodes=num_nodes)

    @property
    def nodes(self) -> NDArray[np.float64]:
        return np.geomspace(self.r_min, self.r_max, self.num_nodes)
