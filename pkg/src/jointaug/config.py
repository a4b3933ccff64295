"""Run configuration shared by the samplers, the CLI and the bindings."""

from __future__ import annotations

from dataclasses import dataclass, fields

MODES = (
    "random-crop",
    "joint-crop",
    "joint-blur",
    "joint-color",
    "joint-crop-or-blur",
)


class ConfigError(ValueError):
    pass


@dataclass
class RunConfig:
    mode: str = "joint-crop"
    beta: float = 0.0
    s_min: float = 0.2
    s_max: float = 1.0
    sigma_min: float = 0.1
    sigma_max: float = 2.0
    color_factor: float = 0.4
    aspect_lo: float = 3.0 / 4.0
    aspect_hi: float = 4.0 / 3.0
    out_size: int = 224
    image_size: int = 224  # nominal source dims for parameter-only sampling
    blur_prob_a: float = 1.0
    blur_prob_b: float = 1.0
    crop_or_blur_p: float = 0.5
    seed: int = 0
    count: int = 1000

    def validate(self) -> "RunConfig":
        if self.mode not in MODES:
            raise ConfigError(f"unknown mode {self.mode!r}; expected one of {MODES}")
        if not -8.0 <= self.beta <= 8.0:
            raise ConfigError("beta outside sanity range [-8, 8]")
        if not 0.0 < self.s_min < self.s_max <= 1.0:
            raise ConfigError("need 0 < s_min < s_max <= 1")
        if not 0.0 < self.sigma_min < self.sigma_max:
            raise ConfigError("need 0 < sigma_min < sigma_max")
        if not 0.0 < self.color_factor < 1.0:
            raise ConfigError("color_factor must lie in (0, 1)")
        if not 0.0 < self.aspect_lo <= self.aspect_hi:
            raise ConfigError("need 0 < aspect_lo <= aspect_hi")
        if self.out_size < 8 or self.image_size < 8:
            raise ConfigError("out_size and image_size must be >= 8")
        for name in ("blur_prob_a", "blur_prob_b", "crop_or_blur_p"):
            if not 0.0 <= getattr(self, name) <= 1.0:
                raise ConfigError(f"{name} must lie in [0, 1]")
        if self.count < 1:
            raise ConfigError("count must be >= 1")
        return self

    @classmethod
    def from_dict(cls, mapping: dict, strict: bool = True) -> "RunConfig":
        known = {f.name for f in fields(cls)}
        unknown = set(mapping) - known
        if unknown and strict:
            raise ConfigError(f"unknown config keys: {sorted(unknown)}")
        kwargs = {k: v for k, v in mapping.items() if k in known}
        return cls(**kwargs).validate()
