"""Correlated positive-pair augmentation sampling and verification tools."""

from .config import ConfigError, RunConfig
from .distributions import (JcDistribution, RatioBounds, randomcrop_ratio_cdf,
                            randomcrop_ratio_pdf, tail_probability,
                            truncated_normal_pdf, truncated_normal_sample)
from .paired import (BlurSpec, ColorSpec, CropRegion, PairedScale,
                     PairManifestEntry, ViewParams, make_pair_spec,
                     realize_crop, sample_independent_areas,
                     sample_joint_areas, sample_joint_color,
                     sample_joint_sigmas)

__version__ = "0.1.0"
