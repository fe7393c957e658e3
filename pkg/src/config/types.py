from typing import Literal, Optional

from pydantic import BaseModel, ConfigDict, Field

from . import common

QuadratureMethod = Literal["auto", "adaptive", "mc", "both"]


class NumericOptions(BaseModel):
    """Numeric settings of one job; CLI flags override the module defaults."""

    model_config = ConfigDict(frozen=True)

    precision: int = Field(default=common.DEFAULT_PRECISION, ge=5, le=common.MAX_PRECISION)
    method: QuadratureMethod = "auto"
    budget: Optional[int] = Field(default=None, gt=0)
    seed: int = common.DEFAULT_SEED
    tolerance: float = Field(default=common.ADAPTIVE_TOLERANCE, gt=0)
    max_coeff: int = Field(default=common.MAX_COEFF, gt=1)
    held_out: int = Field(default=common.HELD_OUT_POINTS, ge=1)
