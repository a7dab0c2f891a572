"""
Module containing Pydantic schemas for the bumping-route experiment service.
All schemas are used for validation of experiment parameters and for serialization of reports.
"""
from datetime import datetime
from typing import Any, Dict, List, Literal, Optional
from pydantic import BaseModel, Field, field_validator, model_validator

from app.core.config import BUMP_THREADS
from app.core.constants import EXPERIMENT_NAMES, SCHEMA_VERSION, default_t_max

# --- Experiment parameters ---

# pylint: disable=too-few-public-methods
class ExperimentParameters(BaseModel):
    """Simulation parameters shared by the CLI and the HTTP API."""
    m: int = Field(
        10, ge=0, description="Probe level m (initiation time of the augmented process)"
    )
    trials: int = Field(
        100, ge=1, description="Number of independent trials"
    )
    master_seed: int = Field(
        0, ge=0, description="Master seed; trial streams are derived from (seed, trial index)"
    )
    t_max: Optional[int] = Field(
        None, ge=0, description="Censoring horizon, defaults to 64·m² + 10⁶"
    )
    x_max: int = Field(
        2, ge=0, description="Largest tracked column"
    )
    grid: List[float] = Field(
        default_factory=list,
        description="Main grid (u, y, z or s values depending on the experiment); empty means the experiment default"
    )
    t_grid: List[float] = Field(
        default_factory=list,
        description="Second grid (t values of the 2D surface)"
    )
    n: Optional[int] = Field(
        None, ge=0, description="Length of a growth process (okounkov-row, transition-conjecture, thinning, trees)"
    )
    rows: int = Field(
        0, ge=0, description="Row cutoff k of growth-row tracing"
    )
    window_ratio: float = Field(
        0.05, gt=0.0, description="Relative width of the observation window (n, (1+ratio)·n]"
    )
    p: float = Field(
        0.5, gt=0.0, le=1.0, description="Thinning probability √(n/n')"
    )
    thresholds: Dict[str, float] = Field(
        default_factory=dict, description="Overrides of the built-in acceptance thresholds"
    )

    @field_validator("grid", "t_grid")
    @classmethod
    def grid_sorted(cls, value: List[float]) -> List[float]:
        """Grids must be sorted in increasing order."""
        if any(a > b for a, b in zip(value, value[1:])):
            raise ValueError("grid must be sorted in increasing order")
        return value

    @model_validator(mode="after")
    def horizon_covers_m(self):
        """Fill in the default horizon and check t_max ≥ m."""
        if self.t_max is None:
            self.t_max = default_t_max(self.m)
        if self.t_max < self.m:
            raise ValueError(f"t_max={self.t_max} must be at least m={self.m}")
        return self

# pylint: disable=too-few-public-methods
class ExperimentConfig(ExperimentParameters):
    """Full configuration of one `bump` run."""
    experiment: Literal[EXPERIMENT_NAMES] = Field(
        ..., description="Experiment identifier"
    )
    threads: int = Field(
        BUMP_THREADS, ge=1, description="Worker processes; results do not depend on it"
    )
    format: Literal["csv", "json"] = Field(
        "json", description="Output format"
    )
    out: Optional[str] = Field(
        None, description="Output path, stdout when omitted"
    )
    include_samples: bool = Field(
        True, description="Include per-trial sample rows in JSON output"
    )

    def echo(self) -> Dict[str, Any]:
        """Configuration as echoed in reports; execution details are left out."""
        return self.model_dump(exclude={"threads", "out", "format", "include_samples"})

# --- Reports ---

# pylint: disable=too-few-public-methods
class CheckResult(BaseModel):
    """Outcome of one built-in acceptance threshold."""
    name: str = Field(
        ..., description="Check identifier"
    )
    value: Optional[float] = Field(
        ..., description="Measured quantity"
    )
    threshold: float = Field(
        ..., description="Threshold the value is compared with"
    )
    passed: bool = Field(
        ..., description="Whether the value is within the threshold"
    )

# pylint: disable=too-few-public-methods
class ExperimentReport(BaseModel):
    """Result of an experiment: echoed config, summary, checks and sample rows."""
    schema_version: int = Field(
        SCHEMA_VERSION, description="Version of the report layout"
    )
    experiment: str = Field(
        ..., description="Experiment identifier"
    )
    config: Dict[str, Any] = Field(
        ..., description="Echoed configuration"
    )
    summary: Dict[str, Any] = Field(
        ..., description="Summary statistics, recomputable from the samples"
    )
    checks: List[CheckResult] = Field(
        default_factory=list, description="Built-in acceptance checks"
    )
    passed: Optional[bool] = Field(
        None, description="All checks passed; None for exploratory experiments"
    )
    samples: Optional[List[Dict[str, Any]]] = Field(
        None, description="Per-trial sample rows"
    )

# --- Stored runs ---

# pylint: disable=too-few-public-methods
class ExperimentRunRead(BaseModel):
    """Schema for reading a stored experiment run."""
    id: int = Field(
        ..., description="Unique run identifier"
    )
    experiment: str = Field(
        ..., description="Experiment identifier"
    )
    master_seed: int = Field(
        ..., description="Master seed of the run"
    )
    created_at: datetime = Field(
        ..., description="Creation timestamp"
    )
    passed: Optional[bool] = Field(
        None, description="Verdict of the built-in checks"
    )
    config: Dict[str, Any] = Field(
        ..., description="Echoed configuration"
    )
    summary: Dict[str, Any] = Field(
        ..., description="Summary statistics"
    )

    # pylint: disable=missing-class-docstring
    class Config:
        from_attributes = True

# pylint: disable=too-few-public-methods
class ExperimentInfo(BaseModel):
    """Catalogue entry of an experiment."""
    name: str = Field(
        ..., description="Experiment identifier"
    )
    columns: List[str] = Field(
        ..., description="CSV columns of the sample rows"
    )
    exploratory: bool = Field(
        ..., description="Exploratory experiments have no pass/fail verdict"
    )
    description: str = Field(
        "", description="What the experiment measures"
    )

# --- Tableaux ---

# pylint: disable=too-few-public-methods
class RskRequest(BaseModel):
    """Schema for an RSK request."""
    word: List[float] = Field(
        ..., max_length=10_000, description="Sequence of pairwise distinct numbers"
    )

    # pylint: disable=missing-class-docstring
    class Config:
        json_schema_extra = {
            "example": {"word": [3, 1, 2]}
        }

# pylint: disable=too-few-public-methods
class RskResponse(BaseModel):
    """Insertion and recording tableaux with their common shape, bottom row first."""
    insertion: List[List[float]] = Field(
        ..., description="Rows of the insertion tableau P"
    )
    recording: List[List[int]] = Field(
        ..., description="Rows of the recording tableau Q"
    )
    shape: List[int] = Field(
        ..., description="Row lengths"
    )

# pylint: disable=too-few-public-methods
class BumpingRouteRequest(BaseModel):
    """Schema for a bumping-route request."""
    rows: List[List[float]] = Field(
        ..., description="Rows of the tableau, bottom row first"
    )
    m: int = Field(
        ..., ge=0, description="Probe level; the probe m+½ is inserted"
    )

    # pylint: disable=missing-class-docstring
    class Config:
        json_schema_extra = {
            "example": {"rows": [[16, 37, 41, 82], [23, 53, 70], [74, 99]], "m": 17}
        }

# pylint: disable=too-few-public-methods
class BumpingRouteResponse(BaseModel):
    """Bumping route of the probe and the resulting tableau."""
    route: List[List[int]] = Field(
        ..., description="Boxes (x, y) of the route, one per visited row"
    )
    tableau: List[List[float]] = Field(
        ..., description="Rows of the tableau after the insertion"
    )
