"""Request/response models for the compute service and the CLI config files.

Every config document carries a mandatory schema_version; unknown keys are
rejected.  The reconstruct command exists in two flavours: the CLI config
references a synth result document by path, the wire request embeds it.
"""

from __future__ import annotations

from typing import Annotated, Literal, Union

from pydantic import BaseModel, ConfigDict, Field


class StrictModel(BaseModel):
    model_config = ConfigDict(extra="forbid")


Vec3 = tuple[float, float, float]


class SynthConfig(StrictModel):
    schema_version: Literal[1]
    example: Literal[1, 2]
    radius: float = 1.1
    data_grid_exactness: int = Field(64, ge=2, le=600)
    source_grid_exactness: int | None = Field(None, ge=16, le=600)
    display: bool = True


class SynthData(StrictModel):
    """Self-contained data document: potential samples on the data sphere."""

    example: Literal[1, 2]
    radius: float
    data_grid_exactness: int
    values: list[float]


class ForwardConfig(StrictModel):
    schema_version: Literal[1]
    example: Literal[1, 2]
    radius: float = 1.1
    eval_grid_exactness: int = Field(64, ge=2, le=600)
    source_grid_exactness: int | None = Field(None, ge=16, le=600)


class VectorHarmonicField(StrictModel):
    kind: Literal["vector_harmonic"]
    family: Literal[1, 2, 3]
    degree: int = Field(ge=0)
    order_index: int = Field(ge=1)


class ExampleField(StrictModel):
    kind: Literal["example"]
    example: Literal[1, 2]


class RandomField(StrictModel):
    kind: Literal["random"]
    L: int = Field(8, ge=0, le=64)
    seed: int = 0
    decay: float = Field(1.0, gt=0.0, le=1.0)


class UnidirectionalField(StrictModel):
    kind: Literal["unidirectional"]
    support: tuple[float, float] = (-0.9, -0.1)
    v3: float = 1.0
    axis: Vec3 = (0.0, 0.0, 1.0)


FieldSpec = Annotated[
    Union[VectorHarmonicField, ExampleField, RandomField, UnidirectionalField],
    Field(discriminator="kind"),
]


class DecomposeConfig(StrictModel):
    schema_version: Literal[1]
    field_spec: FieldSpec
    L: int = Field(8, ge=0, le=128)
    grid_exactness: int | None = Field(None, ge=2, le=600)


class ReconstructParams(StrictModel):
    schema_version: Literal[1]
    alphas: list[float] = [0.0, 1e-6, 1e-3]
    n_centers: int = Field(500, ge=1)
    h: float = Field(0.9, gt=0.0, lt=1.0)
    region_axis: Vec3 = (0.0, 0.0, 1.0)
    region_threshold: float = Field(0.0, ge=-1.0, le=1.0)
    ridge: float = Field(1e-12, ge=0.0)
    error_grid_exactness: int = Field(128, ge=2, le=600)
    display: bool = True


class ReconstructConfig(ReconstructParams):
    data_path: str


class ReconstructRequest(ReconstructParams):
    data: SynthData


class SilentConfig(StrictModel):
    schema_version: Literal[1]
    mode: Literal["unidirectional", "spectral"] = "unidirectional"
    support: tuple[float, float] = (-0.9, -0.1)
    v3: float = 1.0
    L: int = Field(8, ge=1, le=32)
    seed: int = 0
    radii: tuple[float, float] = (1.1, 0.9)
    grid_exactness: int = Field(400, ge=16, le=600)


class ExistenceConfig(StrictModel):
    schema_version: Literal[1]
    v_kind: Literal["radial", "tilted"] = "tilted"
    epsilon: float = Field(0.2, ge=0.0, lt=1.0)
    axis: Vec3 = (0.0, 0.0, 1.0)
    L: int = Field(12, ge=0, le=32)
    target_seed: int = 0
    target_decay: float = Field(0.25, gt=0.0, le=1.0)
    eval_radius: float = 1.1
    n_eval: int = Field(50, ge=1)
    grid_exactness: int | None = Field(None, ge=2, le=600)


class CommandResponse(StrictModel):
    schema_version: int
    command: str
    result: dict
    tables: dict[str, str] = {}
