"""
Pydantic schemas for profile documents

A profile document is JSON of the form
{"dim": 3, "alpha": 1.0, "beta": 2.0,
 "layers": [{"r_outer": 0.5, "material": "high"}, {"r_outer": 1.0, "material": "low"}]}
"""
import json
from pathlib import Path
from typing import List, Literal, Union

from pydantic import BaseModel, ConfigDict, Field
from pydantic import ValidationError as PydanticValidationError

from ..exceptions import DocumentError, DomainError
from ..services.eigensolver import Layer, Material, RadialProfile


class LayerDocument(BaseModel):
    """One layer (r_outer[k-1], r_outer] of a profile"""
    model_config = ConfigDict(extra="forbid")

    r_outer: float = Field(..., gt=0.0, le=1.0)
    material: Literal["low", "high"]


class ProfileDocument(BaseModel):
    """Serialized RadialProfile"""
    model_config = ConfigDict(extra="forbid")

    dim: int = Field(..., ge=2)
    alpha: float = Field(..., gt=0.0)
    beta: float = Field(..., gt=0.0)
    layers: List[LayerDocument] = Field(..., min_length=1)

    @classmethod
    def from_profile(cls, profile: RadialProfile) -> "ProfileDocument":
        return cls(
            dim=profile.dim,
            alpha=profile.alpha,
            beta=profile.beta,
            layers=[LayerDocument(r_outer=layer.r_outer, material=layer.material.value)
                    for layer in profile.layers],
        )

    def to_profile(self) -> RadialProfile:
        """Validate the layer structure; errors name the offending field"""
        try:
            return RadialProfile(
                self.dim,
                self.alpha,
                self.beta,
                tuple(Layer(layer.r_outer, Material(layer.material)) for layer in self.layers),
            )
        except DomainError as e:
            raise DocumentError(e.message, field="profile")


def _field_path(location) -> str:
    return " -> ".join(str(part) for part in location) or "document"


def parse_profile(text: str) -> RadialProfile:
    """
    Parse a JSON profile document

    Args:
        text: Document text

    Returns:
        Validated RadialProfile

    Raises:
        DocumentError: naming the line (JSON syntax) or field path (schema)
    """
    try:
        data = json.loads(text)
    except json.JSONDecodeError as e:
        raise DocumentError(e.msg, field=f"line {e.lineno} column {e.colno}")
    try:
        document = ProfileDocument.model_validate(data)
    except PydanticValidationError as e:
        first = e.errors()[0]
        raise DocumentError(first["msg"], field=_field_path(first["loc"]))
    return document.to_profile()


def load_profile(path: Union[str, Path]) -> RadialProfile:
    try:
        text = Path(path).read_text(encoding="utf-8")
    except OSError as e:
        raise DocumentError(f"cannot read {path}: {e.strerror}", field="--profile")
    return parse_profile(text)


def dump_profile(profile: RadialProfile) -> str:
    """JSON document that parse_profile() maps back to an identical profile"""
    return ProfileDocument.from_profile(profile).model_dump_json(indent=2) + "\n"
