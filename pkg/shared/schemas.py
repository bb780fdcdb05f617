import dataclasses
import json
from fractions import Fraction
from typing import Any, Dict, List, Mapping, Union

from pydantic import BaseModel, Field, field_validator

from shared.polyalg import MPoly, RatFunc


RationalText = Union[int, str]


def _check_rational(value: RationalText) -> RationalText:
    if isinstance(value, bool):
        raise ValueError("booleans are not rationals")
    try:
        Fraction(str(value))
    except (ValueError, ZeroDivisionError) as exc:
        raise ValueError(f"not an exact rational: {value!r}") from exc
    return value


def to_jsonable(value: Any) -> Any:
    """Canonical JSON view: rationals as "p/q" strings, polynomials as text."""
    if isinstance(value, bool) or value is None or isinstance(value, str):
        return value
    if isinstance(value, int):
        return value
    if isinstance(value, Fraction):
        return str(value)
    if isinstance(value, MPoly):
        return value.to_text()
    if isinstance(value, RatFunc):
        return {"num": value.num.to_text(), "den": value.den.to_text()}
    if isinstance(value, BaseModel):
        return {name: to_jsonable(getattr(value, name)) for name in type(value).model_fields}
    if dataclasses.is_dataclass(value) and not isinstance(value, type):
        return {f.name: to_jsonable(getattr(value, f.name)) for f in dataclasses.fields(value) if f.repr}
    if isinstance(value, Mapping):
        return {str(k): to_jsonable(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [to_jsonable(v) for v in value]
    raise TypeError(f"cannot serialize {type(value).__name__}")


class SurfaceDocument(BaseModel):
    c1sq: RationalText
    c2: RationalText
    pic_basis: List[str] = Field(min_length=1)
    pic_form: List[List[RationalText]]
    c1_coords: List[RationalText]

    @field_validator("c1sq", "c2")
    @classmethod
    def _scalar_is_rational(cls, value: RationalText) -> RationalText:
        return _check_rational(value)

    @field_validator("c1_coords")
    @classmethod
    def _coords_are_rational(cls, value: List[RationalText]) -> List[RationalText]:
        return [_check_rational(x) for x in value]

    @field_validator("pic_form")
    @classmethod
    def _form_is_rational(cls, value: List[List[RationalText]]) -> List[List[RationalText]]:
        return [[_check_rational(x) for x in row] for row in value]


class Report(BaseModel):
    command: str
    parameters: Dict[str, Any]
    results: Any = None
    provenance: List[str] = []
    tool_version: str

    def render(self) -> str:
        return json.dumps(to_jsonable(self), sort_keys=True, indent=2)
