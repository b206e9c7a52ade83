import logging
import re
try:
    import tomllib
except ModuleNotFoundError:  # Python < 3.11
    import tomli as tomllib
from pathlib import Path
from typing import Dict, List, Optional

from pydantic import BaseModel, ConfigDict, field_validator, model_validator
from pydantic import ValidationError as PydanticValidationError
from sympy import isprime

from topsocle.errors import ConfigurationError

logger = logging.getLogger(__name__)

NAME_RE = re.compile(r"^[A-Za-z_][A-Za-z_0-9]*$")


class ValidationError(ConfigurationError):
    """Custom validation error"""
    pass


class BaseValidator:
    """Base validation class"""

    @staticmethod
    def validate_variable_names(names: List[str]) -> bool:
        """Identifiers, pairwise distinct, at least one"""
        return bool(names) and all(NAME_RE.match(n) for n in names) and len(set(names)) == len(names)

    @staticmethod
    def validate_characteristic(characteristic: int) -> bool:
        """0 selects the rationals, otherwise a prime"""
        return characteristic == 0 or (characteristic > 1 and isprime(characteristic))

    @staticmethod
    def validate_weights(weights: Optional[List[int]], n: int) -> bool:
        if weights is None:
            return True
        return len(weights) == n and all(w >= 1 for w in weights)

    @staticmethod
    def validate_ell_range(lmin: int, lmax: int) -> bool:
        return 0 <= lmin <= lmax


class RingSection(BaseModel):
    model_config = ConfigDict(extra="forbid")

    backend: str = "poly"
    u_vars: List[str] = ["u", "v"]
    x_vars: List[str] = ["x", "y"]
    generators: List[str] = []
    weights: Optional[List[int]] = None

    @field_validator("backend")
    @classmethod
    def validate_backend(cls, v):
        if v not in ("poly", "semigroup"):
            raise ValueError("backend must be one of: poly, semigroup")
        return v

    @field_validator("u_vars", "x_vars")
    @classmethod
    def validate_names(cls, v):
        if not BaseValidator.validate_variable_names(v):
            raise ValueError(f"invalid variable names {v}")
        return v

    @model_validator(mode="after")
    def validate_ring(self):
        if not BaseValidator.validate_weights(self.weights, len(self.x_vars)):
            raise ValueError(f"weights must be {len(self.x_vars)} positive integers")
        if self.backend == "semigroup" and not self.generators:
            raise ValueError("semigroup backend needs generators")
        if self.backend == "poly" and self.generators:
            raise ValueError("generators only apply to the semigroup backend")
        return self


class HypersurfaceSection(BaseModel):
    model_config = ConfigDict(extra="forbid")

    f: str


class EllSection(BaseModel):
    """Either an explicit ell range or a q range mapped through ell(q) = q*p + n"""

    model_config = ConfigDict(extra="forbid")

    lmin: Optional[int] = None
    lmax: Optional[int] = None
    qmin: Optional[int] = None
    qmax: Optional[int] = None

    @model_validator(mode="after")
    def validate_range(self):
        has_l = self.lmin is not None or self.lmax is not None
        has_q = self.qmin is not None or self.qmax is not None
        if has_l == has_q:
            raise ValueError("give exactly one of lmin/lmax or qmin/qmax")
        lo, hi = (self.lmin, self.lmax) if has_l else (self.qmin, self.qmax)
        if lo is None or hi is None or not BaseValidator.validate_ell_range(lo, hi):
            raise ValueError("range needs 0 <= min <= max")
        return self

    @property
    def by_q(self) -> bool:
        return self.qmin is not None


class WindowSection(BaseModel):
    model_config = ConfigDict(extra="forbid")

    lo: int = 0
    hi: int

    @model_validator(mode="after")
    def validate_window(self):
        if not 0 <= self.lo <= self.hi:
            raise ValueError("window needs 0 <= lo <= hi")
        return self


class ScenarioFile(BaseModel):
    """Schema shared by preset files and --config files"""

    model_config = ConfigDict(extra="forbid")

    name: str
    description: str = ""
    characteristic: Optional[int] = None
    ring: RingSection
    hypersurface: HypersurfaceSection
    ells: EllSection
    window: Optional[WindowSection] = None

    @field_validator("characteristic")
    @classmethod
    def validate_characteristic(cls, v):
        if v is not None and not BaseValidator.validate_characteristic(v):
            raise ValueError(f"characteristic must be 0 or a prime, got {v}")
        return v


class CliConfig(BaseModel):
    """Global flags after merging with settings; a flag always wins"""

    model_config = ConfigDict(extra="forbid")

    characteristic: int
    output_format: str
    jobs: int
    allow_inconclusive: bool
    deg_cap: int
    window_cap: int
    log_level: str

    @field_validator("characteristic")
    @classmethod
    def validate_characteristic(cls, v):
        if not BaseValidator.validate_characteristic(v):
            raise ValueError(f"characteristic must be 0 or a prime, got {v}")
        return v

    @field_validator("output_format")
    @classmethod
    def validate_output_format(cls, v):
        if v not in ("csv", "json"):
            raise ValueError("format must be one of: csv, json")
        return v

    @field_validator("jobs", "deg_cap", "window_cap")
    @classmethod
    def validate_positive(cls, v):
        if v < 1:
            raise ValueError("must be a positive integer")
        return v

    @field_validator("log_level")
    @classmethod
    def validate_log_level(cls, v):
        v = v.upper()
        if v not in ("DEBUG", "INFO", "WARNING", "ERROR", "CRITICAL"):
            raise ValueError(f"unknown log level {v}")
        return v


def _errors_of(e: PydanticValidationError) -> List[str]:
    return [f"{'.'.join(str(p) for p in err['loc']) or 'file'}: {err['msg']}" for err in e.errors()]


class ScenarioValidator(BaseValidator):
    """Scenario-file validation"""

    @staticmethod
    def validate_scenario_data(data: Dict) -> Dict:
        """Validate a parsed scenario mapping"""
        errors = []
        scenario = None
        try:
            scenario = ScenarioFile.model_validate(data)
        except PydanticValidationError as e:
            errors.extend(_errors_of(e))

        return {
            'data': scenario,
            'valid': len(errors) == 0,
            'errors': errors
        }

    @staticmethod
    def validate_cli_data(data: Dict) -> Dict:
        """Validate merged global flags"""
        errors = []
        config = None
        try:
            config = CliConfig.model_validate(data)
        except PydanticValidationError as e:
            errors.extend(_errors_of(e))

        return {
            'data': config,
            'valid': len(errors) == 0,
            'errors': errors
        }


def load_scenario_file(path) -> ScenarioFile:
    """
    Read and validate a TOML scenario file

    Raises:
        ValidationError: unreadable file, TOML syntax error or schema violation
    """
    path = Path(path)
    try:
        with path.open("rb") as fh:
            data = tomllib.load(fh)
    except OSError as e:
        raise ValidationError(f"cannot read {path}: {e.strerror}") from e
    except tomllib.TOMLDecodeError as e:
        raise ValidationError(f"{path}: {e}") from e

    result = ScenarioValidator.validate_scenario_data(data)
    if not result['valid']:
        raise ValidationError(f"{path}: " + "; ".join(result['errors']))
    logger.debug(f"loaded scenario {result['data'].name!r} from {path}")
    return result['data']


def build_cli_config(data: Dict) -> CliConfig:
    result = ScenarioValidator.validate_cli_data(data)
    if not result['valid']:
        raise ValidationError("; ".join(result['errors']))
    return result['data']


# Export main validation functions
validate_scenario = ScenarioValidator.validate_scenario_data
validate_cli = ScenarioValidator.validate_cli_data
