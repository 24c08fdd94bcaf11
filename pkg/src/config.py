"""Run configuration: built-in defaults, then a YAML file, then CLI flags."""

import logging
from dataclasses import dataclass, field, fields, replace
from fractions import Fraction
from pathlib import Path
from typing import Any, Dict, List, Optional, Union

import yaml

from enumeration import DEFAULT_MAX_RANK
from errors import BasisParseError, ParameterDomainError

logger = logging.getLogger(__name__)

ALGORITHMS = ('lll', 'dbkz', 'slide-small', 'slide-large', 'approx-svp')
DEFAULT_CONFIG = Path(__file__).resolve().parent.parent / 'configs' / 'default.yaml'


def parse_fraction(value: Any, key: str) -> Fraction:
    """Accept ints and "num/den" strings"""
    if isinstance(value, bool) or value is None:
        raise BasisParseError(f"Config key '{key}' must be a rational, got {value!r}")
    if isinstance(value, float):
        raise BasisParseError(f"Config key '{key}' must be an integer or a 'num/den' string, got float {value}")
    try:
        return Fraction(value)
    except (ValueError, ZeroDivisionError) as e:
        raise BasisParseError(f"Config key '{key}': {e}") from e


@dataclass
class RunConfig:
    algorithm: str = 'slide-small'
    k: Optional[int] = None
    delta: Fraction = Fraction(1)
    eps: Optional[Fraction] = None
    c: Optional[Fraction] = None
    tours: Optional[int] = None
    max_rank: int = DEFAULT_MAX_RANK
    lll_eps: Fraction = Fraction(1, 3)
    # generator
    family: str = 'uniform'
    n: int = 8
    m: Optional[int] = None
    bound: int = 10
    seed: int = 0
    # bench
    bench_n: List[int] = field(default_factory=lambda: [8])
    bench_k: List[int] = field(default_factory=lambda: [3, 4])
    bench_c: List[Fraction] = field(default_factory=list)
    bench_seeds: int = 3
    workers: int = 1
    # run
    input_path: Optional[str] = None
    output_path: Optional[str] = None
    report_path: Optional[str] = None
    verify: bool = False
    trace: bool = False
    log_level: str = 'WARNING'

    def merged(self, overrides: Dict[str, Any]) -> 'RunConfig':
        """Copy with every non-None override applied"""
        known = {f.name for f in fields(self)}
        return replace(self, **{k: v for k, v in overrides.items() if v is not None and k in known})

    def validate(self, n: Optional[int] = None) -> 'RunConfig':
        """Parameter-domain checks; n-dependent checks run once the rank is known"""
        if self.algorithm not in ALGORITHMS:
            raise ParameterDomainError(f"Unknown algorithm '{self.algorithm}', expected one of {', '.join(ALGORITHMS)}")
        if self.delta < 1:
            raise ParameterDomainError(f"delta must be >= 1, got {self.delta}")
        if self.eps is not None and self.eps <= 0:
            raise ParameterDomainError(f"eps must be > 0, got {self.eps}")
        if self.max_rank < 1:
            raise ParameterDomainError(f"max_rank must be >= 1, got {self.max_rank}")
        if self.tours is not None and self.tours < 1:
            raise ParameterDomainError(f"tours must be >= 1, got {self.tours}")
        if self.workers < 1:
            raise ParameterDomainError(f"workers must be >= 1, got {self.workers}")
        if n is None:
            return self
        if self.algorithm in ('dbkz', 'slide-small', 'slide-large') and self.k is None:
            raise ParameterDomainError(f"Algorithm '{self.algorithm}' needs a block size k")
        if self.algorithm == 'approx-svp' and self.c is None:
            raise ParameterDomainError("Algorithm 'approx-svp' needs c")
        if self.k is not None:
            if self.algorithm == 'slide-small' and not 2 <= n - self.k <= self.k:
                raise ParameterDomainError(f"slide-small needs n = k+q with 2 <= q <= k (n={n}, k={self.k})")
            if self.algorithm == 'slide-large' and (self.k < 2 or n // self.k < 2):
                raise ParameterDomainError(f"slide-large needs n = pk+q with p >= 2 (n={n}, k={self.k})")
            if self.algorithm == 'dbkz' and not 2 <= self.k < n:
                raise ParameterDomainError(f"dbkz needs n > k >= 2 (n={n}, k={self.k})")
        return self


_SECTIONS = {
    'reduction': {'algorithm': str, 'k': int, 'delta': Fraction, 'eps': Fraction, 'c': Fraction,
                  'tours': int, 'max_rank': int, 'lll_eps': Fraction},
    'generator': {'family': str, 'n': int, 'm': int, 'bound': int, 'seed': int},
    'bench': {'n': 'bench_n', 'k': 'bench_k', 'c': 'bench_c', 'seeds': 'bench_seeds', 'workers': int},
    'logging': {'level': 'log_level'},
}


def _convert(key: str, kind: Any, value: Any) -> Any:
    if value is None:
        return None
    if kind is Fraction:
        return parse_fraction(value, key)
    if kind is int:
        if isinstance(value, bool) or not isinstance(value, int):
            raise BasisParseError(f"Config key '{key}' must be an integer, got {value!r}")
        return value
    return str(value)


def config_from_dict(data: Dict[str, Any], base: Optional[RunConfig] = None) -> RunConfig:
    base = base or RunConfig()
    overrides: Dict[str, Any] = {}
    for section, keys in _SECTIONS.items():
        values = data.get(section) or {}
        if not isinstance(values, dict):
            raise BasisParseError(f"Config section '{section}' must be a mapping")
        for key, value in values.items():
            if key not in keys:
                raise BasisParseError(f"Unknown config key '{section}.{key}'")
            kind = keys[key]
            name = f'{section}.{key}'
            if kind == 'bench_n' or kind == 'bench_k':
                overrides[kind] = [_convert(name, int, v) for v in value]
            elif kind == 'bench_c':
                overrides[kind] = [parse_fraction(v, name) for v in value]
            elif kind == 'bench_seeds':
                overrides[kind] = _convert(name, int, value)
            elif kind == 'log_level':
                overrides[kind] = str(value).upper()
            else:
                overrides[key] = _convert(name, kind, value)
    return base.merged(overrides)


def load_config(path: Optional[Union[str, Path]] = None, overrides: Optional[Dict[str, Any]] = None) -> RunConfig:
    """Defaults < YAML file < overrides (CLI flags)"""
    path = Path(path) if path else DEFAULT_CONFIG
    cfg = RunConfig()
    if path.exists():
        try:
            with open(path, 'r') as f:
                data = yaml.safe_load(f) or {}
        except yaml.YAMLError as e:
            raise BasisParseError(f"Invalid YAML in {path}: {e}") from e
        if not isinstance(data, dict):
            raise BasisParseError(f"Config {path} must be a mapping")
        cfg = config_from_dict(data, cfg)
        logger.debug("Loaded configuration from %s", path)
    elif path != DEFAULT_CONFIG:
        raise BasisParseError(f"Config file {path} not found")
    return cfg.merged(overrides or {})
