# config_services.py - Service configuration via environment variables
import os
from typing import Optional
from dataclasses import dataclass

import config
from exceptions import ConfigurationException


def _env_float(key: str, default: str) -> float:
    raw = os.getenv(key, default)
    try:
        return float(raw)
    except ValueError as e:
        raise ConfigurationException(key, f"expected a number, got {raw!r}") from e


def _env_int(key: str, default: str) -> int:
    raw = os.getenv(key, default)
    try:
        return int(raw)
    except ValueError as e:
        raise ConfigurationException(key, f"expected an integer, got {raw!r}") from e


@dataclass
class NumericsConfig:
    """Tolerances and step counts shared by the numerical engine"""
    tol_ode: float = 1e-6
    steps: int = 512
    rank_rtol: float = 1e-10
    approx_tol: float = 1e-9
    tol_grid_factor: float = 1e-4
    solver: str = "stepping"

    @classmethod
    def from_env(cls) -> 'NumericsConfig':
        numerics_config = cls(
            tol_ode=_env_float('TOL_ODE', config.DEFAULT_TOL_ODE),
            steps=_env_int('DEFAULT_STEPS', config.DEFAULT_STEPS),
            rank_rtol=_env_float('RANK_RTOL', config.DEFAULT_RANK_RTOL),
            approx_tol=_env_float('APPROX_TOL', config.DEFAULT_APPROX_TOL),
            tol_grid_factor=_env_float('TOL_GRID_FACTOR', config.DEFAULT_TOL_GRID_FACTOR),
            solver=os.getenv('EVOLUTION_SOLVER', config.DEFAULT_EVOLUTION_SOLVER)
        )
        if numerics_config.steps < 1:
            raise ConfigurationException('DEFAULT_STEPS', 'must be at least 1')
        if numerics_config.tol_ode <= 0:
            raise ConfigurationException('TOL_ODE', 'must be positive')
        if numerics_config.solver not in ("stepping", "integral"):
            raise ConfigurationException('EVOLUTION_SOLVER', f"unknown solver {numerics_config.solver!r}")
        return numerics_config

    def tol_grid(self, spacing: float) -> float:
        """Grid tolerance for a discrete morphism residual at the given spacing"""
        return self.tol_grid_factor * spacing ** 2


@dataclass
class SpectralConfig:
    """Configuration for spectral sequence computations"""
    max_page: Optional[int] = None  # None: read E-infinity at r = n + 1

    @classmethod
    def from_env(cls) -> 'SpectralConfig':
        raw = os.getenv('SPECTRAL_MAX_PAGE')
        return cls(max_page=int(raw) if raw else None)


@dataclass
class CliConfig:
    """Configuration for the command line front end"""
    manifest_path: str = "manifest.json"
    json_indent: int = 2

    @classmethod
    def from_env(cls) -> 'CliConfig':
        return cls(
            manifest_path=os.getenv('LIEEXT_MANIFEST', config.DEFAULT_MANIFEST),
            json_indent=_env_int('LIEEXT_JSON_INDENT', config.DEFAULT_JSON_INDENT)
        )


@dataclass
class ServiceConfig:
    """Main service configuration"""
    numerics: NumericsConfig
    spectral: SpectralConfig
    cli: CliConfig

    @classmethod
    def from_env(cls) -> 'ServiceConfig':
        return cls(
            numerics=NumericsConfig.from_env(),
            spectral=SpectralConfig.from_env(),
            cli=CliConfig.from_env()
        )


# Global configuration instance
_config: Optional[ServiceConfig] = None


def get_service_config() -> ServiceConfig:
    """Get global service configuration"""
    global _config
    if _config is None:
        _config = ServiceConfig.from_env()
    return _config


def reset_config() -> None:
    """Reset configuration (for testing)"""
    global _config
    _config = None


def numerics() -> NumericsConfig:
    """Shortcut for the numerics section of the global configuration"""
    return get_service_config().numerics
