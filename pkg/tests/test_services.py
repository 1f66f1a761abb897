# tests/test_services.py
import logging
from unittest.mock import MagicMock, patch

import pytest

import config
from config_services import NumericsConfig, ServiceConfig, get_service_config, numerics, reset_config
from di_container import DIContainer, get_service, setup_di_container
from exceptions import ConfigurationException
from interfaces import IEvolutionSolver, IManifestLoader
from logging_config import setup_logging
from services.paths.evolution import IntegralEvolutionSolver, SteppingEvolutionSolver, default_solver


@pytest.fixture(autouse=True)
def fresh_config():
    reset_config()
    yield
    reset_config()


class TestDIContainer:
    """Test dependency injection container"""

    def test_register_and_resolve(self):
        container = DIContainer()
        mock_service = MagicMock()
        container.register_instance(str, mock_service)
        assert container.resolve(str) is mock_service

    def test_register_factory(self):
        container = DIContainer()
        container.register_factory(str, lambda: "test")
        assert container.resolve(str) == "test"

    def test_singleton_is_cached(self):
        container = DIContainer()
        container.register(SteppingEvolutionSolver, SteppingEvolutionSolver)
        assert container.resolve(SteppingEvolutionSolver) is container.resolve(SteppingEvolutionSolver)

    def test_transient_registration(self):
        container = DIContainer()
        container.register(SteppingEvolutionSolver, SteppingEvolutionSolver, singleton=False)
        assert container.resolve(SteppingEvolutionSolver) is not container.resolve(SteppingEvolutionSolver)

    def test_constructor_defaults(self):
        container = DIContainer()
        container.register(IEvolutionSolver, IntegralEvolutionSolver)
        assert container.resolve(IEvolutionSolver).substeps == 1

    def test_missing_registration(self):
        with pytest.raises(LookupError):
            DIContainer().resolve(int)

    def test_setup_registers_services(self):
        setup_di_container()
        assert get_service(ServiceConfig) is get_service_config()
        assert isinstance(get_service(IEvolutionSolver), SteppingEvolutionSolver)
        loader = get_service(IManifestLoader)
        assert loader is get_service(IManifestLoader)

    def test_solver_follows_configuration(self):
        setup_di_container()
        numerics().solver = "integral"
        assert isinstance(get_service(IEvolutionSolver), IntegralEvolutionSolver)


class TestConfiguration:
    """Test environment driven configuration"""

    def test_defaults(self, monkeypatch):
        for key in ("TOL_ODE", "DEFAULT_STEPS", "RANK_RTOL", "APPROX_TOL", "TOL_GRID_FACTOR", "EVOLUTION_SOLVER"):
            monkeypatch.delenv(key, raising=False)
        settings = NumericsConfig.from_env()
        assert settings.tol_ode == 1e-6
        assert settings.steps == 512
        assert settings.rank_rtol == 1e-10
        assert settings.solver == "stepping"

    def test_environment_overrides(self, monkeypatch):
        monkeypatch.setenv("TOL_ODE", "1e-8")
        monkeypatch.setenv("DEFAULT_STEPS", "64")
        monkeypatch.setenv("EVOLUTION_SOLVER", "integral")
        assert numerics().tol_ode == 1e-8
        assert numerics().steps == 64
        assert isinstance(default_solver(), IntegralEvolutionSolver)

    def test_fallback_reads_config_module(self, monkeypatch):
        monkeypatch.delenv("TOL_ODE", raising=False)
        monkeypatch.delenv("EVOLUTION_SOLVER", raising=False)
        monkeypatch.setattr(config, "DEFAULT_TOL_ODE", "1e-7")
        monkeypatch.setattr(config, "DEFAULT_EVOLUTION_SOLVER", "integral")
        settings = NumericsConfig.from_env()
        assert settings.tol_ode == 1e-7
        assert settings.solver == "integral"

    def test_tol_grid(self):
        assert NumericsConfig(tol_grid_factor=1e-4).tol_grid(0.1) == pytest.approx(1e-6)

    @pytest.mark.parametrize("key, value", [
        ("TOL_ODE", "small"),
        ("TOL_ODE", "-1"),
        ("DEFAULT_STEPS", "1.5"),
        ("DEFAULT_STEPS", "0"),
        ("EVOLUTION_SOLVER", "euler"),
    ])
    def test_invalid_values(self, monkeypatch, key, value):
        monkeypatch.setenv(key, value)
        with pytest.raises(ConfigurationException) as info:
            NumericsConfig.from_env()
        assert info.value.config_key == key

    def test_spectral_and_cli_sections(self, monkeypatch):
        monkeypatch.setenv("SPECTRAL_MAX_PAGE", "3")
        monkeypatch.setenv("LIEEXT_MANIFEST", "other.json")
        settings = get_service_config()
        assert settings.spectral.max_page == 3
        assert settings.cli.manifest_path == "other.json"
        assert settings.cli.json_indent == 2

    def test_reset(self):
        first = get_service_config()
        reset_config()
        assert get_service_config() is not first


class TestLogging:
    """Test logging setup"""

    def test_setup_logging_uses_stderr(self):
        with patch("logging.basicConfig") as basic_config:
            setup_logging("debug")
        kwargs = basic_config.call_args.kwargs
        assert kwargs["level"] == logging.DEBUG
        assert kwargs["handlers"][0].stream is not None
        assert "%(name)s" in kwargs["format"]

    def test_unknown_level_falls_back_to_info(self):
        with patch("logging.basicConfig") as basic_config:
            setup_logging("chatty")
        assert basic_config.call_args.kwargs["level"] == logging.INFO
