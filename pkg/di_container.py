# di_container.py - Dependency Injection Container
import inspect
import logging
from typing import Any, Callable, Dict, Type, TypeVar

from interfaces import *

logger = logging.getLogger(__name__)

T = TypeVar('T')


class DIContainer:
    """Registry of service implementations keyed by interface"""

    def __init__(self):
        self._classes: Dict[Type, Type] = {}
        self._instances: Dict[Type, Any] = {}
        self._factories: Dict[Type, Callable[[], Any]] = {}

    def register(self, interface: Type[T], implementation: Type[T], singleton: bool = True) -> None:
        """Register a class; singletons are built once on first resolve"""
        if singleton:
            self._classes[interface] = implementation
        else:
            self._factories[interface] = lambda: self._instantiate(implementation)

    def register_instance(self, interface: Type[T], instance: T) -> None:
        self._instances[interface] = instance

    def register_factory(self, interface: Type[T], factory: Callable[[], T]) -> None:
        """Register a callable invoked on every resolve"""
        self._factories[interface] = factory

    def resolve(self, interface: Type[T]) -> T:
        if interface in self._instances:
            return self._instances[interface]
        if interface in self._classes:
            instance = self._instantiate(self._classes[interface])
            self._instances[interface] = instance
            return instance
        if interface in self._factories:
            return self._factories[interface]()
        raise LookupError(f"No registration found for {interface.__name__}")

    def _instantiate(self, cls: Type[T]) -> T:
        """Build ``cls``, resolving annotated constructor parameters from the container"""
        kwargs = {}
        for name, param in inspect.signature(cls.__init__).parameters.items():
            if name == 'self' or param.kind in (inspect.Parameter.VAR_POSITIONAL, inspect.Parameter.VAR_KEYWORD):
                continue
            if param.annotation is not inspect.Parameter.empty:
                try:
                    kwargs[name] = self.resolve(param.annotation)
                    continue
                except LookupError:
                    pass
            if param.default is inspect.Parameter.empty:
                raise LookupError(f"Cannot resolve parameter {name} of {cls.__name__}")
            kwargs[name] = param.default
        return cls(**kwargs)

    def clear(self) -> None:
        self._classes.clear()
        self._instances.clear()
        self._factories.clear()


# Global DI container instance
di_container = DIContainer()


def setup_di_container() -> DIContainer:
    """Register the configuration, the evolution solver and the manifest loader"""
    di_container.clear()

    from config_services import ServiceConfig, get_service_config
    from services.paths.evolution import default_solver
    from cli.manifest import JsonManifestLoader

    di_container.register_instance(ServiceConfig, get_service_config())
    # built per resolve from numerics().solver
    di_container.register_factory(IEvolutionSolver, default_solver)
    di_container.register(IManifestLoader, JsonManifestLoader)

    logger.info("[DI] container setup completed with configuration")
    return di_container


def get_service(interface: Type[T]) -> T:
    """Get a service instance from the global DI container"""
    return di_container.resolve(interface)
