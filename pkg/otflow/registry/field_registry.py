"""
Field Registry - Field Family Registration and Lookup

Field families are selected in configuration by descriptor strings of the form
``name[:key=value,...]``, e.g. ``hermite2d:zeta=10``. The registry maps each name
to a factory and parses the parameters passed to it.
"""

from dataclasses import dataclass, field
from typing import Any, Callable, Dict, List, Optional, Tuple

from ..core.errors import ConfigError
from ..dynamics.fields import FieldFamily

FieldFactory = Callable[..., FieldFamily]


def _parse_value(text: str) -> Any:
    for cast in (int, float):
        try:
            return cast(text)
        except ValueError:
            pass
    return text


def parse_descriptor(descriptor: str) -> Tuple[str, Dict[str, Any]]:
    """
    Split a descriptor into family name and keyword parameters

    Raises:
        ConfigError: Empty name or malformed ``key=value`` pair
    """
    name, _, rest = descriptor.strip().partition(":")
    name = name.strip()
    if not name:
        raise ConfigError(f"Field descriptor '{descriptor}' has no family name")
    params: Dict[str, Any] = {}
    for item in filter(None, (p.strip() for p in rest.split(","))):
        key, sep, value = item.partition("=")
        if not sep or not key.strip():
            raise ConfigError(f"Malformed parameter '{item}' in field descriptor '{descriptor}'")
        params[key.strip()] = _parse_value(value.strip())
    return name, params


@dataclass
class FieldRegistry:
    """
    Field Registry

    Manages the registered field family factories and their metadata.
    """

    _factories: Dict[str, FieldFactory] = field(default_factory=dict)
    _metadata: Dict[str, Dict[str, Any]] = field(default_factory=dict)
    _builtin: set = field(default_factory=set)

    def register(
        self,
        name: str,
        factory: FieldFactory,
        metadata: Optional[Dict[str, Any]] = None,
        is_builtin: bool = False,
    ) -> None:
        """
        Register a field family factory

        Args:
            name: Family name used in descriptors
            factory: Callable taking the descriptor parameters as keywords
            metadata: Optional metadata
            is_builtin: Whether this is a built-in family
        """
        if not callable(factory):
            raise ValueError(f"Factory for field family '{name}' must be callable")
        self._factories[name] = factory

        metadata = dict(metadata or {})
        metadata.setdefault("factory", getattr(factory, "__name__", repr(factory)))
        metadata.setdefault("description", (getattr(factory, "__doc__", "") or "").strip())
        self._metadata[name] = metadata
        if is_builtin:
            self._builtin.add(name)

    def unregister(self, name: str) -> bool:
        if name in self._factories:
            del self._factories[name]
            self._metadata.pop(name, None)
            self._builtin.discard(name)
            return True
        return False

    def create(self, descriptor: str) -> FieldFamily:
        """
        Build a field family from its descriptor

        Raises:
            ConfigError: Unknown family or parameters rejected by the factory
        """
        name, params = parse_descriptor(descriptor)
        if name not in self._factories:
            known = ", ".join(sorted(self._factories)) or "none"
            raise ConfigError(f"Unknown field family '{name}' (registered: {known})")
        try:
            return self._factories[name](**params)
        except TypeError as e:
            raise ConfigError(f"Invalid parameters for field family '{name}': {e}") from e

    def get_registered(self) -> List[str]:
        return list(self._factories.keys())

    def is_registered(self, name: str) -> bool:
        return name in self._factories

    def get_metadata(self, name: str) -> Optional[Dict[str, Any]]:
        return self._metadata.get(name)

    def get_builtin(self) -> List[str]:
        return list(self._builtin)

    def __contains__(self, name: str) -> bool:
        return name in self._factories

    def __len__(self) -> int:
        return len(self._factories)

    def __repr__(self) -> str:
        return f"FieldRegistry(families={len(self._factories)})"


# Global field registry instance
_global_registry = FieldRegistry()


def get_global_registry() -> FieldRegistry:
    return _global_registry


def register_field(
    name: str, factory: FieldFactory, metadata: Optional[Dict[str, Any]] = None, is_builtin: bool = False
) -> None:
    """Register a field family factory in the global registry"""
    _global_registry.register(name, factory, metadata, is_builtin)


def create_field(descriptor: str) -> FieldFamily:
    """Build a field family from the global registry"""
    return _global_registry.create(descriptor)


def get_registered_fields() -> List[str]:
    return _global_registry.get_registered()


def is_field_registered(name: str) -> bool:
    return _global_registry.is_registered(name)


def unregister_field(name: str) -> bool:
    return _global_registry.unregister(name)
