"""
Registry module - field family registration
"""

from .field_registry import (
    FieldRegistry,
    create_field,
    get_global_registry,
    get_registered_fields,
    is_field_registered,
    parse_descriptor,
    register_field,
    unregister_field,
)

__all__ = [
    "FieldRegistry",
    "create_field",
    "get_global_registry",
    "get_registered_fields",
    "is_field_registered",
    "parse_descriptor",
    "register_field",
    "unregister_field",
]
