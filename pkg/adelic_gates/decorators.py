#!/usr/bin/env python3

"""
Batch Command Decorator

Attaches metadata to the methods that implement the adelic-gates subcommands
so the front-end can discover them, describe them, and validate their
arguments through a pydantic model before running them.

Example:
    class Toolkit:
        @batch_command(name="oracle", model=OracleOptions, operation_type="oracle")
        def oracle(self, p: int, k: int, budget: int | None = None):
            \"\"\"Enumerate the subgroup generated by X, P-, Mz, P1p.\"\"\"
"""

import inspect
from typing import Any, Callable, Dict, Optional, Type

from pydantic import BaseModel

__all__ = ["batch_command", "validate_args", "collect_commands", "command_schema"]


# --------------------------------------------------------------------------- #
# Helpers                                                                     #
# --------------------------------------------------------------------------- #
def validate_args(fn: Callable, kwargs: Dict[str, Any]) -> None:
    """If a pydantic model was supplied, validate/coerce kwargs in-place."""
    model = getattr(fn, "__batch_meta__", {}).get("pydantic_model")
    if model:
        obj = model(**kwargs)
        kwargs.update(obj.model_dump())


def command_schema(fn: Callable) -> Dict[str, Any]:
    """JSON schema of a command's arguments (empty when it has no model)."""
    model = getattr(fn, "__batch_meta__", {}).get("pydantic_model")
    return model.model_json_schema() if model else {}


def collect_commands(obj: Any) -> Dict[str, Callable]:
    """Map command name -> bound method for every decorated method of obj."""
    commands = {}
    for _, member in inspect.getmembers(obj, predicate=inspect.ismethod):
        meta = getattr(member, "__batch_meta__", None)
        if meta:
            commands[meta["name"]] = member
    return commands


# --------------------------------------------------------------------------- #
# Decorator                                                                   #
# --------------------------------------------------------------------------- #
def batch_command(
    *,
    name: str,
    description: Optional[str] = None,
    model: Optional[Type[BaseModel]] = None,
    operation_type: Optional[str] = None,
):
    """
    Mark a method as a batch subcommand.

    Args:
        name: Subcommand name on the command line
        description: Help text; defaults to the method docstring
        model: pydantic model validating the keyword arguments
        operation_type: Coarse category used in logs (synthesis, simulation, ...)
    """
    def decorator(fn: Callable):
        fn.__batch_meta__ = {
            "name": name,
            "description": description or inspect.cleandoc(fn.__doc__ or ""),
            "operation_type": operation_type,
            "pydantic_model": model,
        }
        return fn
    return decorator
