"""Python access to the mdlite engine, style-test harness and regression runner."""

from ._mdlite import (
    FAILED,
    OK,
    close,
    command,
    commands_string,
    extract,
    generate_reference,
    get_last_error,
    has_error,
    introspect,
    open,
    regress,
    rel_err,
    restart_bytes,
    select_examples,
    style_test,
    styles,
    version,
)

__version__ = version()

__all__ = [
    "FAILED",
    "OK",
    "close",
    "command",
    "commands_string",
    "extract",
    "generate_reference",
    "get_last_error",
    "has_error",
    "introspect",
    "open",
    "regress",
    "rel_err",
    "restart_bytes",
    "select_examples",
    "style_test",
    "styles",
    "version",
]
