import logging
import os

LOG_LEVEL = os.getenv("SKYRME_LOG_LEVEL", "INFO").upper()
_FORMAT = "%(asctime)s %(levelname)s %(name)s: %(message)s"

_configured = False


def _configure_root() -> None:
    global _configured
    if _configured:
        return
    root = logging.getLogger("skyrme")
    if not root.handlers:
        handler = logging.StreamHandler()
        handler.setFormatter(logging.Formatter(_FORMAT))
        root.addHandler(handler)
    root.setLevel(getattr(logging, LOG_LEVEL, logging.INFO))
    root.propagate = False
    _configured = True


def get_logger(name: str) -> logging.Logger:
    """Logger under the `skyrme` namespace, configured once per process."""
    _configure_root()
    if not name.startswith("skyrme"):
        name = f"skyrme.{name}"
    return logging.getLogger(name)
