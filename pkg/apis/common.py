from fastapi import HTTPException

from skyrme.errors import ConfigError, ContractError, DomainError, QuadratureError, SkyrmeError


def to_http(exc: SkyrmeError) -> HTTPException:
    """400 for bad input, 500 when the numerics themselves gave up."""
    if isinstance(exc, (DomainError, ContractError, ConfigError)):
        return HTTPException(status_code=400, detail=str(exc))
    if isinstance(exc, QuadratureError):
        return HTTPException(status_code=500, detail=f"Quadrature error: {exc}")
    return HTTPException(status_code=500, detail=str(exc))
