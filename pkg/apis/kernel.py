from fastapi import APIRouter, Query
from pydantic import BaseModel

from skyrme import kernel
from skyrme.errors import SkyrmeError

from .common import to_http

router = APIRouter(prefix="/kernel", tags=["kernel"])


class FtildeOut(BaseModel):
    i: int
    x: float
    value: float


@router.get("/ftilde", response_model=FtildeOut)
def ftilde(i: int = Query(..., description="function index 0..4"),
           x: float = Query(..., description="argument; F~_i is even in x")):
    try:
        value = kernel.eval_Ftilde(i, x)
    except SkyrmeError as e:
        raise to_http(e)
    return FtildeOut(i=i, x=x, value=value)
