import asyncio
import json
from typing import Optional

from fastapi import APIRouter
from fastapi.responses import JSONResponse
from pydantic import BaseModel, Field

from skyrme.errors import SkyrmeError
from skyrme.verify import SUITES, SuiteSettings, run_suite

from .common import to_http

router = APIRouter(prefix="/verify", tags=["verify"])


class VerifyIn(BaseModel):
    suite: str = Field(..., description=f"one of {', '.join(SUITES)}")
    seed: int = Field(0, description="seed for the randomized identity samples")
    workers: Optional[int] = Field(None, ge=1, le=64, description="worker threads for scans")


@router.post("")
async def verify(q: VerifyIn):
    settings = SuiteSettings(seed=q.seed, workers=q.workers)
    try:
        report = await asyncio.to_thread(run_suite, q.suite, settings)
    except SkyrmeError as e:
        raise to_http(e)
    # same bytes as the CLI report
    return JSONResponse(json.loads(report.to_json()))
