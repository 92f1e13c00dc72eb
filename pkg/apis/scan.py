import asyncio
import json
import math
from typing import Optional

from fastapi import APIRouter
from fastapi.responses import JSONResponse
from pydantic import BaseModel, Field

from skyrme.errors import SkyrmeError
from skyrme.verify import MIN_SCAN_RESOLUTION, Lemma1Scan, corollary1_scan, lemma1_scan

from .common import to_http

router = APIRouter(prefix="/scan", tags=["scan"])


class Lemma1In(BaseModel):
    r_max: float = Field(0.5, gt=0, le=0.5, description="largest radius scanned")
    beta_max: float = Field(20 * math.pi, ge=math.pi, le=200 * math.pi)
    resolution: int = Field(MIN_SCAN_RESOLUTION, description=f"samples per pi, >= {MIN_SCAN_RESOLUTION}")
    r_samples: int = Field(64, ge=1, le=1024)
    workers: Optional[int] = Field(None, ge=1, le=64)


class Corollary1In(BaseModel):
    r0: float = Field(..., gt=0, le=0.5, description="radius from a lemma1 scan")
    z_max: float = Field(8 * math.pi, gt=0)
    resolution: int = Field(512, ge=2, le=4096)
    workers: Optional[int] = Field(None, ge=1, le=64)


@router.post("/lemma1", response_model=Lemma1Scan)
async def scan_lemma1(q: Lemma1In):
    try:
        return await asyncio.to_thread(lemma1_scan, q.r_max, q.beta_max, q.resolution,
                                       q.r_samples, workers=q.workers)
    except SkyrmeError as e:
        raise to_http(e)


@router.post("/corollary1")
async def scan_corollary1(q: Corollary1In):
    try:
        report = await asyncio.to_thread(corollary1_scan, q.r0, q.z_max, q.resolution,
                                         workers=q.workers)
    except SkyrmeError as e:
        raise to_http(e)
    return JSONResponse(json.loads(report.to_json()))
