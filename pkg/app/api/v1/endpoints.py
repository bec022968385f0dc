import asyncio
import logging
import traceback

from fastapi import APIRouter, HTTPException, Query, Response

from app.core.errors import ConfigError, NumericError
from app.core.fixtures import load_fixture
from app.models.report import RunRequest
from app.services.cache import ResultCache
from app.services.config_parser import parse_config
from app.services.pipeline import DesignPipeline

logger = logging.getLogger(__name__)

router = APIRouter()


async def _run(command: str, request: RunRequest, engine: str = "cm") -> Response:
    """
    Parse the request config, serve from Redis if cached, otherwise run the
    command in a worker thread and cache the serialized bundle.
    """
    try:
        text = load_fixture(request.fixture) if request.fixture else request.config
        pipeline = DesignPipeline(parse_config(text, request.overrides))
    except ConfigError as e:
        raise HTTPException(status_code=422, detail=str(e))

    cache = ResultCache()
    key = cache.key(command, pipeline.hash, engine if command == "gain" else None)
    try:
        cached = await cache.get(key)
        if cached:
            return Response(content=cached, media_type="application/json", headers={"X-Source": "cache"})

        loop = asyncio.get_running_loop()
        bundle = await loop.run_in_executor(None, lambda: pipeline.run(command, engine=engine))
        payload = bundle.model_dump_json()
        await cache.set(key, payload)
        logger.info(f"[API] {command} done (config {pipeline.hash[:12]})")
        return Response(content=payload, media_type="application/json", headers={"X-Source": "fresh"})
    except ConfigError as e:
        raise HTTPException(status_code=422, detail=str(e))
    except NumericError as e:
        raise HTTPException(status_code=409, detail=f"{type(e).__name__}: {e}")
    except Exception as e:
        logger.error(f"[API] {command} failed: {e}")
        traceback.print_exc()
        raise HTTPException(status_code=500, detail=str(e))
    finally:
        await cache.close()


@router.post("/synth")
async def synth(request: RunRequest):
    """Component values, couplings, J_PA and snake bias."""
    return await _run("synth", request)


@router.post("/gain")
async def gain(request: RunRequest, engine: str = Query("cm", pattern="^(cm|abcd)$")):
    """Gain trace and band metrics from the coupled-mode or circuit engine."""
    return await _run("gain", request, engine)


@router.post("/compress")
async def compress(request: RunRequest):
    return await _run("compress", request)


@router.post("/imd")
async def imd(request: RunRequest):
    return await _run("imd", request)
