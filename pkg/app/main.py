import logging

from dotenv import load_dotenv

# Load .env file FIRST before any other imports
load_dotenv()

from fastapi import FastAPI  # noqa: E402

from app.api.v1.endpoints import router as api_router  # noqa: E402
from app.core.config import settings  # noqa: E402

logging.basicConfig(level=settings.LOG_LEVEL)
logger = logging.getLogger(__name__)

app = FastAPI(title=settings.PROJECT_NAME, version=settings.TOOL_VERSION)

app.include_router(api_router, prefix="/api/v1")


@app.get("/health")
def health_check():
    return {"status": "ok", "version": settings.TOOL_VERSION}


@app.on_event("startup")
async def startup_event():
    logger.info(f"[STARTUP] {settings.PROJECT_NAME} {settings.TOOL_VERSION} started")
    logger.info(f"[STARTUP] REDIS_URL: {'SET' if settings.REDIS_URL else 'NOT SET (cache off)'}")
    logger.info(f"[STARTUP] SWEEP_WORKERS: {settings.SWEEP_WORKERS}")
