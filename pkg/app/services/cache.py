"""
Redis Cache Service.
Caches serialized report bundles keyed by command and config hash.
Disabled when REDIS_URL is empty; Redis failures never fail a request.
"""
import logging
from typing import Optional

import redis.asyncio as redis

from app.core.config import settings

logger = logging.getLogger(__name__)


class ResultCache:
    """Redis result cache with a TTL of settings.CACHE_TTL seconds."""

    def __init__(self, url: Optional[str] = None, ttl: Optional[int] = None):
        url = settings.REDIS_URL if url is None else url
        self.redis = redis.from_url(url, decode_responses=True) if url else None
        self.ttl = ttl if ttl is not None else settings.CACHE_TTL

    @property
    def enabled(self) -> bool:
        return self.redis is not None

    @staticmethod
    def key(command: str, config_hash: str, engine: Optional[str] = None) -> str:
        suffix = f":{engine}" if engine else ""
        return f"lesa:{command}{suffix}:{config_hash}"

    async def get(self, key: str) -> Optional[str]:
        if not self.enabled:
            return None
        try:
            data = await self.redis.get(key)
            if data:
                logger.info(f"[Cache] HIT: {key}")
            return data
        except Exception as e:
            logger.warning(f"[Cache] Redis get error: {e}")
        return None

    async def set(self, key: str, payload: str) -> None:
        if not self.enabled:
            return
        try:
            await self.redis.setex(key, self.ttl, payload)
            logger.info(f"[Cache] SET: {key} (TTL: {self.ttl}s)")
        except Exception as e:
            logger.warning(f"[Cache] Redis set error: {e}")

    async def close(self) -> None:
        if self.enabled:
            await self.redis.close()
