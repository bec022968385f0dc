import os
from pydantic_settings import BaseSettings

class Settings(BaseSettings):
    PROJECT_NAME: str = "LESA Designer"
    TOOL_VERSION: str = "0.3.0"
    OUTPUT_DIR: str = os.getenv("OUTPUT_DIR", "out")
    # Empty disables result caching
    REDIS_URL: str = os.getenv("REDIS_URL", "")
    CACHE_TTL: int = int(os.getenv("CACHE_TTL", "3600"))
    LOG_LEVEL: str = os.getenv("LOG_LEVEL", "INFO")
    SWEEP_WORKERS: int = int(os.getenv("SWEEP_WORKERS", "1"))

    class Config:
        env_file = ".env"
        extra = "ignore"

settings = Settings()
