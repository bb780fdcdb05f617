from functools import lru_cache
from pydantic_settings import BaseSettings


class Settings(BaseSettings):
    env: str = "dev"
    threads: int = 1
    sweep_max_degree: int = 200
    h0_max_unknowns: int = 250000
    interpolation_samples: int = 7
    log_level: str = "WARNING"
    log_json: bool = True
    tool_version: str = "0.3.0"

    class Config:
        env_prefix = "HYPERCERT_"


@lru_cache
def get_settings() -> Settings:
    return Settings()
