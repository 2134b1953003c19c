"""Service configuration: defaults < config file < environment < explicit flags."""

from __future__ import annotations

import json
import os
from typing import Mapping

from pydantic import BaseModel

ENV_PREFIX = "GEOQUORUM_"


class AppConfig(BaseModel):
    shared_key: str = "dev-shared-key"
    replay_window: float = 300.0
    nonce_cache_capacity: int = 100_000
    k: int = 5
    k_city: int | None = None
    k_province: int | None = None
    k_country: int | None = None
    granularity_seconds: int = 86400
    escalation_after: int | None = None
    store_path: str | None = None  # None = in-memory
    catalog_path: str | None = None  # None = packaged default
    host: str = "127.0.0.1"
    port: int = 8200


_INT_FIELDS = {"nonce_cache_capacity", "k", "k_city", "k_province", "k_country",
               "granularity_seconds", "escalation_after", "port"}
_FLOAT_FIELDS = {"replay_window"}


def load_config(path: str | None = None, env: Mapping[str, str] | None = None,
                overrides: Mapping[str, object] | None = None) -> AppConfig:
    values: dict[str, object] = {}
    if path is not None:
        with open(path, "r", encoding="utf-8") as f:
            doc = json.load(f)
        if not isinstance(doc, dict):
            raise ValueError("config file must contain a JSON object")
        values.update(doc)
    env = os.environ if env is None else env
    for name in AppConfig.model_fields:
        raw = env.get(ENV_PREFIX + name.upper())
        if raw is None:
            continue
        if name in _INT_FIELDS:
            values[name] = int(raw)
        elif name in _FLOAT_FIELDS:
            values[name] = float(raw)
        else:
            values[name] = raw
    for key, value in (overrides or {}).items():
        if value is not None:
            values[key] = value
    return AppConfig(**values)
