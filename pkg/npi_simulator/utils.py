import hashlib
import json
import logging
import os
import yaml
from logging import config


def setup_logging(
    log_path="logging.yaml",
    log_level=logging.INFO,
    env_key="LOGGING_CONFIG_FILE",
):
    """
    :param log_path: default logging config file
    :param log_level: level used when no config file is found
    :param env_key: env var overriding the config file path
    """
    log_value = os.getenv(env_key, None)
    if log_value:
        log_path = log_value
    if os.path.exists(log_path):
        with open(log_path) as fh:
            log_config = yaml.safe_load(fh.read())
        for handler in log_config.get("handlers", {}).values():
            filename = handler.get("filename")
            if filename:
                os.makedirs(os.path.dirname(filename) or ".", exist_ok=True)
        config.dictConfig(log_config)
        logging.getLogger(__name__).debug("Logging configured with config file!")
    else:
        logging.basicConfig(
            format="%(asctime)-15s %(levelname)-4s %(threadName)s %(message)s",
            level=log_level,
        )
        logging.getLogger(__name__).debug("Logging configured with default attributes!")


def canonical_json(document) -> str:
    return json.dumps(document, sort_keys=True, separators=(",", ":"))


def content_hash(document) -> bytes:
    """32-byte sha256 digest of the canonical JSON rendering."""
    return hashlib.sha256(canonical_json(document).encode("utf-8")).digest()


def derive_seed(seed: int, *keys: int) -> int:
    """Deterministic 64-bit child seed, e.g. seed_k = hash(seed, P_k) for sweeps."""
    payload = ":".join(str(int(value)) for value in (seed, *keys)).encode("ascii")
    return int.from_bytes(hashlib.sha256(payload).digest()[:8], "little")


def float_list(values) -> list[float]:
    return [float(value) for value in values]
