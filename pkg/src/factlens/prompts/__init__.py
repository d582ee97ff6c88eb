"""Version-pinned prompt templates, shipped as auditable text assets."""

from functools import lru_cache
from importlib import resources


@lru_cache(maxsize=None)
def load_template(name: str) -> str:
    return resources.files(__package__).joinpath(f"{name}.txt").read_text(encoding="utf-8")
