"""Bundled example knowledge bases (``geometry``, ``numbers``, ``ints``, ``vehicles``, ``mixed``)."""

from __future__ import annotations

from importlib import resources

from .kb import KnowledgeBase
from .parser import parse_document

NAMES = ("geometry", "numbers", "ints", "vehicles", "mixed")


def demo_path(name: str):
    if name not in NAMES:
        raise KeyError(f"no demo knowledge base named {name!r}")
    return resources.files("okb") / "data" / f"{name}.kb"


def demo_text(name: str) -> str:
    return demo_path(name).read_text(encoding="utf-8")


def load_demo(name: str) -> KnowledgeBase:
    return parse_document(demo_text(name))
