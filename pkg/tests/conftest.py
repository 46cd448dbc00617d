from __future__ import annotations

import pytest

from hopqg.context import AnnotatedContext
from hopqg.graph import build_context_graph

from util import film_context_doc, film3_context_doc, remake_context_doc, star_context_doc


@pytest.fixture
def film_ctx() -> AnnotatedContext:
    return AnnotatedContext.from_json(film_context_doc())


@pytest.fixture
def film_graph(film_ctx):
    return build_context_graph(film_ctx)


@pytest.fixture
def film3_ctx() -> AnnotatedContext:
    return AnnotatedContext.from_json(film3_context_doc())


@pytest.fixture
def star_ctx() -> AnnotatedContext:
    return AnnotatedContext.from_json(star_context_doc())


@pytest.fixture
def remake_ctx() -> AnnotatedContext:
    return AnnotatedContext.from_json(remake_context_doc())
