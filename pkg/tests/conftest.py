import functools

import pytest

from qsgkz.arrangement import face_complex
from qsgkz.instances import BUNDLED, bundled_config

ACCEPTANCE = {}


@functools.lru_cache(maxsize=None)
def cached_config(name):
    return bundled_config(name)


@functools.lru_cache(maxsize=None)
def cached_complex(name):
    return face_complex(cached_config(name))


@pytest.fixture(params=BUNDLED)
def corpus_name(request):
    return request.param


def record(number, ok, detail):
    ACCEPTANCE[number] = (ok, detail)


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for k in sorted(ACCEPTANCE):
        ok, detail = ACCEPTANCE[k]
        terminalreporter.write_line(f"criterion {k:2d}: {'PASS' if ok else 'FAIL'}  {detail}")
