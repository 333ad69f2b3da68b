import os
import subprocess
import sys

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from binpart import kernels

py = kernels.python_backend
cy = kernels.compiled_backend
needs_ext = pytest.mark.skipif(cy is None, reason="compiled extension not built")

items = st.lists(st.integers(1, 100), max_size=200)


def test_python_backend_reference_cases():
    assert py.next_fit([60, 50, 40], 100) == [0, 1, 1]
    assert py.first_fit([50, 70, 20], 100) == [0, 1, 0]
    assert py.best_fit([50, 70, 20], 100) == [0, 1, 1]
    best, w = py.reachable_fills([30, 45], [3, 2], 100)
    assert best == 90 and 30 * w[0] + 45 * w[1] == 90
    idx, status, _ = py.cover_search([2, 3], [(2, 0), (0, 3)], [5, 3], None, 1000)
    assert status == "ok" and sorted(idx) == [0, 1]


@needs_ext
@settings(max_examples=150, deadline=None)
@given(items)
def test_online_kernels_agree(xs):
    for name in ("next_fit", "first_fit", "best_fit"):
        assert getattr(py, name)(xs, 100) == getattr(cy, name)(xs, 100)


@needs_ext
@settings(max_examples=150, deadline=None)
@given(st.lists(st.tuples(st.integers(1, 50), st.integers(0, 6)), min_size=1, max_size=6))
def test_reachable_fills_agree(pairs):
    sizes = [s for s, _ in pairs]
    caps = [c for _, c in pairs]
    assert py.reachable_fills(sizes, caps, 50) == cy.reachable_fills(sizes, caps, 50)


@needs_ext
@settings(max_examples=100, deadline=None)
@given(
    st.lists(st.integers(0, 4), min_size=3, max_size=3),
    st.lists(st.tuples(st.integers(0, 3), st.integers(0, 3), st.integers(0, 3)), min_size=1, max_size=8),
    st.one_of(st.none(), st.integers(0, 8)),
)
def test_cover_search_agrees(demand, configs, depth):
    sizes = [3, 4, 5]
    configs = [c for c in configs if any(c)]
    a = py.cover_search(demand, configs, sizes, depth, 5000)
    b = cy.cover_search(demand, configs, sizes, depth, 5000)
    assert a == b


def _backend_with(env_value):
    env = dict(os.environ, BINPART_PURE_PYTHON=env_value)
    out = subprocess.run(
        [sys.executable, "-c", "from binpart import kernels; print(kernels.BACKEND)"],
        env=env, capture_output=True, text=True, check=True,
    )
    return out.stdout.strip()


def test_env_forces_python_backend():
    assert _backend_with("1") == "python"
    assert _backend_with("0") == ("cython" if cy is not None else "python")


def test_backends_listing():
    names = kernels.backends()
    assert "python" in names
    assert ("cython" in names) == (cy is not None)
