import os
import sys

import pytest
from hypothesis import settings

from nls_scatter.config import TOL_ENV, figure_config

# fixed example sequence: numeric properties should not flake between runs
settings.register_profile("repo", derandomize=True, deadline=None)
settings.load_profile("repo")


@pytest.fixture(autouse=True)
def _no_seed_override(monkeypatch):
    # a stray NLS_SEED_TOL in the caller's shell would loosen every fixture
    monkeypatch.delenv(TOL_ENV, raising=False)


@pytest.fixture
def figure():
    """figure(n, **overrides) -> SweepSpec for the built-in fixture n."""
    def make(n, **kw):
        return figure_config(n, **kw).sweep
    return make


@pytest.fixture
def run_cli(tmp_path):
    """Run ``python -m nls_scatter`` in a subprocess, returning CompletedProcess."""
    import subprocess

    def run(*args, env=None):
        full_env = dict(os.environ)
        full_env.pop(TOL_ENV, None)
        full_env.update(env or {})
        return subprocess.run([sys.executable, "-m", "nls_scatter", *map(str, args)],
                              capture_output=True, text=True, cwd=tmp_path, env=full_env)
    return run
