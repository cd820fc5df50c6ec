import sys
import importlib
from pathlib import Path
import pytest


@pytest.fixture(autouse=True)
def isolate_xdg_dirs(monkeypatch, tmp_path):
    # Ensure the package src/ is importable even without an editable install
    repo_root = Path(__file__).resolve().parents[1]
    src_dir = repo_root / "src"
    if str(src_dir) not in sys.path:
        sys.path.insert(0, str(src_dir))

    # Isolate XDG directories per-test to avoid touching real user files
    monkeypatch.setenv("XDG_CONFIG_HOME", str(tmp_path / "cfg"))
    monkeypatch.setenv("XDG_DATA_HOME", str(tmp_path / "data"))
    monkeypatch.delenv("BRICKQEC_VERBOSE", raising=False)

    # Reload the config module so CONFIG_DIR picks up XDG_CONFIG_HOME
    if "brickqec.core.config" in sys.modules:
        importlib.reload(sys.modules["brickqec.core.config"])  # type: ignore[arg-type]
    else:
        import brickqec.core.config  # noqa: F401

    from brickqec.utils import libw
    libw._app_cfg.cache_clear()

    yield


@pytest.fixture
def make_code():
    """make_code(n, r, d, seed=0, variant="standard") -> (encoded code, circuit)."""
    def _make(n, r, d, seed=0, variant="standard"):
        from brickqec.core.codes import CodeParams, sample_code
        from brickqec.utils.seeding import STREAM_CODE, rng_for

        params = CodeParams(n, r, d, variant, seed)
        return sample_code(params, rng_for(seed, STREAM_CODE))

    return _make


@pytest.fixture
def random_small_code():
    """Encoded code on a handful of qubits without boundary padding, for oracle checks."""
    def _make(n_phys, k, d, seed):
        import numpy as np
        from brickqec.core.codes import build_initial_code, encode, sample_circuit_standard

        rng = np.random.default_rng(seed)
        init = build_initial_code(n_phys, k, rng)
        return encode(init, sample_circuit_standard(n_phys, d, rng))

    return _make
