import shutil
from pathlib import Path

import yaml
from platformdirs import user_config_dir
try:
    from importlib.resources import files
except Exception:  # Python <3.9
    from importlib_resources import files  # type: ignore

from brickqec.utils.libw import verbo, verr, vwarn

DEFAULT_CONFIG = {
    "verbosity": False,
    "progress_bar": True,
    # Decoder limits
    "max_contraction_width": 30,   # open sigma wires across a sweep cut
    "brute_max_checks": 24,        # oracle coset enumeration (2^m terms)
    "brute_ml_max_logicals": 6,    # oracle global ML (4^k classes)
    "brute_ml_max_checks": 20,
    # Monte Carlo
    "default_trials": 20000,
    "paper_trials": 200000,
    "workers": 0,                  # 0 = physical cores
    "bulk_margin_factor": 4,
    "correlation_min_events": 20,
    # Threshold fit
    "bootstrap_resamples": 1000,
    "fit_pc_grid": [0.02, 0.30, 57],
    "fit_nu_grid": [0.3, 3.0, 28],
    # Output
    "csv_float_digits": 8,
}

# (type, lower bound, upper bound) for keys that `validate` range-checks
_RANGES = {
    "max_contraction_width": (int, 1, 40),
    "brute_max_checks": (int, 0, 30),
    "brute_ml_max_logicals": (int, 0, 10),
    "brute_ml_max_checks": (int, 0, 30),
    "default_trials": (int, 1, 10**9),
    "paper_trials": (int, 1, 10**9),
    "workers": (int, 0, 4096),
    "bulk_margin_factor": (int, 0, 64),
    "correlation_min_events": (int, 1, 10**9),
    "bootstrap_resamples": (int, 0, 10**6),
    "csv_float_digits": (int, 1, 17),
}

CONFIG_DIR = Path(user_config_dir("brickqec"))
CONFIG_PATH = CONFIG_DIR / "config.yaml"
_TPL = files("brickqec.defaults").joinpath("default_config.yaml")


def _bootstrap_config_file() -> None:
    """First run: copy the pristine template into the user config dir."""
    if CONFIG_PATH.exists():
        return
    try:
        CONFIG_DIR.mkdir(parents=True, exist_ok=True)
        with _TPL.open("rb") as src, open(CONFIG_PATH, "wb") as dst:
            shutil.copyfileobj(src, dst)
    except OSError as e:
        verr(f"[config] Could not create {CONFIG_PATH}: {e}")


class AppConfig:
    def __init__(self, path: "Path | None" = None):
        self.path = Path(path) if path is not None else CONFIG_PATH
        self.data = {k: (list(v) if isinstance(v, list) else v) for k, v in DEFAULT_CONFIG.items()}
        if path is None:
            _bootstrap_config_file()
        self.load()

    def load(self):
        if self.path.exists():
            with open(self.path, "r") as f:
                user_config = yaml.safe_load(f) or {}
            for k, v in user_config.items():
                if k not in DEFAULT_CONFIG:
                    vwarn(f"[config] Ignoring unknown key: {k}")
                    continue
                self.data[k] = v
        self.validate(quiet=True)

        for k, v in self.data.items():
            setattr(self, k, v)

    def save(self):
        self.path.parent.mkdir(parents=True, exist_ok=True)
        with open(self.path, "w") as f:
            yaml.safe_dump(self.data, f, default_flow_style=False)

    def set(self, key, value):
        if key not in DEFAULT_CONFIG:
            raise KeyError(f"[config] Unknown key: {key}")
        self.data[key] = value
        self.validate(quiet=True)
        setattr(self, key, self.data[key])
        verbo(f"[config] Updated: {key} = {self.data[key]}")

    def validate(self, quiet: bool = False) -> list:
        """Reset malformed values to their defaults; return the reset keys."""
        reset = []
        for key, (typ, lo, hi) in _RANGES.items():
            val = self.data.get(key)
            ok = isinstance(val, typ) and not isinstance(val, bool) and lo <= val <= hi
            if not ok:
                verr(f"[config] Invalid {key}={val!r} (allowed {lo}..{hi}), using {DEFAULT_CONFIG[key]}")
                self.data[key] = DEFAULT_CONFIG[key]
                reset.append(key)
        for key in ("fit_pc_grid", "fit_nu_grid"):
            grid = self.data.get(key)
            try:
                ok = (isinstance(grid, (list, tuple)) and len(grid) == 3
                      and 0 < float(grid[0]) < float(grid[1]) and int(grid[2]) >= 2)
            except (TypeError, ValueError):
                ok = False
            if not ok:
                verr(f"[config] Invalid {key}={grid!r}, using {DEFAULT_CONFIG[key]}")
                self.data[key] = list(DEFAULT_CONFIG[key])
                reset.append(key)
        for key in ("verbosity", "progress_bar"):
            if not isinstance(self.data.get(key), bool):
                self.data[key] = DEFAULT_CONFIG[key]
                reset.append(key)
        if not quiet:
            print("[config] Validation complete." + (f" Reset: {', '.join(reset)}" if reset else ""))
        return reset

    def print_summary(self):
        print("[config] Current Settings:")
        for k, v in self.data.items():
            print(f"  {k}: {v}")


# Global singleton holder (defined after AppConfig)
_APP_CONFIG = None

def get_config() -> AppConfig:
    """Return the shared AppConfig instance (create on first call)."""
    global _APP_CONFIG
    if _APP_CONFIG is None:
        _APP_CONFIG = AppConfig()
    return _APP_CONFIG
