"""Run settings: published defaults, the quick desk-scale preset, key-value config files."""

from __future__ import annotations

from dataclasses import asdict, dataclass, fields, replace
from importlib import resources
from pathlib import Path

QUICK = {"runs": 10, "pop": 100, "budget": 5000}
MA_BUDGET_FRACTION = 0.9  # 18,000 of 20,000 evaluations

# config-file spellings accepted in addition to the field names
ALIASES = {
    "p_ls": "pls",
    "p_em": "pem",
    "risk_free_rate": "risk_free",
    "pop_size": "pop",
    "eval_budget": "budget",
    "seed_base": "seed",
    "crossover_rate": "px",
    "mutation_rate": "pm",
}


@dataclass(frozen=True)
class Settings:
    prices: str | None = None
    delimiter: str = ","
    risk_free: float = 0.0
    pop: int = 400
    budget: int = 20_000
    ma_budget: int | None = None
    k: int = 18
    px: float = 0.8
    pm: float = 0.005
    sbx_eta: float = 0.0
    pm_eta: float = 20.0
    pls: float = 1.0
    pem: float = 1.0
    ig: int = 0
    fg: int = 40
    theta: int = 30
    ls_budget: int = 4
    ls_share: float = 0.1
    runs: int = 30
    seed: int = 0
    workers: int = 1
    out: str = "results"

    @property
    def effective_ma_budget(self) -> int:
        if self.ma_budget is not None:
            return self.ma_budget
        return int(round(MA_BUDGET_FRACTION * self.budget))

    @property
    def horizon(self) -> int:
        """Nominal generation count of a baseline run; the window scale."""
        return self.budget // self.pop

    def dataset(self) -> str:
        return self.prices if self.prices else str(bundled_dataset())

    def as_dict(self) -> dict:
        return asdict(self)


def bundled_dataset() -> Path:
    return Path(str(resources.files("epochma") / "data" / "synthetic_20.csv"))


def _coerce(name: str, raw):
    kinds = {f.name: f.type for f in fields(Settings)}
    kind = kinds[name]
    if raw is None or not isinstance(raw, str):
        return raw
    if "int" in kind:
        return int(float(raw)) if raw.strip().lower() not in ("none", "") else None
    if "float" in kind:
        return float(raw)
    return raw


def parse_config_text(text: str) -> dict:
    """``key = value`` lines; ``#`` starts a comment; quotes around values are optional."""
    known = {f.name for f in fields(Settings)}
    out = {}
    for lineno, line in enumerate(text.splitlines(), start=1):
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ValueError(f"config line {lineno}: expected key = value")
        key, value = (s.strip() for s in line.split("=", 1))
        key = ALIASES.get(key.replace("-", "_"), key.replace("-", "_"))
        if key not in known:
            raise ValueError(f"config line {lineno}: unknown key {key!r}")
        out[key] = _coerce(key, value.strip("'\""))
    return out


def load_config(path) -> dict:
    return parse_config_text(Path(path).read_text())


def build_settings(quick: bool = False, file_values: dict | None = None, overrides: dict | None = None) -> Settings:
    """Defaults < quick preset < config file < explicit overrides."""
    s = Settings()
    if quick:
        s = replace(s, **QUICK)
    if file_values:
        s = replace(s, **file_values)
    if overrides:
        s = replace(s, **{k: _coerce(k, v) for k, v in overrides.items() if v is not None})
    return s
