"""System configuration and the key-value config file format.

A config file is plain text, one ``key = value`` assignment per line, with
``#`` comments. The recognized keys are exactly:

    n_p, n_f, n_c, t_c_ns, k_users, energies_db, noise_sigma2, mode,
    n_h, delta_chips, mhp_orders, seed

Lists (energies_db, mhp_orders) are comma separated. Energies are received
energies per user in dB relative to user 1's unit energy.
"""

from __future__ import annotations

from dataclasses import dataclass, field, replace

import numpy as np

from .errors import ConfigError, ParameterError

MODE_STORED = "sr"
MODE_TRANSMITTED = "tr"

CONFIG_KEYS = ("n_p", "n_f", "n_c", "t_c_ns", "k_users", "energies_db",
               "noise_sigma2", "mode", "n_h", "delta_chips", "mhp_orders",
               "seed")


@dataclass
class SystemConfig:
    """Static description of the multi-user link.

    Frame time is t_f = n_c * t_c and a symbol spans n_f frames. Each frame
    carries one pulse whose type cycles modulo n_p. In "tr" mode frames are
    organized in reference/data pairs separated by delta_chips chips.
    """

    n_p: int
    n_f: int
    n_c: int
    t_c: float
    k_users: int
    energies_db: tuple
    noise_sigma2: float
    mode: str
    n_h: int
    delta_chips: int
    mhp_orders: tuple
    seed: int
    samples_per_chip: int = 64

    def __post_init__(self) -> None:
        self.energies_db = tuple(float(e) for e in self.energies_db)
        self.mhp_orders = tuple(int(o) for o in self.mhp_orders)
        for name in ("n_p", "n_f", "n_c", "k_users", "n_h", "delta_chips",
                     "samples_per_chip"):
            v = getattr(self, name)
            if not isinstance(v, (int, np.integer)) or isinstance(v, bool):
                raise ConfigError(f"{name} must be an integer")
        if self.n_p < 1:
            raise ConfigError("n_p must be >= 1")
        if self.n_f < 1:
            raise ConfigError("n_f must be >= 1")
        if self.n_c < 1:
            raise ConfigError("n_c must be >= 1")
        if not self.t_c > 0:
            raise ConfigError("t_c_ns must be positive")
        if self.k_users < 1:
            raise ConfigError("k_users must be >= 1")
        if len(self.energies_db) != self.k_users:
            raise ConfigError(
                f"energies_db needs {self.k_users} entries, "
                f"got {len(self.energies_db)}")
        if self.noise_sigma2 < 0:
            raise ConfigError("noise_sigma2 must be non-negative")
        if self.mode not in (MODE_STORED, MODE_TRANSMITTED):
            raise ConfigError(f"mode must be 'sr' or 'tr', got {self.mode!r}")
        if self.n_f % self.n_p != 0:
            raise ConfigError("n_f must be a multiple of n_p")
        if not 1 <= self.n_h <= self.n_c:
            raise ConfigError("n_h must lie in [1, n_c]")
        if self.mode == MODE_TRANSMITTED:
            # pair structure only exists when each symbol holds an even
            # number of type cycles
            if self.n_f % (2 * self.n_p) != 0:
                raise ConfigError(
                    "tr mode needs n_f to be an even multiple of n_p")
            lo = self.n_p * self.n_c
            hi = (self.n_p + 1) * self.n_c - self.n_h
            if not lo <= self.delta_chips <= hi:
                raise ConfigError(
                    f"delta_chips must lie in [{lo}, {hi}] for this tr config")
        if len(self.mhp_orders) != self.n_p:
            raise ConfigError("mhp_orders must list exactly n_p orders")
        if not isinstance(self.seed, (int, np.integer)) or self.seed < 0:
            raise ConfigError("seed must be a non-negative integer")
        if self.samples_per_chip < 2:
            raise ConfigError("samples_per_chip must be >= 2")

    @property
    def t_f(self) -> float:
        return self.n_c * self.t_c

    @property
    def t_s(self) -> float:
        return self.n_f * self.t_f

    @property
    def dt(self) -> float:
        return self.t_c / self.samples_per_chip

    @property
    def energies(self) -> np.ndarray:
        """Linear received energies per user."""
        return 10.0 ** (np.asarray(self.energies_db) / 10.0)

    @property
    def frames_per_symbol_per_type(self) -> int:
        return self.n_f // self.n_p

    @property
    def th_alphabet(self) -> int:
        """Size of the time-hopping alphabet actually drawn from."""
        return self.n_c if self.mode == MODE_STORED else self.n_h

    @property
    def reference_separation(self) -> float:
        """Reference-to-data pulse separation in seconds (tr mode)."""
        if self.mode == MODE_STORED:
            return self.n_p * self.t_f
        return self.delta_chips * self.t_c

    def with_noise(self, sigma2: float) -> "SystemConfig":
        return replace(self, noise_sigma2=sigma2)


def _parse_value(key: str, raw: str):
    raw = raw.strip()
    try:
        if key in ("energies_db",):
            return tuple(float(x) for x in raw.split(","))
        if key in ("mhp_orders",):
            return tuple(int(x) for x in raw.split(","))
        if key in ("t_c_ns", "noise_sigma2"):
            return float(raw)
        if key == "mode":
            return raw.lower()
        return int(raw)
    except ValueError as exc:
        raise ConfigError(f"could not parse value for key {key!r}: {raw!r}") \
            from exc


def load_config(path, **overrides) -> SystemConfig:
    """Read a config file; keyword overrides replace file values."""
    values = {}
    with open(path) as fh:
        for lineno, line in enumerate(fh, start=1):
            body = line.split("#", 1)[0].strip()
            if not body:
                continue
            if "=" not in body:
                raise ConfigError(f"{path}:{lineno}: expected 'key = value'")
            key, raw = (part.strip() for part in body.split("=", 1))
            if key not in CONFIG_KEYS:
                raise ConfigError(f"{path}:{lineno}: unknown key {key!r}")
            if key in values:
                raise ConfigError(f"{path}:{lineno}: duplicate key {key!r}")
            values[key] = _parse_value(key, raw)
    missing = [k for k in CONFIG_KEYS if k not in values]
    if missing:
        raise ConfigError(f"{path}: missing key {missing[0]!r}")
    values.update(overrides)
    t_c = values.pop("t_c_ns") * 1e-9
    try:
        return SystemConfig(t_c=t_c, **values)
    except ParameterError as exc:
        raise ConfigError(str(exc)) from exc


def save_config(path, cfg: SystemConfig) -> None:
    """Write a config file that round-trips through load_config."""
    lines = [
        f"n_p = {cfg.n_p}",
        f"n_f = {cfg.n_f}",
        f"n_c = {cfg.n_c}",
        f"t_c_ns = {cfg.t_c * 1e9:.12g}",
        f"k_users = {cfg.k_users}",
        "energies_db = " + ", ".join(f"{e:.12g}" for e in cfg.energies_db),
        f"noise_sigma2 = {cfg.noise_sigma2:.12g}",
        f"mode = {cfg.mode}",
        f"n_h = {cfg.n_h}",
        f"delta_chips = {cfg.delta_chips}",
        "mhp_orders = " + ", ".join(str(o) for o in cfg.mhp_orders),
        f"seed = {cfg.seed}",
    ]
    with open(path, "w") as fh:
        fh.write("\n".join(lines) + "\n")
