"""Periodic spin chain experiment: configuration, energy series, convergence study.

Configuration files are flat ``key = value`` text with ``#`` comments, e.g.::

    n = 30
    L = 30
    masses = 1
    U0 = 1
    r_m = 1
    J0 = 10
    r_c = 1.5
    h = 0.01
    t_end = 100
    stride = 10
    output = energies.dat

``masses`` is one number or a comma separated list with one entry per
particle. ``initial`` is ``twisted`` (the default) or the path of a state file
with rows ``q p w1 w2 w3``.
"""

from __future__ import annotations

import dataclasses
import math
from dataclasses import dataclass
from pathlib import Path
from typing import NamedTuple, Sequence

import numpy as np

from spinlattice.geometry import SpinLatticeState, normalize_spins
from spinlattice.integrator import SolverSettings, integrate
from spinlattice.model import SleChainModel

__all__ = [
    "ConfigError",
    "ExperimentConfig",
    "EnergyRecord",
    "SimulationResult",
    "ConvergenceResult",
    "twisted_initial_state",
    "load_state",
    "save_state",
    "simulate",
    "write_energy_file",
    "converge",
    "write_error_file",
    "loglog_slope",
    "FLOAT_FORMAT",
]

# 17 significant digits round-trip a double exactly
FLOAT_FORMAT = "%.16e"


class ConfigError(ValueError):
    pass


_KEYS = {
    "n": ("n", int),
    "L": ("period", float),
    "masses": ("masses", None),
    "mass": ("masses", None),
    "U0": ("u0", float),
    "r_m": ("r_m", float),
    "J0": ("j0", float),
    "r_c": ("r_c", float),
    "h": ("h", float),
    "t_end": ("t_end", float),
    "stride": ("stride", int),
    "output": ("output", str),
    "fp_tolerance": ("fp_tolerance", float),
    "max_iterations": ("max_iterations", int),
    "initial": ("initial", str),
}


@dataclass(frozen=True)
class ExperimentConfig:
    """Parameters of a chain run. Defaults are the reference chain setup with ``h = 0.01``."""

    n: int = 30
    period: float = 30.0
    masses: float | tuple[float, ...] = 1.0
    u0: float = 1.0
    r_m: float = 1.0
    j0: float = 10.0
    r_c: float = 1.5
    h: float = 0.01
    t_end: float = 100.0
    stride: int = 10
    output: str = "energies.dat"
    fp_tolerance: float = 1e-12
    max_iterations: int = 200
    initial: str = "twisted"

    def __post_init__(self):
        if self.n < 2:
            raise ConfigError("n must be at least 2")
        for name in ("period", "u0", "r_m", "r_c", "h"):
            if not getattr(self, name) > 0:
                raise ConfigError(f"{name} must be positive")
        if self.j0 < 0:
            raise ConfigError("J0 must be nonnegative")
        if self.t_end < 0:
            raise ConfigError("t_end must be nonnegative")
        if self.stride < 1:
            raise ConfigError("stride must be at least 1")
        masses = np.atleast_1d(np.asarray(self.masses, dtype=float))
        if masses.size not in (1, self.n) or np.any(masses <= 0):
            raise ConfigError("masses must be positive, one value or one per particle")

    @classmethod
    def parse(cls, text: str, base: Path | None = None) -> ExperimentConfig:
        values: dict = {}
        for lineno, raw in enumerate(text.splitlines(), start=1):
            line = raw.split("#", 1)[0].strip()
            if not line:
                continue
            if "=" not in line:
                raise ConfigError(f"line {lineno}: expected 'key = value'")
            key, value = (s.strip() for s in line.split("=", 1))
            if key not in _KEYS:
                raise ConfigError(f"line {lineno}: unknown key {key!r}")
            field, conv = _KEYS[key]
            try:
                if field == "masses":
                    parts = [float(x) for x in value.replace(",", " ").split()]
                    values[field] = parts[0] if len(parts) == 1 else tuple(parts)
                else:
                    values[field] = conv(value)
            except (ValueError, IndexError):
                raise ConfigError(f"line {lineno}: bad value {value!r} for {key}") from None
        if base is not None and values.get("initial", "twisted") != "twisted":
            values["initial"] = str(base / values["initial"])
        return cls(**values)

    @classmethod
    def from_file(cls, path) -> ExperimentConfig:
        path = Path(path)
        return cls.parse(path.read_text(), base=path.parent)

    def replace(self, **changes) -> ExperimentConfig:
        return dataclasses.replace(self, **changes)

    def model(self) -> SleChainModel:
        return SleChainModel(
            n=self.n,
            period=self.period,
            masses=np.asarray(self.masses, dtype=float),
            u0=self.u0,
            r_m=self.r_m,
            j0=self.j0,
            r_c=self.r_c,
        )

    def settings(self, h: float | None = None) -> SolverSettings:
        return SolverSettings(self.h if h is None else h, self.fp_tolerance, self.max_iterations)

    def initial_state(self) -> SpinLatticeState:
        if self.initial == "twisted":
            return twisted_initial_state(self.n)
        state = load_state(self.initial)
        if state.n_spins != self.n:
            raise ConfigError(f"{self.initial} has {state.n_spins} particles, config says {self.n}")
        return state


def twisted_initial_state(n: int) -> SpinLatticeState:
    """Particles at ``q_k = k`` at rest, spins twisted by two Fourier modes.

    For ``k = 1..n`` the spin direction is
    ``(0.8 cos(2 pi k/n) + 0.5 sin(4 pi k/n), 0.8 sin(2 pi k/n) + 0.5 cos(4 pi k/n), 1)``
    scaled to unit length.
    """
    if n < 2:
        raise ValueError("n must be at least 2")
    k = np.arange(1, n + 1, dtype=float)
    t = 2.0 * np.pi * k / n
    spins = np.stack(
        [0.8 * np.cos(t) + 0.5 * np.sin(2 * t), 0.8 * np.sin(t) + 0.5 * np.cos(2 * t), np.ones(n)],
        axis=1,
    )
    return SpinLatticeState.from_arrays(normalize_spins(spins), k, np.zeros(n))


def load_state(path) -> SpinLatticeState:
    """Read rows ``q p w1 w2 w3``. Spins are used as given."""
    try:
        data = np.loadtxt(path, ndmin=2, comments="#")
    except ValueError as exc:
        raise ConfigError(f"{path}: {exc}") from None
    if data.shape[1] != 5:
        raise ConfigError(f"{path}: expected 5 columns (q p w1 w2 w3), got {data.shape[1]}")
    return SpinLatticeState.from_arrays(data[:, 2:], data[:, 0], data[:, 1])


def save_state(path, state: SpinLatticeState) -> None:
    data = np.column_stack([state.q, state.p, state.spins])
    np.savetxt(path, data, fmt=FLOAT_FORMAT, header="q p w1 w2 w3")


class EnergyRecord(NamedTuple):
    T: float
    Hmag: float
    Hpot: float
    Hkin: float

    @property
    def Htot(self) -> float:
        return self.Hmag + self.Hpot + self.Hkin


@dataclass(frozen=True, eq=False)
class SimulationResult:
    records: list[EnergyRecord]
    final_state: SpinLatticeState
    max_iterations: int

    @property
    def max_energy_deviation(self) -> float:
        """Largest ``|H(t) - H(0)|`` over the recorded rows (so it depends on the stride)."""
        h0 = self.records[0].Htot
        return max(abs(r.Htot - h0) for r in self.records)

    def swings(self) -> dict[str, float]:
        arr = np.array([r[1:] for r in self.records])
        spread = arr.max(axis=0) - arr.min(axis=0)
        return dict(zip(("Hmag", "Hpot", "Hkin"), spread.tolist()))


def simulate(config: ExperimentConfig) -> SimulationResult:
    model = config.model()
    records: list[EnergyRecord] = []

    def observe(t, state, energies):
        records.append(EnergyRecord(t, energies.magnetic, energies.potential, energies.kinetic))

    result = integrate(
        model, config.initial_state(), config.settings(), config.t_end, observe, config.stride
    )
    return SimulationResult(records, result.state, result.max_iterations)


def write_energy_file(path, records: Sequence[EnergyRecord]) -> None:
    np.savetxt(
        path, np.array(records, dtype=float).reshape(-1, 4), fmt=FLOAT_FORMAT,
        header="T Hmag Hpot Hkin", comments="",
    )


@dataclass(frozen=True, eq=False)
class ConvergenceResult:
    h: np.ndarray
    err: np.ndarray
    reference_h: float

    @property
    def slope(self) -> float:
        return loglog_slope(self.h, self.err)


def loglog_slope(h, err) -> float:
    """Least-squares slope of ``log err`` against ``log h`` (zero errors skipped)."""
    h = np.asarray(h, dtype=float)
    err = np.asarray(err, dtype=float)
    keep = err > 0
    if keep.sum() < 2:
        return math.nan
    return float(np.polyfit(np.log(h[keep]), np.log(err[keep]), 1)[0])


def converge(
    config: ExperimentConfig, h_list: Sequence[float], reference_h: float
) -> ConvergenceResult:
    """Pseudo-errors at ``t_end`` against a run with the finer step ``reference_h``.

    The error is the Euclidean norm of the difference of the concatenated
    ``(w, q, p)`` vectors.
    """
    h_list = [float(h) for h in h_list]
    if any(reference_h > h for h in h_list):
        raise ConfigError("reference step must not exceed any step in the list")
    model = config.model()
    start = config.initial_state()

    def final(h):
        return integrate(model, start, config.settings(h), config.t_end).state.flatten()

    ref = final(reference_h)
    errs = [0.0 if h == reference_h else float(np.linalg.norm(final(h) - ref)) for h in h_list]
    return ConvergenceResult(np.array(h_list), np.array(errs), reference_h)


def write_error_file(path, result: ConvergenceResult) -> None:
    np.savetxt(
        path, np.column_stack([result.h, result.err]), fmt=FLOAT_FORMAT,
        header="H Err", comments="",
    )
