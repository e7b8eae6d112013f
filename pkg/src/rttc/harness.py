"""Experiment harness: seeded instances, sweeps, and frequency tables.

An instance follows the synthetic protocol of the phase-transition studies:
a random rank-r TT tensor with standard Gaussian cores is projected onto
random orthonormal side-information bases on the first ``l`` modes
(identity elsewhere), training and test entries are drawn uniformly without
replacement (the test set independently, the same size, overlap allowed),
and the initial guess is an independent random rank-r tensor projected the
same way.  The ``rttc`` baseline ignores the bases but sees the identical
instance and initial guess.

Sweep results go to CSV with the frozen schema

    d,N,M,r,l,omega,trial,seed,algorithm,converged,test_rel_err,iters,seconds

(one row per cell and trial; schema version in a leading comment line).
Bodies are byte-identical across reruns with the same config and seed,
except for the wall-clock ``seconds`` column.  Per-trial seeds are
``derive_seed(base_seed, "instance", d, N, M, r, l, omega, trial)``; the
algorithm is deliberately not part of the hash so both algorithms run on
identical instances.
"""

from __future__ import annotations

import csv
import itertools
import json
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from math import prod
from pathlib import Path
from typing import Optional

import numpy as np

from .rng import derive_seed
from .samples import SparseSamples, sample_indices
from .sideinfo import SideInfo, orthonormal_basis, project_side
from .solver import CompletionProblem, SolveReport, SolverConfig, solve
from .tt import entries, tt_random

SCHEMA_LINE = "# rttc sweep schema v1"
CSV_COLUMNS = ("d", "N", "M", "r", "l", "omega", "trial", "seed", "algorithm",
               "converged", "test_rel_err", "iters", "seconds")

SUMMARY_SCHEMA_LINE = "# rttc summary schema v1"
SUMMARY_COLUMNS = ("d", "N", "M", "r", "l", "omega", "algorithm", "trials", "frequency")

_AXIS_KEYS = ("d", "N", "M", "r", "l", "omega", "algorithm")


@dataclass(frozen=True)
class InstanceSpec:
    """Parameters of one synthetic completion instance."""

    d: int
    N: int
    r: int
    M: int
    l: int
    omega_size: int
    seed: int

    def __post_init__(self):
        if self.d < 1:
            raise ValueError(f"d must be positive, got {self.d}")
        if not 1 <= self.M <= self.N:
            raise ValueError(f"need 1 <= M <= N, got M={self.M}, N={self.N}")
        if not 0 <= self.l <= self.d:
            raise ValueError(f"need 0 <= l <= d, got l={self.l}")
        if self.omega_size < 1:
            raise ValueError(f"omega_size must be positive, got {self.omega_size}")
        if self.omega_size > prod(self.dims):
            raise ValueError(f"omega_size {self.omega_size} exceeds tensor size")

    @property
    def dims(self) -> tuple[int, ...]:
        return (self.N,) * self.d

    @property
    def ranks(self) -> tuple[int, ...]:
        return (1,) + (self.r,) * (self.d - 1) + (1,)


def make_side_info(spec: InstanceSpec) -> SideInfo:
    """Bases for the first l modes, identity for the rest."""
    bases = []
    for k in range(spec.d):
        if k < spec.l:
            bases.append(orthonormal_basis(spec.N, spec.M,
                                           derive_seed(spec.seed, "basis", k)))
        else:
            bases.append(np.eye(spec.N))
    return SideInfo(tuple(bases))


def generate_target(spec: InstanceSpec, side: Optional[SideInfo] = None):
    """The ground-truth tensor: a random rank-r TT pushed through the bases."""
    if side is None:
        side = make_side_info(spec)
    return project_side(side, tt_random(spec.dims, spec.ranks,
                                        derive_seed(spec.seed, "target")))


def generate_instance(spec: InstanceSpec) -> CompletionProblem:
    """Instance generation; a pure function of its parameters (see module docs)."""
    dims, ranks = spec.dims, spec.ranks
    side = make_side_info(spec)
    target = generate_target(spec, side)
    omega = sample_indices(dims, spec.omega_size, derive_seed(spec.seed, "train-idx"))
    gamma = sample_indices(dims, spec.omega_size, derive_seed(spec.seed, "test-idx"))
    train = SparseSamples(dims, omega, entries(target, omega))
    test = SparseSamples(dims, gamma, entries(target, gamma))
    initial = project_side(side, tt_random(dims, ranks, derive_seed(spec.seed, "initial")))
    return CompletionProblem(train=train, test=test, ranks=ranks, side=side,
                             initial=initial)


@dataclass(frozen=True)
class SweepRecord:
    """One completed run, i.e. one CSV row."""

    d: int
    N: int
    M: int
    r: int
    l: int
    omega: int
    trial: int
    seed: int
    algorithm: str
    converged: int
    test_rel_err: float
    iters: int
    seconds: float

    def key(self) -> tuple:
        """Identity of the run within a sweep (seconds and outputs excluded)."""
        return (self.d, self.N, self.M, self.r, self.l, self.omega,
                self.trial, self.algorithm)

    def to_csv_row(self) -> str:
        return ",".join([
            str(self.d), str(self.N), str(self.M), str(self.r), str(self.l),
            str(self.omega), str(self.trial), str(self.seed), self.algorithm,
            str(self.converged), repr(float(self.test_rel_err)), str(self.iters),
            f"{self.seconds:.3f}",
        ])

    @classmethod
    def from_csv_fields(cls, fields: dict) -> "SweepRecord":
        return cls(d=int(fields["d"]), N=int(fields["N"]), M=int(fields["M"]),
                   r=int(fields["r"]), l=int(fields["l"]), omega=int(fields["omega"]),
                   trial=int(fields["trial"]), seed=int(fields["seed"]),
                   algorithm=fields["algorithm"], converged=int(fields["converged"]),
                   test_rel_err=float(fields["test_rel_err"]), iters=int(fields["iters"]),
                   seconds=float(fields["seconds"]))


def run_single(spec: InstanceSpec, config: SolverConfig = SolverConfig(),
               algorithm: str = "rttc-si", trial: int = 0) -> tuple[SweepRecord, SolveReport]:
    """Generate one instance, solve it, and package the record."""
    problem = generate_instance(spec)
    t0 = time.perf_counter()
    report = solve(problem, config, algorithm=algorithm)
    seconds = time.perf_counter() - t0
    record = SweepRecord(
        d=spec.d, N=spec.N, M=spec.M, r=spec.r, l=spec.l, omega=spec.omega_size,
        trial=trial, seed=spec.seed, algorithm=algorithm,
        converged=int(report.converged), test_rel_err=report.final_test_rel,
        iters=report.iterations, seconds=seconds)
    return record, report


@dataclass(frozen=True)
class SweepConfig:
    """Grid definition for a sweep.

    ``axes`` maps parameter names (subset of d, N, M, r, l, omega,
    algorithm) to value lists; the cell order is the cartesian product in
    declaration order.  ``fixed`` supplies the remaining parameters.
    """

    axes: dict
    fixed: dict
    trials: int = 5
    solver: SolverConfig = field(default_factory=SolverConfig)
    base_seed: int = 0
    out: Optional[str] = None

    def __post_init__(self):
        for key in list(self.axes) + list(self.fixed):
            if key not in _AXIS_KEYS:
                raise ValueError(f"unknown sweep parameter {key!r}; "
                                 f"expected one of {_AXIS_KEYS}")
        overlap = set(self.axes) & set(self.fixed)
        if overlap:
            raise ValueError(f"parameters both swept and fixed: {sorted(overlap)}")
        missing = set(_AXIS_KEYS) - {"algorithm"} - set(self.axes) - set(self.fixed)
        if missing:
            raise ValueError(f"sweep is missing parameters: {sorted(missing)}")
        if self.trials < 1:
            raise ValueError(f"trials must be positive, got {self.trials}")


def sweep_config_from_dict(data: dict) -> SweepConfig:
    solver = SolverConfig(**data.get("solver", {}))
    return SweepConfig(axes=dict(data.get("axes", {})), fixed=dict(data.get("fixed", {})),
                       trials=int(data.get("trials", 5)), solver=solver,
                       base_seed=int(data.get("base_seed", 0)),
                       out=data.get("out"))


def load_sweep_config(path) -> SweepConfig:
    with open(path, "r", encoding="utf-8") as f:
        return sweep_config_from_dict(json.load(f))


def _iter_jobs(config: SweepConfig):
    """Yield (spec, algorithm, trial) in canonical (cell, trial) order."""
    names = list(config.axes)
    for combo in itertools.product(*(config.axes[name] for name in names)):
        params = dict(config.fixed)
        params.update(dict(zip(names, combo)))
        algorithm = params.pop("algorithm", "rttc-si")
        for trial in range(config.trials):
            seed = derive_seed(config.base_seed, "instance",
                               int(params["d"]), int(params["N"]), int(params["M"]),
                               int(params["r"]), int(params["l"]), int(params["omega"]),
                               trial)
            spec = InstanceSpec(d=int(params["d"]), N=int(params["N"]),
                                r=int(params["r"]), M=int(params["M"]),
                                l=int(params["l"]), omega_size=int(params["omega"]),
                                seed=seed)
            yield spec, algorithm, trial


def _run_job(payload):
    spec, algorithm, trial, solver_config = payload
    record, _ = run_single(spec, solver_config, algorithm=algorithm, trial=trial)
    return record


def read_sweep_csv(path) -> list[SweepRecord]:
    records = []
    with open(path, "r", encoding="utf-8", newline="") as f:
        rows = [line for line in f if line.strip() and not line.startswith("#")]
    for fields in csv.DictReader(rows):
        missing = [c for c in CSV_COLUMNS if c not in fields or fields[c] is None]
        if missing:
            raise ValueError(f"sweep CSV is missing columns {missing}")
        records.append(SweepRecord.from_csv_fields(fields))
    return records


def run_sweep(config: SweepConfig, threads: int = 1, resume: bool = False,
              out: Optional[str] = None, progress=None) -> Path:
    """Execute the sweep and append rows to the output CSV.

    With ``resume=True``, rows already present in the output are skipped.
    Workers (``threads > 1``) each own whole runs; rows are written by this
    process in canonical order, so the CSV body is reproducible.
    """
    out_path = Path(out if out is not None else (config.out or "sweep.csv"))
    done: set[tuple] = set()
    if out_path.exists() and resume:
        done = {rec.key() for rec in read_sweep_csv(out_path)}
    elif out_path.exists() and out_path.stat().st_size > 0:
        raise FileExistsError(f"{out_path} exists; pass resume to continue it")

    jobs = [(spec, algorithm, trial, config.solver)
            for spec, algorithm, trial in _iter_jobs(config)]
    pending = [job for job in jobs
               if (job[0].d, job[0].N, job[0].M, job[0].r, job[0].l,
                   job[0].omega_size, job[2], job[1]) not in done]

    out_path.parent.mkdir(parents=True, exist_ok=True)
    fresh = not out_path.exists() or out_path.stat().st_size == 0
    with open(out_path, "a", encoding="utf-8") as f:
        if fresh:
            f.write(SCHEMA_LINE + "\n")
            f.write(",".join(CSV_COLUMNS) + "\n")
        if threads > 1 and len(pending) > 1:
            with ProcessPoolExecutor(max_workers=threads) as pool:
                for record in pool.map(_run_job, pending):
                    f.write(record.to_csv_row() + "\n")
                    f.flush()
                    if progress is not None:
                        progress(record)
        else:
            for payload in pending:
                record = _run_job(payload)
                f.write(record.to_csv_row() + "\n")
                f.flush()
                if progress is not None:
                    progress(record)
    return out_path


def summarize(csv_path) -> list[dict]:
    """Per-cell convergence frequencies, cells in sorted order.

    Groups rows by (d, N, M, r, l, omega, algorithm) and reports
    ``frequency = mean(converged)`` with the trial count.
    """
    records = read_sweep_csv(csv_path)
    cells: dict[tuple, list[int]] = {}
    for rec in records:
        cell = (rec.d, rec.N, rec.M, rec.r, rec.l, rec.omega, rec.algorithm)
        cells.setdefault(cell, []).append(rec.converged)
    rows = []
    for cell in sorted(cells):
        flags = cells[cell]
        rows.append({
            "d": cell[0], "N": cell[1], "M": cell[2], "r": cell[3], "l": cell[4],
            "omega": cell[5], "algorithm": cell[6],
            "trials": len(flags), "frequency": sum(flags) / len(flags),
        })
    return rows


def write_summary(rows: list[dict], f) -> None:
    """Write a frequency table in the summary CSV schema to a file object."""
    f.write(SUMMARY_SCHEMA_LINE + "\n")
    f.write(",".join(SUMMARY_COLUMNS) + "\n")
    for row in rows:
        f.write(",".join([
            str(row["d"]), str(row["N"]), str(row["M"]), str(row["r"]),
            str(row["l"]), str(row["omega"]), row["algorithm"],
            str(row["trials"]), repr(float(row["frequency"])),
        ]) + "\n")


def csv_body_without_seconds(path) -> str:
    """The CSV body with the seconds column dropped; the determinism unit."""
    with open(path, "r", encoding="utf-8") as f:
        lines = [line.rstrip("\n") for line in f if not line.startswith("#")]
    trimmed = []
    for line in lines:
        if not line.strip():
            continue
        fields = line.split(",")
        trimmed.append(",".join(fields[:-1]))
    return "\n".join(trimmed)
