"""Batch experiment driver.

Runs replicated walk experiments described by an :class:`ExperimentConfig`,
in memory and optionally onto disk as a CSV of per-replica observables plus
a JSONL manifest.  Replica ``r`` always consumes the stream
``PCG64(SeedSequence((seed, r)))``, so results are independent of thread
count and of where a resumed run was interrupted; rows are written in
replica order and timestamps live only in the manifest, which keeps the CSV
byte-identical across repeats of the same configuration.
"""

from __future__ import annotations

import hashlib
import json
import os
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, asdict
from datetime import datetime, timezone
from pathlib import Path
from typing import Callable, Dict, List, Optional, Tuple

import numpy as np

from . import __version__
from ._backend import DEFAULT_TIME_CAP, MODE_EXCURSION, MODE_TIME, run_walk
from .models import LatticeState, ModelSpec, PRNG_ALGORITHM, RngStream

__all__ = [
    "BatchResult",
    "ExperimentConfig",
    "UsageError",
    "load_config",
    "run_batch",
]


class UsageError(Exception):
    """Invalid configuration or command usage (CLI exit code 2)."""


_CSV_HEADER = "replica,observable,index,value\n"

# Scalar observables emitted per replica, and which run modes they apply to.
_TIME_SCALARS = (
    "x_final",
    "y_final",
    "z_final",
    "z_min_final",
    "excursion_count",
    "axis_time",
    "contact_time",
    "last_exit",
    "renewal_age",
    "last_h",
    "last_v",
    "commitment_time",
    "quad_changes",
    "quad_changes_late",
    "status",
)
_EXC_SCALARS = (
    "t_final",
    "x_final",
    "y_final",
    "z_final",
    "excursion_count",
    "axis_time",
    "contact_time",
    "last_exit",
    "sum_gain",
    "sum_cone",
    "status",
)


@dataclass(frozen=True)
class ExperimentConfig:
    """A reproducible batch of replica runs.

    Exactly one of ``n_steps`` (time-indexed mode) and ``excursions``
    (excursion-indexed mode) must be set.  Fields that affect the sampled
    law or the emitted rows enter the config hash; ``threads`` does not,
    because it cannot change any output value.
    """

    model: str = "quarter-plane"
    alpha: float = 0.25
    n_steps: Optional[int] = None
    excursions: Optional[int] = None
    replicas: int = 100
    seed: int = 0
    start: Tuple[int, int] = (1, 1)
    time_cap: int = DEFAULT_TIME_CAP
    checkpoints: Tuple[int, ...] = ()
    collect_exits: bool = False
    emit_exits: bool = False
    record_dense: int = 0
    record_growth: float = 1.15
    use_leap: bool = True
    threads: Optional[int] = None

    def validate(self) -> "ExperimentConfig":
        """Check consistency; raises :class:`UsageError` with a reason."""
        try:
            ModelSpec(self.model, self.alpha)
        except ValueError as exc:
            raise UsageError(str(exc)) from None
        if (self.n_steps is None) == (self.excursions is None):
            raise UsageError("exactly one of n_steps and excursions must be set")
        limit = self.n_steps if self.n_steps is not None else self.excursions
        if int(limit) < 0:
            raise UsageError("run length must be nonnegative")
        if self.replicas < 1:
            raise UsageError("replicas must be >= 1")
        if self.seed < 0:
            raise UsageError("seed must be nonnegative")
        sx, sy = self.start
        try:
            ModelSpec(self.model, self.alpha).validate_state(LatticeState(sx, sy))
        except ValueError as exc:
            raise UsageError(str(exc)) from None
        if self.time_cap < 1:
            raise UsageError("time_cap must be positive")
        if list(self.checkpoints) != sorted(set(int(c) for c in self.checkpoints)):
            raise UsageError("checkpoints must be strictly increasing")
        if any(c < 1 for c in self.checkpoints):
            raise UsageError("checkpoints must be >= 1")
        if self.record_dense < 0:
            raise UsageError("record_dense must be >= 0")
        if self.record_dense > 0 and not self.record_growth >= 1.01:
            raise UsageError("record_growth must be >= 1.01")
        if (self.collect_exits or self.emit_exits) and self.excursions is None:
            raise UsageError("exit collection requires excursion mode")
        if self.threads is not None and self.threads < 1:
            raise UsageError("threads must be >= 1")
        return self

    @property
    def mode(self) -> int:
        return MODE_TIME if self.n_steps is not None else MODE_EXCURSION

    @property
    def limit(self) -> int:
        return int(self.n_steps if self.n_steps is not None else self.excursions)

    def scientific_fields(self) -> Dict:
        """The fields that determine output content, for hashing."""
        d = asdict(self)
        d.pop("threads")
        d["start"] = list(self.start)
        d["checkpoints"] = [int(c) for c in self.checkpoints]
        d["schema"] = 1
        return d

    def config_hash(self) -> str:
        blob = json.dumps(self.scientific_fields(), sort_keys=True, separators=(",", ":"))
        return hashlib.sha256(blob.encode()).hexdigest()

    def resolve_threads(self) -> int:
        """Thread count: AXISWALK_THREADS env overrides the config value."""
        env = os.environ.get("AXISWALK_THREADS", "").strip()
        if env:
            try:
                value = int(env)
            except ValueError:
                raise UsageError(f"AXISWALK_THREADS must be an integer, got {env!r}")
            if value < 1:
                raise UsageError("AXISWALK_THREADS must be >= 1")
            return value
        if self.threads is not None:
            return self.threads
        return os.cpu_count() or 1


def load_config(path: Optional[str] = None, overrides: Optional[Dict] = None) -> ExperimentConfig:
    """Build a config from an optional JSON file plus override fields.

    Unknown keys in either source raise :class:`UsageError`.
    """
    data: Dict = {}
    if path is not None:
        try:
            with open(path) as fh:
                data = json.load(fh)
        except FileNotFoundError:
            raise UsageError(f"config file not found: {path}") from None
        except json.JSONDecodeError as exc:
            raise UsageError(f"config file {path} is not valid JSON: {exc}") from None
        if not isinstance(data, dict):
            raise UsageError("config file must hold a JSON object")
    if overrides:
        data.update({k: v for k, v in overrides.items() if v is not None})
    valid = set(ExperimentConfig.__dataclass_fields__)
    unknown = set(data) - valid
    if unknown:
        raise UsageError(f"unknown config fields: {sorted(unknown)}")
    if "start" in data:
        start = data["start"]
        if not (isinstance(start, (list, tuple)) and len(start) == 2):
            raise UsageError("start must be a pair [x, y]")
        data["start"] = (int(start[0]), int(start[1]))
    if "checkpoints" in data:
        data["checkpoints"] = tuple(int(c) for c in data["checkpoints"])
    try:
        cfg = ExperimentConfig(**data)
    except TypeError as exc:
        raise UsageError(str(exc)) from None
    return cfg.validate()


@dataclass
class BatchResult:
    """In-memory outcome of a batch run.

    Scalar observables are arrays of length ``replicas`` indexed by replica
    number.  ``z_exit`` is a ``(replicas, excursions)`` matrix when exit
    collection was requested, ``cp_*`` are ``(replicas, n_checkpoints)``.
    ``resumed_from`` counts replicas executed by an earlier interrupted run
    (their in-memory values are absent and masked invalid in ``executed``).
    """

    config: ExperimentConfig
    scalars: Dict[str, np.ndarray]
    z_exit: Optional[np.ndarray]
    cp_gain: Optional[np.ndarray]
    cp_cone: Optional[np.ndarray]
    cp_time: Optional[np.ndarray]
    records: Optional[List]
    executed: np.ndarray
    resumed_from: int = 0

    @property
    def ok_mask(self) -> np.ndarray:
        """Replicas that were executed here and finished cleanly."""
        return self.executed & (self.scalars["status"] == 0)

    @property
    def dropped(self) -> int:
        """Executed replicas flagged by a nonzero engine status."""
        return int(np.sum(self.executed & (self.scalars["status"] != 0)))


_SCALAR_KEYS = (
    "status",
    "t",
    "x",
    "y",
    "z_final",
    "z_min_final",
    "n_exc",
    "axis_steps",
    "contact_steps",
    "last_exit",
    "last_h",
    "last_v",
    "sum_gain",
    "sum_cone",
    "quad_changes",
    "quad_changes_late",
)


def _fmt(value) -> str:
    if isinstance(value, (int, np.integer)):
        return str(int(value))
    return repr(float(value))


def _replica_rows(cfg: ExperimentConfig, r: int, res: Dict) -> List[str]:
    """CSV rows for one replica, in a fixed deterministic order."""
    rows: List[str] = []
    idx = cfg.limit
    if cfg.mode == MODE_TIME:
        n = cfg.limit
        values = {
            "x_final": res["x"],
            "y_final": res["y"],
            "z_final": res["z_final"],
            "z_min_final": res["z_min_final"],
            "excursion_count": res["n_exc"],
            "axis_time": res["axis_steps"],
            "contact_time": res["contact_steps"],
            "last_exit": res["last_exit"],
            "renewal_age": n - res["last_exit"],
            "last_h": res["last_h"],
            "last_v": res["last_v"],
            "commitment_time": min(res["last_h"], res["last_v"]),
            "quad_changes": res["quad_changes"],
            "quad_changes_late": res["quad_changes_late"],
            "status": res["status"],
        }
        names = _TIME_SCALARS
    else:
        values = {
            "t_final": res["t"],
            "x_final": res["x"],
            "y_final": res["y"],
            "z_final": res["z_final"],
            "excursion_count": res["n_exc"],
            "axis_time": res["axis_steps"],
            "contact_time": res["contact_steps"],
            "last_exit": res["last_exit"],
            "sum_gain": res["sum_gain"],
            "sum_cone": res["sum_cone"],
            "status": res["status"],
        }
        names = _EXC_SCALARS
    for name in names:
        rows.append(f"{r},{name},{idx},{_fmt(values[name])}\n")
    for j, cp in enumerate(cfg.checkpoints):
        rows.append(f"{r},cp_gain,{cp},{_fmt(res['cp_gain'][j])}\n")
        rows.append(f"{r},cp_cone,{cp},{_fmt(res['cp_cone'][j])}\n")
        rows.append(f"{r},cp_time,{cp},{_fmt(res['cp_time'][j])}\n")
    if cfg.emit_exits and res["z_exit"] is not None:
        for i, z in enumerate(res["z_exit"], start=1):
            if not math.isnan(z):
                rows.append(f"{r},z_exit,{i},{_fmt(z)}\n")
    if cfg.record_dense > 0 and res["records"] is not None:
        rec_idx, rec_ent, rec_ext, rec_ze, rec_zx, rec_ax = res["records"]
        for j in range(len(rec_idx)):
            i = rec_idx[j]
            rows.append(f"{r},exc_entry_time,{i},{_fmt(rec_ent[j])}\n")
            rows.append(f"{r},exc_exit_time,{i},{_fmt(rec_ext[j])}\n")
            rows.append(f"{r},exc_z_entry,{i},{_fmt(rec_ze[j])}\n")
            rows.append(f"{r},exc_z_exit,{i},{_fmt(rec_zx[j])}\n")
            rows.append(f"{r},exc_axis,{i},{_fmt(rec_ax[j])}\n")
    return rows


def _run_replica(cfg: ExperimentConfig, r: int) -> Dict:
    bg = RngStream(cfg.seed, r).bit_generator()
    spec = ModelSpec(cfg.model, cfg.alpha)
    want_z = cfg.limit if (cfg.collect_exits or cfg.emit_exits) else 0
    return run_walk(
        bg,
        spec.kind_code,
        cfg.alpha,
        cfg.start[0],
        cfg.start[1],
        cfg.mode,
        cfg.limit,
        use_leap=cfg.use_leap,
        time_cap=cfg.time_cap,
        z_exit_limit=want_z,
        checkpoints=cfg.checkpoints,
        record_dense=cfg.record_dense,
        record_growth=cfg.record_growth,
    )


def _now() -> str:
    return datetime.now(timezone.utc).isoformat(timespec="seconds")


def run_batch(
    config: ExperimentConfig,
    out_path: Optional[str] = None,
    resume: bool = False,
    progress: Optional[Callable[[int, int], None]] = None,
    keep_records: bool = False,
) -> BatchResult:
    """Execute all replicas of ``config``.

    Parameters
    ----------
    out_path : str, optional
        CSV destination; a JSONL manifest is written next to it at
        ``<out_path>.manifest``.  Without it the run is in-memory only.
    resume : bool
        Continue an interrupted run: the manifest's last chunk line tells
        how many replicas are already on disk and at which byte offset the
        CSV is consistent; the file is truncated there and the remaining
        replicas (whose streams never depended on the earlier ones) are
        appended.  Completed runs are left untouched.
    progress : callable, optional
        ``progress(done, total)`` after each committed chunk.
    keep_records : bool
        Retain per-replica excursion record arrays in memory.
    """
    cfg = config.validate()
    R = cfg.replicas
    ncp = len(cfg.checkpoints)

    scalars = {k: np.zeros(R, dtype=np.int64) for k in _SCALAR_KEYS}
    z_exit = (
        np.full((R, cfg.limit), np.nan) if (cfg.collect_exits or cfg.emit_exits) else None
    )
    cp_gain = np.zeros((R, ncp)) if ncp else None
    cp_cone = np.zeros((R, ncp)) if ncp else None
    cp_time = np.zeros((R, ncp), dtype=np.int64) if ncp else None
    records: Optional[List] = [None] * R if (keep_records and cfg.record_dense > 0) else None
    executed = np.zeros(R, dtype=bool)

    start_replica = 0
    csv_file = None
    manifest_file = None
    if out_path is not None:
        out = Path(out_path)
        manifest = Path(str(out) + ".manifest")
        if resume:
            start_replica, offset, complete = _load_resume_point(cfg, out, manifest)
            if complete:
                return BatchResult(
                    config=cfg,
                    scalars=scalars,
                    z_exit=z_exit,
                    cp_gain=cp_gain,
                    cp_cone=cp_cone,
                    cp_time=cp_time,
                    records=records,
                    executed=executed,
                    resumed_from=R,
                )
            with open(out, "r+b") as fh:
                fh.truncate(offset)
            csv_file = open(out, "a", newline="")
            manifest_file = open(manifest, "a")
        else:
            out.parent.mkdir(parents=True, exist_ok=True)
            csv_file = open(out, "w", newline="")
            csv_file.write(_CSV_HEADER)
            manifest_file = open(manifest, "w")
            header = {
                "kind": "axiswalk-run",
                "schema": 1,
                "config_hash": cfg.config_hash(),
                "prng": PRNG_ALGORITHM,
                "package_version": __version__,
                "replicas": R,
                "started": _now(),
                "config": cfg.scientific_fields(),
            }
            manifest_file.write(json.dumps(header, sort_keys=True) + "\n")
            manifest_file.flush()

    def work(r: int) -> Dict:
        res = _run_replica(cfg, r)
        for k in _SCALAR_KEYS:
            scalars[k][r] = res[k]
        if z_exit is not None and res["z_exit"] is not None:
            z_exit[r, :] = res["z_exit"]
        if ncp:
            cp_gain[r, :] = res["cp_gain"]
            cp_cone[r, :] = res["cp_cone"]
            cp_time[r, :] = res["cp_time"]
        if records is not None:
            records[r] = res["records"]
        executed[r] = True
        return res

    n_workers = cfg.resolve_threads()
    todo = list(range(start_replica, R))
    chunk_size = max(1, -(-len(todo) // max(n_workers * 8, 1)))
    chunks = [todo[i : i + chunk_size] for i in range(0, len(todo), chunk_size)]

    try:
        if n_workers == 1:
            for chunk in chunks:
                results = [work(r) for r in chunk]
                _commit_chunk(cfg, chunk, results, csv_file, manifest_file)
                if progress is not None:
                    progress(chunk[-1] + 1, R)
        else:
            with ThreadPoolExecutor(max_workers=n_workers) as pool:
                futures = [pool.submit(lambda c=chunk: [work(r) for r in c]) for chunk in chunks]
                for chunk, fut in zip(chunks, futures):
                    results = fut.result()
                    _commit_chunk(cfg, chunk, results, csv_file, manifest_file)
                    if progress is not None:
                        progress(chunk[-1] + 1, R)
        if manifest_file is not None:
            manifest_file.write(
                json.dumps(
                    {"completed": True, "replicas_done": R, "finished": _now()},
                    sort_keys=True,
                )
                + "\n"
            )
    finally:
        if csv_file is not None:
            csv_file.close()
        if manifest_file is not None:
            manifest_file.close()

    return BatchResult(
        config=cfg,
        scalars=scalars,
        z_exit=z_exit,
        cp_gain=cp_gain,
        cp_cone=cp_cone,
        cp_time=cp_time,
        records=records,
        executed=executed,
        resumed_from=start_replica,
    )


def _commit_chunk(cfg, chunk, results, csv_file, manifest_file) -> None:
    if csv_file is None:
        return
    for r, res in zip(chunk, results):
        csv_file.writelines(_replica_rows(cfg, r, res))
    csv_file.flush()
    os.fsync(csv_file.fileno())
    manifest_file.write(
        json.dumps(
            {"replicas_done": chunk[-1] + 1, "offset": csv_file.tell(), "time": _now()},
            sort_keys=True,
        )
        + "\n"
    )
    manifest_file.flush()


def _load_resume_point(cfg: ExperimentConfig, out: Path, manifest: Path):
    """Validate manifest against config; return (next_replica, offset, done)."""
    if not manifest.exists() or not out.exists():
        raise UsageError(
            f"cannot resume: missing {manifest if not manifest.exists() else out}"
        )
    lines = manifest.read_text().splitlines()
    if not lines:
        raise UsageError("cannot resume: empty manifest")
    header = json.loads(lines[0])
    if header.get("config_hash") != cfg.config_hash():
        raise UsageError(
            "cannot resume: configuration differs from the one in the manifest "
            f"({header.get('config_hash', '?')[:12]} vs {cfg.config_hash()[:12]})"
        )
    done = 0
    offset = len(_CSV_HEADER.encode())
    complete = False
    for line in lines[1:]:
        entry = json.loads(line)
        if entry.get("completed"):
            complete = True
        elif "offset" in entry:
            done = entry["replicas_done"]
            offset = entry["offset"]
    return done, offset, complete
