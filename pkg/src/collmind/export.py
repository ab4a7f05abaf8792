"""Plain-text output tables, the run manifest, and readers for both."""
from __future__ import annotations

import configparser
import csv
import hashlib
import io
from pathlib import Path

import numpy as np

from . import __version__
from .config import Scenario, dump_scenario
from .network import write_snapshot

METRICS_HEADER = ("step", "metric", "mean", "std", "n")
TRAJECTORY_HEADER = ("step", "x", "y", "smoothed_x", "smoothed_y")
RATIO_HEADER = ("step", "metric", "ratio", "band", "denoised")


def fmt(x) -> str:
    """17 significant digits: enough to round-trip any double."""
    return f"{float(x):.17g}"


def write_rows(path: Path, header, rows) -> None:
    try:
        with open(path, "w", newline="") as fh:
            w = csv.writer(fh, lineterminator="\n")
            w.writerow(header)
            w.writerows(rows)
    except OSError as exc:
        raise OSError(f"cannot write {path}: {exc}") from exc


def write_metrics(path, stats: dict) -> None:
    """Long-format metric table; ``stats`` maps name -> SeriesStats."""
    rows = []
    for name in sorted(stats):
        s = stats[name]
        for t, (m, sd) in enumerate(zip(s.mean, s.std)):
            rows.append((t, name, fmt(m), fmt(sd), s.n))
    write_rows(Path(path), METRICS_HEADER, rows)


def read_metrics(path) -> dict:
    """Inverse of :func:`write_metrics`: name -> (mean, std, n) arrays."""
    cols: dict[str, list] = {}
    with open(path, newline="") as fh:
        r = csv.reader(fh)
        header = next(r)
        if tuple(header) != METRICS_HEADER:
            raise ValueError(f"{path}: unexpected header {header}")
        for step, name, mean, std, n in r:
            cols.setdefault(name, []).append((int(step), float(mean), float(std), int(n)))
    out = {}
    for name, rows in cols.items():
        rows.sort()
        arr = np.array([(m, s) for _, m, s, _ in rows]).reshape(-1, 2)
        out[name] = (arr[:, 0], arr[:, 1], rows[0][3])
    return out


def write_trajectory(path, trajectories: dict | None) -> None:
    """``trajectories`` maps label -> Trajectory; a single unlabeled one may use key ''."""
    rows = []
    labelled = trajectories and any(k for k in trajectories)
    header = (("series",) + TRAJECTORY_HEADER) if labelled else TRAJECTORY_HEADER
    for label, traj in sorted((trajectories or {}).items()):
        sm = traj.smoothed_per_step()
        for t, ((x, y), (sx, sy)) in enumerate(zip(traj.points, sm)):
            row = (t, fmt(x), fmt(y), fmt(sx), fmt(sy))
            rows.append(((label,) + row) if labelled else row)
    write_rows(Path(path), header, rows)


def write_profiles(path, profiles: np.ndarray | None) -> None:
    """Ensemble-mean comment profile, one row per step."""
    if profiles is None or profiles.size == 0:
        write_rows(Path(path), ("step",), [])
        return
    n = profiles.shape[1]
    rows = [(t,) + tuple(fmt(v) for v in row) for t, row in enumerate(profiles)]
    write_rows(Path(path), ("step",) + tuple(f"topic_{i}" for i in range(n)), rows)


def read_profiles(path) -> np.ndarray:
    data = np.loadtxt(path, delimiter=",", skiprows=1, ndmin=2)
    return data[:, 1:] if data.size else np.zeros((0, 0))


def write_ratios(path, ratios: dict) -> None:
    """``ratios`` maps metric -> (ratio, band, denoised)."""
    rows = []
    for name in sorted(ratios):
        ratio, band, den = ratios[name]
        for t in range(len(ratio)):
            rows.append((t, name, fmt(ratio[t]), fmt(band[t]), fmt(den[t])))
    write_rows(Path(path), RATIO_HEADER, rows)


def sha256_file(path) -> str:
    h = hashlib.sha256()
    with open(path, "rb") as fh:
        for chunk in iter(lambda: fh.read(1 << 16), b""):
            h.update(chunk)
    return h.hexdigest()


def write_manifest(out_dir, scenario: Scenario | None, files, extra: dict | None = None) -> Path:
    """Resolved scenario plus software version and a digest of every output file."""
    out_dir = Path(out_dir)
    digests = {str(Path(f).relative_to(out_dir)): sha256_file(f) for f in sorted(files)}
    sections = {"run": {"software": "collmind", "version": __version__, **(extra or {})},
                "digests": digests}
    if scenario is not None:
        text = dump_scenario(scenario, sections)
    else:
        cp = configparser.ConfigParser(interpolation=None, default_section="__none__")
        cp.optionxform = str
        for k, v in sections.items():
            cp[k] = {a: str(b) for a, b in v.items()}
        buf = io.StringIO()
        cp.write(buf)
        text = buf.getvalue()
    path = out_dir / "manifest.ini"
    path.write_text(text)
    return path


def read_manifest(path) -> configparser.ConfigParser:
    cp = configparser.ConfigParser(interpolation=None, default_section="__none__")
    cp.optionxform = str
    cp.read(path)
    return cp


def export_results(result, scenario: Scenario, out_dir, trajectories: dict | None = None) -> list[Path]:
    """Write metrics, profiles, trajectory, snapshots and manifest for an ensemble.

    ``result`` is an EnsembleResult or None (header-only tables). Returns the
    list of files written, manifest last.
    """
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    files = [out_dir / "metrics.csv", out_dir / "profiles.csv", out_dir / "trajectory.csv"]
    write_metrics(files[0], result.stats if result is not None else {})
    write_profiles(files[1], result.mean_profiles if result is not None else None)
    write_trajectory(files[2], trajectories)
    if result is not None and result.first_record is not None and result.first_record.snapshots:
        snap_dir = out_dir / "snapshots"
        snap_dir.mkdir(exist_ok=True)
        for step, net in sorted(result.first_record.snapshots.items()):
            files.extend(write_snapshot(net, snap_dir, f"step_{step:05d}"))
    extra = {}
    if result is not None:
        extra = {"replicas": result.n_replicas, "master_seed": result.master_seed}
    files.append(write_manifest(out_dir, scenario, files, extra))
    return files
