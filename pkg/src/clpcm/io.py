"""Data ingestion and run-artifact files.

File formats:
  edge list    whitespace-separated 1-based integer pairs, one edge per
               line, '#' comments ignored; undirected lists are
               symmetrised
  adjacency    comma-separated square 0/1 matrix
  draws.csv    header iter,G,beta,loglik,logpost,k_1..k_n
  positions.csv / positions_aligned.csv   header iter,actor,x_1..x_d
  summary.json, counters.json, metadata.json, report.json (baseline)

All artifact files are written deterministically: floats use shortest
round-trip repr, JSON keys are sorted, no timestamps.
"""

import hashlib
import json
import re
from dataclasses import dataclass
from pathlib import Path
from typing import List, Optional

import numpy as np

from .model import Network
from .sampler import DrawRecord, MoveCounters

SCHEMA_VERSION = 1


class ParseError(ValueError):
    """Malformed input data; message carries the offending line number."""


@dataclass
class RunArtifacts:
    """Paths of one run's output files, all under a single directory."""

    directory: Path

    @property
    def draws(self) -> Path:
        return self.directory / "draws.csv"

    @property
    def positions(self) -> Path:
        return self.directory / "positions.csv"

    @property
    def positions_aligned(self) -> Path:
        return self.directory / "positions_aligned.csv"

    @property
    def summary(self) -> Path:
        return self.directory / "summary.json"

    @property
    def counters(self) -> Path:
        return self.directory / "counters.json"

    @property
    def metadata(self) -> Path:
        return self.directory / "metadata.json"

    @property
    def network(self) -> Path:
        return self.directory / "network.csv"

    def require(self, *names):
        for name in names:
            path = getattr(self, name)
            if not path.exists():
                raise FileNotFoundError(f"missing artifact file: {path}")


def ingest(path, fmt: str, directed: bool) -> Network:
    """Parse a network file ('edgelist' or 'adjacency')."""
    path = Path(path)
    if fmt == "edgelist":
        return _ingest_edgelist(path, directed)
    if fmt == "adjacency":
        return _ingest_adjacency(path, directed)
    raise ValueError(f"unknown format {fmt!r}")


_N_DIRECTIVE = re.compile(r"^#\s*n\s*=\s*(\d+)\s*$")


def _ingest_edgelist(path: Path, directed: bool) -> Network:
    edges = []
    max_id = 0
    declared_n = None
    for lineno, raw in enumerate(path.read_text().splitlines(), start=1):
        m = _N_DIRECTIVE.match(raw.strip())
        if m and declared_n is None:
            declared_n = int(m.group(1))
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        parts = line.split()
        if len(parts) != 2:
            raise ParseError(f"{path}:{lineno}: expected two actor ids")
        try:
            i, j = int(parts[0]), int(parts[1])
        except ValueError:
            raise ParseError(f"{path}:{lineno}: non-integer actor id") from None
        if i < 1 or j < 1:
            raise ParseError(f"{path}:{lineno}: actor ids are 1-based")
        if i == j:
            raise ParseError(f"{path}:{lineno}: self-ties are not allowed")
        edges.append((i - 1, j - 1))
        max_id = max(max_id, i, j)
    n = max_id if declared_n is None else declared_n
    if max_id > n:
        raise ParseError(f"{path}: actor id {max_id} exceeds declared n={n}")
    Y = np.zeros((n, n), dtype=np.int64)
    for i, j in edges:
        Y[i, j] = 1
        if not directed:
            Y[j, i] = 1
    return Network(Y, directed=directed)


def _ingest_adjacency(path: Path, directed: bool) -> Network:
    rows = []
    for lineno, raw in enumerate(path.read_text().splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        entries = [e.strip() for e in line.split(",")]
        row = []
        for e in entries:
            if e not in ("0", "1"):
                raise ParseError(f"{path}:{lineno}: entries must be 0 or 1")
            row.append(int(e))
        rows.append((lineno, row))
    if not rows:
        raise ParseError(f"{path}:1: empty adjacency file")
    n = len(rows)
    Y = np.zeros((n, n), dtype=np.int64)
    for r, (lineno, row) in enumerate(rows):
        if len(row) != n:
            raise ParseError(f"{path}:{lineno}: ragged row "
                             f"(expected {n} entries, got {len(row)})")
        Y[r] = row
        if row[r] != 0:
            raise ParseError(f"{path}:{lineno}: nonzero diagonal entry")
    if not directed and not np.array_equal(Y, Y.T):
        raise ParseError(f"{path}: asymmetric adjacency for an "
                         f"undirected network")
    return Network(Y, directed=directed)


def write_edgelist(path, net: Network, header: Optional[str] = None):
    """Write a network in the edge-list format ingest reads back."""
    lines = []
    if header:
        lines.extend(f"# {h}" for h in header.splitlines())
    lines.append(f"# n={net.n}")
    Y = net.adjacency
    n = net.n
    for i in range(n):
        start = 0 if net.directed else i + 1
        for j in range(start, n):
            if i != j and Y[i, j]:
                lines.append(f"{i + 1} {j + 1}")
    Path(path).write_text("\n".join(lines) + ("\n" if lines else ""))


def write_adjacency(path, net: Network):
    lines = [",".join(str(int(v)) for v in row) for row in net.adjacency]
    Path(path).write_text("\n".join(lines) + "\n")


def _fmt(x: float) -> str:
    return repr(float(x))


def write_draws(path, draws: List[DrawRecord], n: int):
    header = "iter,G,beta,loglik,logpost," + ",".join(
        f"k_{i + 1}" for i in range(n))
    lines = [header]
    for d in draws:
        ks = ",".join(str(int(k) + 1) for k in d.K)
        lines.append(f"{d.iteration},{d.G},{_fmt(d.beta)},"
                     f"{_fmt(d.log_likelihood)},{_fmt(d.log_posterior)},{ks}")
    Path(path).write_text("\n".join(lines) + "\n")


def read_draws(path):
    """Read a draws file back into (iters, G, beta, loglik, logpost, K)."""
    lines = Path(path).read_text().splitlines()
    if not lines or not lines[0].startswith("iter,G,beta,loglik,logpost,k_1"):
        raise ParseError(f"{path}:1: not a draws file")
    n = len(lines[0].split(",")) - 5
    iters, gs, betas, logliks, logposts, ks = [], [], [], [], [], []
    for line in lines[1:]:
        parts = line.split(",")
        iters.append(int(parts[0]))
        gs.append(int(parts[1]))
        betas.append(float(parts[2]))
        logliks.append(float(parts[3]))
        logposts.append(float(parts[4]))
        ks.append([int(p) - 1 for p in parts[5:]])
    return (np.array(iters), np.array(gs), np.array(betas),
            np.array(logliks), np.array(logposts),
            np.array(ks, dtype=np.int64).reshape(len(iters), n))


def write_positions(path, iters, Zs):
    """Zs: (n_draws, n, d) stacked positions."""
    n_draws, n, d = Zs.shape
    header = "iter,actor," + ",".join(f"x_{c + 1}" for c in range(d))
    lines = [header]
    for r in range(n_draws):
        for i in range(n):
            coords = ",".join(_fmt(Zs[r, i, c]) for c in range(d))
            lines.append(f"{iters[r]},{i + 1},{coords}")
    Path(path).write_text("\n".join(lines) + "\n")


def read_positions(path):
    lines = Path(path).read_text().splitlines()
    if not lines or not lines[0].startswith("iter,actor,x_1"):
        raise ParseError(f"{path}:1: not a positions file")
    d = len(lines[0].split(",")) - 2
    rows = [line.split(",") for line in lines[1:]]
    iters = sorted({int(r[0]) for r in rows})
    n = max(int(r[1]) for r in rows)
    idx = {it: k for k, it in enumerate(iters)}
    Z = np.zeros((len(iters), n, d))
    for r in rows:
        Z[idx[int(r[0])], int(r[1]) - 1] = [float(v) for v in r[2:]]
    return np.array(iters), Z


def write_json(path, obj):
    Path(path).write_text(json.dumps(obj, sort_keys=True, indent=2) + "\n")


def read_json(path):
    return json.loads(Path(path).read_text())


def counters_dict(counters: MoveCounters):
    return {m: {"attempted": a, "accepted": b}
            for m, (a, b) in counters.as_dict().items()}


def data_checksum(path) -> str:
    return hashlib.sha256(Path(path).read_bytes()).hexdigest()


def dataset_path(name: str) -> Path:
    """Path of a bundled dataset fixture ('monks', 'zachary', 'dolphins')."""
    here = Path(__file__).parent / "datasets" / f"{name}.edges"
    if not here.exists():
        raise FileNotFoundError(f"no bundled dataset {name!r}")
    return here
