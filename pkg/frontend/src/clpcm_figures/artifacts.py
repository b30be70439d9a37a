"""Readers for the clpcm run-artifact files (schema_version 1).

This package deliberately consumes only the documented artifact files; no
model quantities are recomputed.
"""

import json
from dataclasses import dataclass
from pathlib import Path

import numpy as np


@dataclass
class Artifacts:
    directory: Path

    def path(self, name: str) -> Path:
        p = self.directory / name
        if not p.exists():
            raise FileNotFoundError(f"missing artifact file: {p}")
        return p

    def summary(self) -> dict:
        return json.loads(self.path("summary.json").read_text())

    def metadata(self) -> dict:
        return json.loads(self.path("metadata.json").read_text())

    def adjacency(self) -> np.ndarray:
        rows = [line.split(",")
                for line in self.path("network.csv").read_text().splitlines()
                if line.strip()]
        return np.array([[int(v) for v in row] for row in rows])

    def draws(self):
        """(iterations, G, beta) columns of draws.csv."""
        lines = self.path("draws.csv").read_text().splitlines()
        if not lines or not lines[0].startswith("iter,G,beta"):
            raise ValueError(f"{self.directory}/draws.csv: unexpected header")
        data = [line.split(",") for line in lines[1:]]
        iters = np.array([int(r[0]) for r in data])
        gs = np.array([int(r[1]) for r in data])
        betas = np.array([float(r[2]) for r in data])
        return iters, gs, betas

    def positions(self, aligned: bool):
        name = "positions_aligned.csv" if aligned else "positions.csv"
        lines = self.path(name).read_text().splitlines()
        if not lines or not lines[0].startswith("iter,actor,x_1"):
            raise ValueError(f"{self.directory}/{name}: unexpected header")
        d = len(lines[0].split(",")) - 2
        rows = [line.split(",") for line in lines[1:]]
        iters = sorted({int(r[0]) for r in rows})
        n = max(int(r[1]) for r in rows)
        idx = {it: k for k, it in enumerate(iters)}
        Z = np.zeros((len(iters), n, d))
        for r in rows:
            Z[idx[int(r[0])], int(r[1]) - 1] = [float(v) for v in r[2:]]
        return np.array(iters), Z
