"""Run ledger: fixed-schema CSV rows emitted at probe times."""

from __future__ import annotations

import csv
from dataclasses import dataclass, asdict

LEDGER_COLUMNS = (
    "t", "energy", "grad_u_sq", "joule", "divu_max", "divB_max",
    "band_ll", "band_lt", "band_mid", "band_gt", "band_gg",
    "ohm_iters", "ohm_residual",
)


@dataclass
class LedgerRow:
    t: float
    energy: float
    grad_u_sq: float
    joule: float
    divu_max: float
    divB_max: float
    band_ll: float
    band_lt: float
    band_mid: float
    band_gt: float
    band_gg: float
    ohm_iters: int = 0
    ohm_residual: float = 0.0

    def as_list(self):
        d = asdict(self)
        return [d[c] for c in LEDGER_COLUMNS]


def format_value(v) -> str:
    if isinstance(v, int):
        return str(v)
    return format(float(v), ".17g")


def write_ledger_csv(path, rows) -> None:
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(LEDGER_COLUMNS)
        for row in rows:
            w.writerow([format_value(v) for v in row.as_list()])


def read_ledger_csv(path):
    rows = []
    with open(path, newline="") as fh:
        r = csv.reader(fh)
        header = next(r)
        if tuple(header) != LEDGER_COLUMNS:
            raise ValueError(f"unexpected ledger header {header}")
        for rec in r:
            vals = dict(zip(LEDGER_COLUMNS, rec))
            rows.append(LedgerRow(
                **{k: (int(v) if k == "ohm_iters" else float(v))
                   for k, v in vals.items()}))
    return rows
