"""CSV ingestion and JSON/CSV emission.

Every number written out goes through :func:`fmt`, which keeps 12
significant digits so that repeated runs produce byte-identical files.
"""

from __future__ import annotations

import csv
import datetime as dt
import io
import json
import math
from dataclasses import dataclass
from pathlib import Path
from typing import Iterable, Sequence

import numpy as np

from gesnorm.anomaly.config import DetectionSeries, log_returns_from_prices, returns_from_prices

SIG_DIGITS = 12
KINDS = ("price", "return")


def fmt(v: float) -> str:
    """12 significant digits, ``nan``/``inf``/``-inf`` spelled out."""
    v = float(v)
    if math.isnan(v):
        return "nan"
    if math.isinf(v):
        return "inf" if v > 0 else "-inf"
    out = f"{v:.{SIG_DIGITS}g}"
    return "0" if out == "-0" else out


def round_sig(v: float) -> float | None:
    """Value as it appears in JSON output; None for NaN (no value yet)."""
    v = float(v)
    if math.isnan(v):
        return None
    if math.isinf(v):
        return v
    return float(fmt(v))


@dataclass
class DatedSeries:
    dates: list[dt.date]
    values: np.ndarray
    kind: str  # "price" or "return"

    def __len__(self) -> int:
        return len(self.dates)

    def to_returns(self, log: bool = False) -> DatedSeries:
        """Returns dated at the later price; a return series passes through."""
        if self.kind == "return":
            return self
        conv = log_returns_from_prices if log else returns_from_prices
        return DatedSeries(self.dates[1:], conv(self.values), "return")


def _parse_date(text: str, row: int) -> dt.date:
    try:
        return dt.date.fromisoformat(text.strip())
    except ValueError:
        pass
    try:
        return dt.datetime.fromisoformat(text.strip()).date()
    except ValueError:
        raise ValueError(f"row {row}: bad ISO-8601 date {text!r}") from None


def load_series(path: str | Path, kind: str | None = None) -> DatedSeries:
    """Read a ``date,price`` or ``date,return`` CSV, sorted by date.

    Args:
        kind: ``"price"`` or ``"return"``; None infers it from the header.

    Raises:
        ValueError: On a malformed row (the message names the row number,
            counting the header as row 1), duplicate dates, a nonpositive
            price, or a file without data rows.
    """
    path = Path(path)
    with path.open(newline="") as fh:
        rows = [r for r in csv.reader(fh)]
    rows = [(i + 1, r) for i, r in enumerate(rows) if any(c.strip() for c in r)]
    if not rows:
        raise ValueError(f"{path}: no data rows")
    _, header = rows[0]
    header = [h.strip().lower() for h in header]
    if len(header) != 2 or header[0] != "date" or header[1] not in KINDS:
        raise ValueError(f"{path}: header must be 'date,price' or 'date,return', got {','.join(header)!r}")
    if kind is None:
        kind = header[1]
    elif kind not in KINDS:
        raise ValueError(f"kind must be one of {KINDS}, got {kind!r}")
    elif kind != header[1]:
        raise ValueError(f"{path}: expected a {kind} column, file has {header[1]!r}")
    data = rows[1:]
    if not data:
        raise ValueError(f"{path}: no data rows")

    parsed = []
    for lineno, r in data:
        if len(r) != 2:
            raise ValueError(f"{path}: row {lineno}: expected 2 fields, got {len(r)}")
        d = _parse_date(r[0], lineno)
        try:
            v = float(r[1])
        except ValueError:
            raise ValueError(f"{path}: row {lineno}: non-numeric value {r[1]!r}") from None
        if not math.isfinite(v):
            raise ValueError(f"{path}: row {lineno}: non-finite value {r[1]!r}")
        if kind == "price" and v <= 0:
            raise ValueError(f"{path}: row {lineno}: nonpositive price {v:g}")
        parsed.append((d, v))
    parsed.sort(key=lambda p: p[0])
    dates = [p[0] for p in parsed]
    for a, b in zip(dates, dates[1:]):
        if a == b:
            raise ValueError(f"{path}: duplicate date {a.isoformat()}")
    return DatedSeries(dates, np.array([p[1] for p in parsed]), kind)


def write_series(path: str | Path, series: DatedSeries) -> None:
    with Path(path).open("w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["date", series.kind])
        for d, v in zip(series.dates, series.values):
            w.writerow([d.isoformat(), fmt(v)])


@dataclass(frozen=True)
class FlagRow:
    date: str
    value: float | None
    I_t: float | None
    flagged: bool


@dataclass
class DetectionReport:
    """Serializable detector output, with numbers already at output precision."""

    method: str
    config: dict
    flags: list[FlagRow]

    @classmethod
    def build(cls, dates: Sequence[dt.date], returns, det: DetectionSeries,
              config: dict) -> DetectionReport:
        if len(dates) != det.flags.size or len(returns) != det.flags.size:
            raise ValueError("dates, returns and detection series differ in length")
        rows = [
            FlagRow(d.isoformat(), round_sig(v), round_sig(s), bool(f))
            for d, v, s, f in zip(dates, returns, det.statistic, det.flags)
        ]
        return cls(det.method, dict(config), rows)

    @property
    def count(self) -> int:
        return sum(r.flagged for r in self.flags)

    def to_dict(self) -> dict:
        return {
            "method": self.method,
            "config": self.config,
            "flags": [
                {"date": r.date, "value": r.value, "I_t": r.I_t, "flagged": r.flagged}
                for r in self.flags
            ],
        }

    @classmethod
    def from_dict(cls, data: dict) -> DetectionReport:
        rows = [FlagRow(str(r["date"]), r["value"], r["I_t"], bool(r["flagged"]))
                for r in data["flags"]]
        return cls(str(data["method"]), dict(data["config"]), rows)

    def to_json(self) -> str:
        # infinities (MAD = 0 windows) are written as JSON's nonstandard Infinity
        return json.dumps(self.to_dict(), indent=1) + "\n"

    def to_csv(self) -> str:
        return csv_text(
            ["date", "value", "I_t", "flagged"],
            ([r.date, _cell(r.value), _cell(r.I_t), "1" if r.flagged else "0"] for r in self.flags),
        )


def _cell(v: float | None) -> str:
    return "" if v is None else fmt(v)


def csv_text(header: Sequence[str], rows: Iterable[Sequence]) -> str:
    """CSV with ``\\n`` line ends; float cells are formatted with :func:`fmt`."""
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    for row in rows:
        w.writerow([fmt(c) if isinstance(c, (float, np.floating)) else c for c in row])
    return buf.getvalue()
