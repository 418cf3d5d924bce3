"""CSV ingestion and persistence for chains, return series and surfaces.

Parsers are total: any byte stream either yields a validated value or raises
ParseError / DataQualityError with a line-level message, never an unrelated
exception.  Dirty rows are skipped with a diagnostic (real chain downloads
are dirty); files where more than half the rows fail are rejected outright.
Floats are serialized with 17 significant digits so write-then-read is the
identity on binary64 values.
"""

from __future__ import annotations

import csv
import io
import json
import math
import warnings
from dataclasses import dataclass
from datetime import date
from pathlib import Path
from typing import Optional, TextIO, Union

from .calibration import CalibrationPoint, ClampStatus, PredictabilitySurface, SurfaceDiff
from .errors import DataQualityError, InputError, ParseError
from .volatility import ReturnSeries

__all__ = [
    "OptionQuote",
    "OptionChain",
    "MarketConfig",
    "parse_option_chain",
    "parse_return_series",
    "write_surface",
    "read_surface",
    "write_surface_diff",
]

Source = Union[str, Path, TextIO, io.IOBase]

CHAIN_HEADER = ["quote_date", "expiry", "strike", "right", "bid", "ask"]
SURFACE_HEADER = ["moneyness", "tau_years", "p", "clamped", "market_price", "model_price", "residual"]
DIFF_HEADER = ["moneyness", "tau_years", "dp"]


@dataclass(frozen=True)
class OptionQuote:
    quote_date: date
    expiry_date: date
    strike: float
    right: str  # "call" | "put"
    bid: float
    ask: float

    def __post_init__(self):
        if self.right not in ("call", "put"):
            raise InputError(f"right must be call or put, got {self.right!r}")
        if not (math.isfinite(self.strike) and self.strike > 0):
            raise InputError(f"strike must be > 0, got {self.strike}")
        if not (math.isfinite(self.bid) and math.isfinite(self.ask)):
            raise InputError("bid and ask must be finite")
        if self.bid < 0:
            raise InputError(f"bid must be >= 0, got {self.bid}")
        if self.ask < self.bid:
            raise InputError(f"ask {self.ask} below bid {self.bid}")
        if self.expiry_date < self.quote_date:
            raise InputError(f"expiry {self.expiry_date} before quote date {self.quote_date}")

    @property
    def mid(self) -> float:
        return (self.bid + self.ask) / 2.0


@dataclass(frozen=True)
class OptionChain:
    quote_date: date
    symbol: str
    spot: float
    quotes: tuple[OptionQuote, ...]
    skipped: tuple[str, ...] = ()

    def __post_init__(self):
        object.__setattr__(self, "quotes", tuple(self.quotes))
        object.__setattr__(self, "skipped", tuple(self.skipped))
        if not (math.isfinite(self.spot) and self.spot > 0):
            raise InputError(f"spot must be > 0, got {self.spot}")
        for q in self.quotes:
            if q.quote_date != self.quote_date:
                raise InputError("all quotes must share the chain quote_date")

    def __len__(self) -> int:
        return len(self.quotes)


@dataclass(frozen=True)
class MarketConfig:
    risk_free_rate: float
    vol_method: str = "realized"
    day_count: float = 365.0

    def __post_init__(self):
        if not math.isfinite(self.risk_free_rate):
            raise InputError("risk_free_rate must be finite")
        if self.vol_method not in ("vix", "historical", "realized", "garch"):
            raise InputError(f"unknown vol method {self.vol_method!r}")


def _open_text(source: Source):
    """Return (text_file_object, should_close). Byte streams are decoded as UTF-8."""
    if isinstance(source, (str, Path)):
        try:
            return open(source, "r", encoding="utf-8", newline=""), True
        except OSError as exc:
            raise ParseError(f"cannot open {source}: {exc}") from exc
    if isinstance(source, (io.RawIOBase, io.BufferedIOBase)):
        return io.TextIOWrapper(source, encoding="utf-8", newline=""), False
    return source, False


def _read_rows(source: Source, expected_header: list[str], what: str):
    fh, should_close = _open_text(source)
    try:
        try:
            reader = csv.reader(fh)
            try:
                header = next(reader)
            except StopIteration:
                raise ParseError(f"{what}: file is empty, expected header {','.join(expected_header)}")
            header = [h.strip().lstrip("﻿") for h in header]
            missing = [col for col in expected_header if col not in header]
            if missing:
                raise ParseError(f"{what}: header {header} lacks required columns {missing}")
            extra = [col for col in header if col not in expected_header]
            idx = {col: header.index(col) for col in expected_header}
            rows = [(line_no, row) for line_no, row in enumerate(reader, start=2) if row]
            return idx, rows, extra
        except (UnicodeDecodeError, csv.Error) as exc:
            raise ParseError(f"{what}: unreadable content: {exc}") from exc
    finally:
        if should_close:
            fh.close()


def _parse_date(text: str, what: str, line_no: int) -> date:
    try:
        return date.fromisoformat(text.strip())
    except ValueError as exc:
        raise ParseError(f"{what} line {line_no}: bad date {text!r}") from exc


def _parse_float(text: str, what: str, line_no: int) -> float:
    try:
        value = float(text)
    except ValueError as exc:
        raise ParseError(f"{what} line {line_no}: bad number {text!r}") from exc
    return value


def parse_option_chain(source: Source, spot: float, symbol: str = "SPY") -> OptionChain:
    """Parse a chain CSV with header quote_date,expiry,strike,right,bid,ask.

    Spot is supplied by the caller: chain files carry quotes only.  Rows that
    fail validation (crossed markets, bad dates, mismatched quote_date, ...)
    are skipped with a line-numbered diagnostic; more than 50% skipped rows is
    a DataQualityError.
    """
    what = "option chain"
    idx, rows, _extra = _read_rows(source, CHAIN_HEADER, what)
    quotes: list[OptionQuote] = []
    skipped: list[str] = []
    chain_date: Optional[date] = None
    for line_no, row in rows:
        try:
            if len(row) < len(CHAIN_HEADER):
                raise ParseError(f"{what} line {line_no}: expected {len(CHAIN_HEADER)} fields, got {len(row)}")
            qd = _parse_date(row[idx["quote_date"]], what, line_no)
            expiry = _parse_date(row[idx["expiry"]], what, line_no)
            right = row[idx["right"]].strip().lower()
            quote = OptionQuote(
                quote_date=qd,
                expiry_date=expiry,
                strike=_parse_float(row[idx["strike"]], what, line_no),
                right=right,
                bid=_parse_float(row[idx["bid"]], what, line_no),
                ask=_parse_float(row[idx["ask"]], what, line_no),
            )
            if chain_date is None:
                chain_date = quote.quote_date
            elif quote.quote_date != chain_date:
                raise ParseError(
                    f"{what} line {line_no}: quote_date {quote.quote_date} differs from {chain_date}"
                )
        except (ParseError, InputError) as exc:
            skipped.append(str(exc) if str(exc).startswith(what) else f"{what} line {line_no}: {exc}")
            continue
        quotes.append(quote)
    if not rows:
        raise ParseError(f"{what}: no data rows")
    if len(skipped) * 2 > len(rows):
        raise DataQualityError(
            f"{what}: {len(skipped)} of {len(rows)} rows rejected; first: {skipped[0]}"
        )
    try:
        return OptionChain(quote_date=chain_date, symbol=symbol, spot=spot,
                           quotes=tuple(quotes), skipped=tuple(skipped))
    except InputError as exc:
        raise ParseError(f"{what}: {exc}") from exc


def parse_return_series(source: Source) -> ReturnSeries:
    """Parse a returns CSV: header date,log_return, or date,close (auto log-differenced)."""
    what = "return series"
    fh, should_close = _open_text(source)
    try:
        try:
            reader = csv.reader(fh)
            try:
                header = [h.strip().lstrip("﻿") for h in next(reader)]
            except StopIteration:
                raise ParseError(f"{what}: file is empty")
            if header[:2] == ["date", "log_return"]:
                mode = "returns"
            elif header[:2] == ["date", "close"]:
                mode = "closes"
            else:
                raise ParseError(f"{what}: header must be date,log_return or date,close, got {header}")
            dates: list[date] = []
            values: list[float] = []
            for line_no, row in enumerate(reader, start=2):
                if not row:
                    continue
                if len(row) < 2:
                    raise ParseError(f"{what} line {line_no}: expected 2 fields, got {len(row)}")
                d = _parse_date(row[0], what, line_no)
                v = _parse_float(row[1], what, line_no)
                if not math.isfinite(v):
                    raise ParseError(f"{what} line {line_no}: non-finite value {row[1]!r}")
                if dates and d <= dates[-1]:
                    raise ParseError(f"{what} line {line_no}: dates not strictly ascending at {d}")
                if mode == "closes" and v <= 0:
                    raise ParseError(f"{what} line {line_no}: non-positive close {v}")
                dates.append(d)
                values.append(v)
        except (UnicodeDecodeError, csv.Error) as exc:
            raise ParseError(f"{what}: unreadable content: {exc}") from exc
    finally:
        if should_close:
            fh.close()
    if mode == "closes":
        if len(values) < 3:
            raise ParseError(f"{what}: need >= 3 closes to form >= 2 returns")
        returns = [math.log(b / a) for a, b in zip(values, values[1:])]
        dates = dates[1:]
    else:
        returns = values
    try:
        return ReturnSeries(dates=tuple(dates), returns=returns)
    except InputError as exc:
        raise ParseError(f"{what}: {exc}") from exc


def _fmt(x: float) -> str:
    return format(x, ".17g")


def _meta_path(path: Union[str, Path]) -> Path:
    return Path(path).with_suffix(".json")


def write_surface(surface: PredictabilitySurface, path: Union[str, Path]) -> None:
    """Write surface CSV plus a JSON metadata sidecar (same stem, .json)."""
    path = Path(path)
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(",".join(SURFACE_HEADER) + "\n")
        for pt in surface.points:
            fh.write(",".join([
                _fmt(pt.moneyness), _fmt(pt.tau), _fmt(pt.p), pt.clamped.value,
                _fmt(pt.market_price), _fmt(pt.model_price), _fmt(pt.residual),
            ]) + "\n")
    meta = {
        "method": surface.method,
        "spot": surface.spot,
        "rate": surface.rate,
        "as_of": surface.as_of.isoformat() if surface.as_of else None,
        "points": len(surface.points),
        "failures": list(surface.failures),
    }
    with open(_meta_path(path), "w", encoding="utf-8", newline="\n") as fh:
        json.dump(meta, fh, indent=2, sort_keys=True)
        fh.write("\n")


def read_surface(path: Union[str, Path]) -> PredictabilitySurface:
    """Read back a surface written by write_surface; unknown extra columns are ignored."""
    what = "surface"
    idx, rows, extra = _read_rows(path, SURFACE_HEADER, what)
    if extra:
        warnings.warn(f"{what} {path}: ignoring unknown columns {extra}", stacklevel=2)
    points: list[CalibrationPoint] = []
    for line_no, row in rows:
        if len(row) < len(SURFACE_HEADER):
            raise ParseError(f"{what} line {line_no}: expected {len(SURFACE_HEADER)} fields, got {len(row)}")
        flag_text = row[idx["clamped"]].strip()
        try:
            flag = ClampStatus(flag_text)
        except ValueError as exc:
            raise ParseError(f"{what} line {line_no}: unknown clamp flag {flag_text!r}") from exc
        try:
            points.append(CalibrationPoint(
                moneyness=_parse_float(row[idx["moneyness"]], what, line_no),
                tau=_parse_float(row[idx["tau_years"]], what, line_no),
                p=_parse_float(row[idx["p"]], what, line_no),
                clamped=flag,
                market_price=_parse_float(row[idx["market_price"]], what, line_no),
                model_price=_parse_float(row[idx["model_price"]], what, line_no),
                residual=_parse_float(row[idx["residual"]], what, line_no),
            ))
        except InputError as exc:
            raise ParseError(f"{what} line {line_no}: {exc}") from exc

    meta_file = _meta_path(path)
    if not meta_file.exists():
        raise ParseError(f"{what}: metadata sidecar {meta_file} not found")
    try:
        with open(meta_file, "r", encoding="utf-8") as fh:
            meta = json.load(fh)
    except (OSError, json.JSONDecodeError) as exc:
        raise ParseError(f"{what}: bad metadata sidecar: {exc}") from exc
    for key in ("method", "spot", "rate"):
        if key not in meta:
            raise ParseError(f"{what}: metadata lacks {key!r}")
    as_of = date.fromisoformat(meta["as_of"]) if meta.get("as_of") else None
    try:
        return PredictabilitySurface(
            method=str(meta["method"]), spot=float(meta["spot"]), rate=float(meta["rate"]),
            as_of=as_of, points=tuple(points), failures=tuple(meta.get("failures", ())),
        )
    except (InputError, TypeError, ValueError) as exc:
        raise ParseError(f"{what}: invalid content: {exc}") from exc


def write_surface_diff(diff: SurfaceDiff, path: Union[str, Path]) -> None:
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(",".join(DIFF_HEADER) + "\n")
        for m, t, dp in diff.points:
            fh.write(f"{_fmt(m)},{_fmt(t)},{_fmt(dp)}\n")
