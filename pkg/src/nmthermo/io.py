"""CSV output and operator-file input."""
from __future__ import annotations

import json
import math
import os
import sys
import tempfile
from contextlib import contextmanager
from typing import Iterable, Mapping, Sequence

import numpy as np

from .dynamics import OhmicParams, OhmicRate
from .qubit import LindbladTerm

FULL_PRECISION = 17


class OperatorFileError(ValueError):
    """Malformed operator document; ``line``/``column`` are 1-based when known."""

    def __init__(self, msg: str, line: int | None = None, column: int | None = None):
        where = f" (line {line}, column {column})" if line is not None else ""
        super().__init__(msg + where)
        self.line, self.column = line, column


def format_number(v: float, precision: int = FULL_PRECISION) -> str:
    return f"{float(v):.{precision}g}"


def format_log_number(log_v: float, precision: int = FULL_PRECISION) -> str:
    """Decimal text for ``exp(log_v)``, valid even where the float underflows."""
    if not math.isfinite(log_v):
        return "nan" if math.isnan(log_v) else format_number(math.exp(log_v), precision)
    v = math.exp(log_v)
    if v > 1e-300:
        return format_number(v, precision)
    l10 = log_v / math.log(10)
    e = math.floor(l10)
    mant = 10 ** (l10 - e)
    if mant >= 10 - 0.5 * 10 ** (1 - precision):
        mant, e = 1.0, e + 1
    return f"{mant:.{precision - 1}g}e{e:+d}"


@contextmanager
def open_output(path: str | os.PathLike):
    """Text handle for ``path``; ``"-"`` is stdout.  Files are replaced atomically."""
    if str(path) == "-":
        yield sys.stdout
        sys.stdout.flush()
        return
    path = os.fspath(path)
    folder = os.path.dirname(os.path.abspath(path))
    fd, tmp = tempfile.mkstemp(dir=folder, prefix=".tmp-", suffix=os.path.basename(path))
    try:
        with os.fdopen(fd, "w", newline="") as fh:
            yield fh
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def write_columns(fh, columns: Mapping[str, Sequence], precision: int = FULL_PRECISION,
                  text_columns: Mapping[str, Sequence[str]] | None = None) -> None:
    """Write equal-length columns as CSV.  ``text_columns`` are written verbatim."""
    text_columns = text_columns or {}
    names = list(columns)
    arrays = [text_columns[n] if n in text_columns else np.asarray(columns[n], dtype=float)
              for n in names]
    fh.write(",".join(names) + "\n")
    for row in zip(*arrays):
        fh.write(",".join(v if isinstance(v, str) else format_number(v, precision) for v in row) + "\n")


def write_csv(path, columns: Mapping[str, Sequence], precision: int = FULL_PRECISION, **kw) -> None:
    with open_output(path) as fh:
        write_columns(fh, columns, precision, **kw)


# --- operator documents ---------------------------------------------------

def _matrix(entry, k: int) -> np.ndarray:
    try:
        arr = np.asarray(entry, dtype=float)
    except (TypeError, ValueError):
        raise OperatorFileError(f"term {k}: matrix entries must be [re, im] number pairs") from None
    if arr.shape != (2, 2, 2):
        raise OperatorFileError(f"term {k}: matrix must be 2x2 of [re, im] pairs, got shape {arr.shape}")
    return arr[..., 0] + 1j * arr[..., 1]


def _rate(entry, k: int):
    if isinstance(entry, bool):
        raise OperatorFileError(f"term {k}: rate must be a number or an ohmic rate object")
    if isinstance(entry, (int, float)):
        return float(entry)
    if isinstance(entry, dict) and entry.get("type") == "ohmic":
        try:
            return OhmicRate(OhmicParams(float(entry["s"]), float(entry.get("omega_c", 1.0))))
        except (KeyError, TypeError, ValueError) as exc:
            raise OperatorFileError(f"term {k}: bad ohmic rate ({exc})") from None
    raise OperatorFileError(f"term {k}: rate must be a number or an ohmic rate object")


def parse_operators(text: str) -> list[LindbladTerm]:
    """Parse ``[{"matrix": [[[re, im], ...], ...], "rate": ...}, ...]``."""
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise OperatorFileError(f"invalid JSON: {exc.msg}", exc.lineno, exc.colno) from None
    if not isinstance(doc, list) or not doc:
        raise OperatorFileError("expected a non-empty array of Lindblad terms")
    terms = []
    for k, item in enumerate(doc):
        if not isinstance(item, dict) or "matrix" not in item:
            raise OperatorFileError(f"term {k}: expected an object with a 'matrix' field")
        terms.append(LindbladTerm(_matrix(item["matrix"], k), _rate(item.get("rate", 1.0), k)))
    return terms


def load_operators(path) -> list[LindbladTerm]:
    with open(path) as fh:
        return parse_operators(fh.read())


def dump_operators(terms: Iterable[LindbladTerm]) -> str:
    """Inverse of :func:`parse_operators` for constant-rate terms."""
    out = []
    for term in terms:
        if callable(term.rate):
            raise ValueError("only constant rates can be serialised")
        m = [[[float(z.real), float(z.imag)] for z in row] for row in term.operator]
        out.append({"matrix": m, "rate": float(term.rate)})
    return json.dumps(out)
