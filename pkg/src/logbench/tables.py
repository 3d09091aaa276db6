"""Columnar tables for log events and sequences.

Every dataset in this package is held as a small set of named numpy columns of
equal length. Two concrete layouts exist: event tables (one row per log line)
and sequence tables (one row per trace / block / application run). Tables are
treated as immutable after construction; every operation returns a new table.
"""

from __future__ import annotations

import json
from typing import Iterator, Mapping

import numpy as np

# Mandatory columns for an event table. ``m_`` marks columns that come
# straight from the raw data, ``e_`` marks columns derived by enhancers.
EVENT_MANDATORY = ("m_message", "m_timestamp")
SEQUENCE_MANDATORY = ("seq_id",)

_TIMESTAMP_DTYPE = np.dtype("datetime64[us]")
_DURATION_DTYPE = np.dtype("timedelta64[us]")

# dtype tags used by the JSON table format
_TAG_STR = "str"
_TAG_INT = "int"
_TAG_FLOAT = "float"
_TAG_BOOL = "bool"
_TAG_TIMESTAMP = "timestamp_us"
_TAG_DURATION = "duration_us"
_TAG_STR_LIST = "str_list"
_TAG_INT_LIST = "int_list"

_FORMAT_NAME = "logbench.table"
_FORMAT_VERSION = 1


def _coerce_column(values) -> np.ndarray:
    """Bring a column candidate into one of the supported array dtypes."""
    if isinstance(values, np.ndarray):
        arr = values
        if arr.ndim != 1:
            raise ValueError("columns must be one dimensional")
        kind = arr.dtype.kind
        if kind == "M":
            arr = arr.astype(_TIMESTAMP_DTYPE)
        elif kind == "m":
            arr = arr.astype(_DURATION_DTYPE)
        elif kind == "i":
            arr = arr.astype(np.int64)
        elif kind == "f":
            arr = arr.astype(np.float64)
        elif kind == "b":
            arr = arr.astype(np.bool_)
        elif kind == "U":
            out = np.empty(len(arr), dtype=object)
            for i, v in enumerate(arr):
                out[i] = str(v)
            arr = out
        elif kind == "O":
            pass
        else:
            raise TypeError(f"unsupported column dtype: {arr.dtype}")
        return arr

    values = list(values)
    if values and isinstance(values[0], (list, tuple)):
        # list-valued column (token lists, event id traces); keep as object
        # and never let numpy guess a 2-d shape
        out = np.empty(len(values), dtype=object)
        for i, v in enumerate(values):
            out[i] = list(v)
        return out
    if values and all(isinstance(v, bool) for v in values):
        return np.asarray(values, dtype=np.bool_)
    if values and all(isinstance(v, int) and not isinstance(v, bool) for v in values):
        return np.asarray(values, dtype=np.int64)
    if values and all(isinstance(v, float) for v in values):
        return np.asarray(values, dtype=np.float64)
    out = np.empty(len(values), dtype=object)
    for i, v in enumerate(values):
        out[i] = v
    return out


def _freeze(arr: np.ndarray) -> np.ndarray:
    try:
        arr.flags.writeable = False
    except ValueError:
        pass
    return arr


class Table:
    """Ordered mapping of column name to a 1-d numpy array, all equal length.

    ``meta`` carries loader diagnostics (dropped line counts and the like);
    it is informational and ignored by equality and serialization of data.
    """

    def __init__(self, columns: Mapping[str, object], meta: dict | None = None):
        self._columns: dict[str, np.ndarray] = {}
        n = None
        for name, values in columns.items():
            arr = _coerce_column(values)
            if n is None:
                n = len(arr)
            elif len(arr) != n:
                raise ValueError(
                    f"column {name!r} has length {len(arr)}, expected {n}"
                )
            self._columns[name] = _freeze(arr)
        self._n = 0 if n is None else n
        self.meta: dict = dict(meta or {})

    # -- basic access ----------------------------------------------------

    def __len__(self) -> int:
        return self._n

    def __contains__(self, name: str) -> bool:
        return name in self._columns

    def __getitem__(self, name: str) -> np.ndarray:
        return self._columns[name]

    def __iter__(self) -> Iterator[str]:
        return iter(self._columns)

    @property
    def column_names(self) -> list[str]:
        return list(self._columns)

    def __repr__(self) -> str:
        return f"{type(self).__name__}({self._n} rows, columns={self.column_names})"

    # -- derived tables --------------------------------------------------

    def with_column(self, name: str, values) -> "Table":
        cols = dict(self._columns)
        cols[name] = values
        return type(self)(cols, meta=self.meta)

    def drop_column(self, name: str) -> "Table":
        cols = {k: v for k, v in self._columns.items() if k != name}
        return type(self)(cols, meta=self.meta)

    def take(self, indices) -> "Table":
        idx = np.asarray(indices, dtype=np.int64)
        cols = {name: arr[idx] for name, arr in self._columns.items()}
        return type(self)(cols, meta=self.meta)

    def head(self, n: int = 5) -> "Table":
        return self.take(np.arange(min(n, self._n)))

    def equals(self, other: "Table") -> bool:
        if self.column_names != other.column_names or len(self) != len(other):
            return False
        for name in self._columns:
            a, b = self._columns[name], other._columns[name]
            if a.dtype.kind != b.dtype.kind:
                return False
            if a.dtype.kind == "O":
                if any(x != y for x, y in zip(a, b)):
                    return False
            elif a.dtype.kind == "f":
                if not np.array_equal(a, b, equal_nan=True):
                    return False
            else:
                if not np.array_equal(a, b):
                    return False
        return True

    # -- serialization ---------------------------------------------------

    def _column_tag(self, arr: np.ndarray) -> str:
        kind = arr.dtype.kind
        if kind == "M":
            return _TAG_TIMESTAMP
        if kind == "m":
            return _TAG_DURATION
        if kind == "i":
            return _TAG_INT
        if kind == "f":
            return _TAG_FLOAT
        if kind == "b":
            return _TAG_BOOL
        # object column: look at the first non-null value
        for v in arr:
            if v is None:
                continue
            if isinstance(v, list):
                if v and isinstance(v[0], str):
                    return _TAG_STR_LIST
                return _TAG_INT_LIST
            return _TAG_STR
        return _TAG_STR

    def to_dict(self) -> dict:
        """Plain-python representation used by the JSON table format."""
        cols = []
        for name, arr in self._columns.items():
            tag = self._column_tag(arr)
            if tag == _TAG_TIMESTAMP:
                ints = arr.astype(np.int64)
                nat = np.isnat(arr)
                vals = [None if nat[i] else int(ints[i]) for i in range(len(arr))]
            elif tag == _TAG_DURATION:
                ints = arr.astype(np.int64)
                nat = np.isnat(arr)
                vals = [None if nat[i] else int(ints[i]) for i in range(len(arr))]
            elif tag == _TAG_INT:
                vals = [int(v) for v in arr]
            elif tag == _TAG_FLOAT:
                vals = [None if np.isnan(v) else float(v) for v in arr]
            elif tag == _TAG_BOOL:
                vals = [bool(v) for v in arr]
            elif tag in (_TAG_STR_LIST, _TAG_INT_LIST):
                vals = [None if v is None else list(v) for v in arr]
            else:
                vals = [None if v is None else str(v) for v in arr]
            cols.append({"name": name, "dtype": tag, "values": vals})
        return {
            "format": _FORMAT_NAME,
            "version": _FORMAT_VERSION,
            "kind": self._kind_name(),
            "rows": self._n,
            "columns": cols,
        }

    def _kind_name(self) -> str:
        return "table"

    def save(self, path) -> None:
        """Write the table as deterministic JSON (byte identical per content)."""
        text = json.dumps(self.to_dict(), ensure_ascii=False,
                          separators=(",", ":"))
        with open(path, "w", encoding="utf-8", newline="\n") as f:
            f.write(text)
            f.write("\n")

    @staticmethod
    def _decode_column(tag: str, vals: list) -> np.ndarray:
        if tag == _TAG_TIMESTAMP:
            ints = np.asarray([np.iinfo(np.int64).min if v is None else int(v)
                               for v in vals], dtype=np.int64)
            return ints.view(_TIMESTAMP_DTYPE)
        if tag == _TAG_DURATION:
            ints = np.asarray([np.iinfo(np.int64).min if v is None else int(v)
                               for v in vals], dtype=np.int64)
            return ints.view(_DURATION_DTYPE)
        if tag == _TAG_INT:
            return np.asarray(vals, dtype=np.int64)
        if tag == _TAG_FLOAT:
            return np.asarray([np.nan if v is None else v for v in vals],
                              dtype=np.float64)
        if tag == _TAG_BOOL:
            return np.asarray(vals, dtype=np.bool_)
        out = np.empty(len(vals), dtype=object)
        for i, v in enumerate(vals):
            out[i] = v
        return out

    @classmethod
    def load(cls, path) -> "Table":
        with open(path, "r", encoding="utf-8") as f:
            obj = json.load(f)
        if obj.get("format") != _FORMAT_NAME:
            raise ValueError(f"{path}: not a {_FORMAT_NAME} file")
        kind = obj.get("kind", "table")
        target = {"event": EventTable, "sequence": SequenceTable}.get(kind, Table)
        cols = {c["name"]: cls._decode_column(c["dtype"], c["values"])
                for c in obj["columns"]}
        table = target.__new__(target)
        Table.__init__(table, cols)
        return table

    def write_csv(self, path) -> None:
        """Human-inspectable CSV export. Lists are rendered space separated."""
        import csv

        with open(path, "w", encoding="utf-8", newline="") as f:
            w = csv.writer(f)
            w.writerow(self.column_names)
            cols = [self._columns[name] for name in self.column_names]
            for i in range(self._n):
                row = []
                for arr in cols:
                    v = arr[i]
                    if arr.dtype.kind in "Mm":
                        row.append("" if np.isnat(v) else str(v))
                    elif isinstance(v, list):
                        row.append(" ".join(str(x) for x in v))
                    elif v is None:
                        row.append("")
                    else:
                        row.append(v)
                w.writerow(row)


class EventTable(Table):
    """One row per log line. Requires ``m_message`` and ``m_timestamp``."""

    def _kind_name(self) -> str:
        return "event"


class SequenceTable(Table):
    """One row per sequence (block, application run, ...)."""

    def _kind_name(self) -> str:
        return "sequence"


class ValidationReport:
    """Outcome of structural validation of an event table.

    The report is valid exactly when all three lists are empty.
    """

    def __init__(self, missing_columns: list[str], null_cells: list[tuple],
                 warnings: list[str]):
        self.missing_columns = list(missing_columns)
        self.null_cells = list(null_cells)
        self.warnings = list(warnings)

    @property
    def is_valid(self) -> bool:
        return not (self.missing_columns or self.null_cells or self.warnings)

    def __repr__(self) -> str:
        state = "valid" if self.is_valid else "invalid"
        return (f"ValidationReport({state}, missing={self.missing_columns}, "
                f"nulls={len(self.null_cells)}, warnings={len(self.warnings)})")

    def summary(self) -> str:
        if self.is_valid:
            return "table is valid"
        lines = []
        if self.missing_columns:
            lines.append("missing columns: " + ", ".join(self.missing_columns))
        if self.null_cells:
            lines.append(f"null cells: {len(self.null_cells)}")
        lines.extend(self.warnings)
        return "\n".join(lines)


def _null_mask(arr: np.ndarray) -> np.ndarray:
    kind = arr.dtype.kind
    if kind in "Mm":
        return np.isnat(arr)
    if kind == "f":
        return np.isnan(arr)
    if kind == "O":
        return np.asarray([v is None for v in arr], dtype=bool)
    return np.zeros(len(arr), dtype=bool)


def validate_event_table(table: Table) -> ValidationReport:
    """Check mandatory columns and scan every cell for nulls.

    Null means None in object columns, NaT in time columns and NaN in float
    columns. The seq_id column is exempt from the null scan because loaders
    legitimately emit None there for lines without a sequence marker.
    """
    missing = [c for c in EVENT_MANDATORY if c not in table]
    nulls: list[tuple] = []
    for name in table.column_names:
        if name == "seq_id":
            continue
        mask = _null_mask(table[name])
        if mask.any():
            for i in np.flatnonzero(mask):
                nulls.append((name, int(i)))
    warnings = []
    if missing:
        warnings.append("missing mandatory columns: " + ", ".join(missing))
    if nulls:
        warnings.append(f"{len(nulls)} null cells found")
    return ValidationReport(missing, nulls, warnings)


def split_train_test(table: Table, train_fraction: float, seed: int):
    """Split a table into (train, test) with a seeded shuffle.

    When the table has a ``seq_id`` column the unit of sampling is the unique
    sequence id (all rows of one sequence land on the same side); rows with a
    null seq_id count as singleton units. Otherwise rows are sampled directly.
    Sampling is unstratified. The train side gets ``round(fraction * n_units)``
    units; both sides preserve the original row order.
    """
    if not 0.0 <= train_fraction <= 1.0:
        raise ValueError("train_fraction must be in [0, 1]")
    n = len(table)
    if "seq_id" in table:
        seq = table["seq_id"]
        unit_of_row = np.empty(n, dtype=np.int64)
        unit_ids: dict = {}
        singleton = 0
        for i in range(n):
            sid = seq[i]
            if sid is None:
                unit_of_row[i] = len(unit_ids) + singleton
                singleton += 1
            else:
                key = unit_ids.get(sid)
                if key is None:
                    key = len(unit_ids) + singleton
                    unit_ids[sid] = key
                unit_of_row[i] = key
        n_units = len(unit_ids) + singleton
    else:
        unit_of_row = np.arange(n, dtype=np.int64)
        n_units = n

    rng = np.random.default_rng(seed)
    perm = rng.permutation(n_units)
    n_train = int(round(train_fraction * n_units))
    train_units = np.zeros(n_units, dtype=bool)
    train_units[perm[:n_train]] = True
    row_mask = train_units[unit_of_row] if n else np.zeros(0, dtype=bool)
    train_idx = np.flatnonzero(row_mask)
    test_idx = np.flatnonzero(~row_mask)
    return table.take(train_idx), table.take(test_idx)
