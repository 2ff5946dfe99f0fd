"""Conditional-independence testing: Fisher-z on Gaussian data and a perfect graph oracle."""
from __future__ import annotations

import csv
import math
import threading
from dataclasses import dataclass
from functools import lru_cache
from pathlib import Path
from typing import Iterable, Sequence

import numpy as np

from .errors import DegenerateDataError, InsufficientSamplesError, InvalidQueryError
from .graph import ChainGraph, c_separated

# Matrices whose condition number exceeds this are treated as singular.
MAX_CONDITION = 1e12


@dataclass(frozen=True)
class Dataset:
    """``n x p`` sample matrix; column ``j`` is vertex ``j``."""

    values: np.ndarray
    names: tuple[str, ...] | None = None

    def __post_init__(self):
        values = np.asarray(self.values, dtype=float)
        if values.ndim != 2 or values.shape[0] < 1:
            raise DegenerateDataError("dataset must be a nonempty 2-d array")
        if not np.all(np.isfinite(values)):
            raise DegenerateDataError("dataset contains missing or non-finite values")
        object.__setattr__(self, "values", values)
        if self.names is None:
            object.__setattr__(self, "names", tuple(f"X{j}" for j in range(values.shape[1])))
        elif len(self.names) != values.shape[1]:
            raise DegenerateDataError("number of column names does not match the data")
        else:
            object.__setattr__(self, "names", tuple(self.names))

    @property
    def n(self) -> int:
        return self.values.shape[0]

    @property
    def p(self) -> int:
        return self.values.shape[1]


def read_dataset(path) -> Dataset:
    """Read a CSV file: header row, then one numeric row per sample.

    Lines starting with ``#`` are ignored.
    """
    with open(path, newline="") as fh:
        rows = [r for r in csv.reader(line for line in fh if not line.startswith("#"))]
    rows = [r for r in rows if r]
    if len(rows) < 2:
        raise DegenerateDataError(f"{path}: need a header and at least one sample")
    names = tuple(c.strip() for c in rows[0])
    values = np.empty((len(rows) - 1, len(names)))
    for i, row in enumerate(rows[1:]):
        lineno = i + 2
        if len(row) != len(names):
            raise DegenerateDataError(f"{path}: row {lineno} has {len(row)} cells, expected {len(names)}")
        for j, cell in enumerate(row):
            cell = cell.strip()
            if not cell:
                raise DegenerateDataError(f"{path}: missing value at row {lineno}, column {names[j]!r}")
            try:
                values[i, j] = float(cell)
            except ValueError:
                raise DegenerateDataError(
                    f"{path}: non-numeric value {cell!r} at row {lineno}, column {names[j]!r}"
                ) from None
    return Dataset(values, names)


def write_dataset(data: Dataset, path, header: Iterable[str] = ()) -> None:
    with open(path, "w", newline="") as fh:
        for line in header:
            fh.write(f"# {line}\n")
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(data.names)
        for row in data.values:
            writer.writerow([repr(float(x)) for x in row])


def correlation_matrix(data: Dataset) -> np.ndarray:
    if data.n < 2:
        raise DegenerateDataError("need at least two samples for a correlation")
    sd = data.values.std(axis=0)
    for j in np.flatnonzero(sd == 0):
        raise DegenerateDataError(f"column {data.names[j]!r} has zero variance")
    r = np.corrcoef(data.values, rowvar=False)
    # rounding can leave exact collinearity a few ulps short of +-1
    r = np.where(np.abs(r) > 1.0 - 1e-12, np.sign(r), r)
    np.fill_diagonal(r, 1.0)
    return r


def partial_correlation(r: np.ndarray, x: int, y: int, s: Sequence[int] = (), ridge: float = 0.0) -> float:
    """Partial correlation of ``x`` and ``y`` given ``s`` from a correlation matrix.

    Inverts the principal submatrix on ``{x, y} + s``; ``ridge`` is added to
    its diagonal first (0 disables it).
    """
    s = list(s)
    if x == y or x in s or y in s:
        raise InvalidQueryError("x, y must differ and lie outside the conditioning set")
    if not s:
        return float(r[x, y])
    idx = [x, y, *s]
    sub = r[np.ix_(idx, idx)]
    if ridge:
        sub = sub + ridge * np.eye(len(idx))
    if np.linalg.cond(sub) > MAX_CONDITION:
        raise DegenerateDataError(f"singular correlation submatrix for {x}, {y} given {sorted(s)}")
    prec = np.linalg.inv(sub)
    rho = -prec[0, 1] / math.sqrt(prec[0, 0] * prec[1, 1])
    return float(min(1.0, max(-1.0, rho)))


@dataclass(frozen=True)
class CIResult:
    statistic: float
    p_value: float
    independent: bool

    @property
    def infinite(self) -> bool:
        return math.isinf(self.statistic)


class CISource:
    """Base class for conditional-independence engines.

    Subclasses implement :meth:`_pvalue`; every public test goes through
    :meth:`test`, which validates the query and bumps a thread-safe counter.
    """

    p: int

    def __init__(self):
        self._lock = threading.Lock()
        self._count = 0

    @property
    def test_count(self) -> int:
        return self._count

    def reset_count(self) -> None:
        with self._lock:
            self._count = 0

    def _check(self, x: int, y: int, s: frozenset) -> None:
        if x == y or x in s or y in s:
            raise InvalidQueryError(f"invalid query ({x}, {y} | {sorted(s)})")
        for v in (x, y, *s):
            if not 0 <= v < self.p:
                raise InvalidQueryError(f"vertex {v} outside [0, {self.p})")

    def test(self, x: int, y: int, s: Iterable[int] = (), alpha: float = 0.05) -> CIResult:
        s = frozenset(s)
        self._check(x, y, s)
        with self._lock:
            self._count += 1
        # canonical argument order keeps results bitwise symmetric
        if x > y:
            x, y = y, x
        stat, pval = self._pvalue(x, y, s)
        return CIResult(stat, pval, pval > alpha)

    def pvalue(self, x: int, y: int, s: Iterable[int] = ()) -> float:
        return self.test(x, y, s).p_value

    def association_score(self, x: int, y: int, s: Iterable[int] = ()) -> float:
        """Negative p-value: larger means more strongly associated."""
        return -self.pvalue(x, y, s)

    def marginal_strength(self, t: int, x: int, p_value: float) -> float:
        """Sort key for the marginal screen of MBC-CSP (no test is spent)."""
        raise NotImplementedError

    def _pvalue(self, x: int, y: int, s: frozenset) -> tuple[float, float]:
        raise NotImplementedError


class FisherZ(CISource):
    """Fisher-z partial-correlation test for Gaussian data."""

    def __init__(self, corr: np.ndarray, n: int, ridge: float = 0.0):
        super().__init__()
        corr = np.asarray(corr, dtype=float)
        if corr.ndim != 2 or corr.shape[0] != corr.shape[1]:
            raise DegenerateDataError("correlation matrix must be square")
        self.corr = corr
        self.n = int(n)
        self.p = corr.shape[0]
        self.ridge = ridge

    @classmethod
    def from_dataset(cls, data: Dataset, ridge: float = 0.0) -> "FisherZ":
        return cls(correlation_matrix(data), data.n, ridge=ridge)

    def _pvalue(self, x, y, s):
        dof = self.n - len(s) - 3
        if dof < 1:
            raise InsufficientSamplesError(f"n={self.n} too small for a conditioning set of size {len(s)}")
        rho = partial_correlation(self.corr, x, y, sorted(s), ridge=self.ridge)
        if abs(rho) >= 1.0:
            return math.inf, 0.0
        z = 0.5 * math.log((1 + rho) / (1 - rho))
        stat = math.sqrt(dof) * abs(z)
        return stat, math.erfc(stat / math.sqrt(2))

    def marginal_strength(self, t, x, p_value):
        return abs(float(self.corr[t, x]))


class GraphOracle(CISource):
    """Answers every query by c-separation in a known chain graph (p-value 0 or 1)."""

    def __init__(self, graph: ChainGraph):
        super().__init__()
        self.graph = graph
        self.p = graph.p
        self._separated = lru_cache(maxsize=None)(self._separated_uncached)

    def _separated_uncached(self, x, y, s):
        return c_separated(self.graph, {x}, {y}, s)

    def _pvalue(self, x, y, s):
        if self._separated(x, y, s):
            return 0.0, 1.0
        return math.inf, 0.0

    def marginal_strength(self, t, x, p_value):
        return -p_value


def fisher_z_test(src: FisherZ, x: int, y: int, s=(), alpha: float = 0.05) -> CIResult:
    return src.test(x, y, s, alpha)


def oracle_test(src: GraphOracle, x: int, y: int, s=(), alpha: float = 0.05) -> CIResult:
    return src.test(x, y, s, alpha)


def association_score(src: CISource, x: int, y: int, s=()) -> float:
    return src.association_score(x, y, s)
