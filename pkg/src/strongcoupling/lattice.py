"""Exact weak-coupling coefficient tables for the two lattice problems.

Instanton:  delta (f[n+1] - 2 f[n] + f[n-1]) + f[n] - f[n]**3 = 0,
            f[0] = 0, f[n] -> 1.
Blasius:    2 delta (f[n+1] - 3 f[n] + 3 f[n-1] - f[n-2])
              + f[n] (f[n+1] - 2 f[n] + f[n-1]) = 0,
            f[0] = f[-1] = 0, f[n] ~ n.

Both are expanded as f[n] = sum_j a[n, j] delta**j and solved order by order
in exact rational arithmetic.
"""

from __future__ import annotations

import enum
import gzip
import json
import re
from dataclasses import dataclass, field
from pathlib import Path
from typing import Optional

import gmpy2
from gmpy2 import mpq, mpz

from . import __version__
from .errors import FormatError
from .exact import PowerSeries, Rational, format_rational, parse_rational

TABLE_FORMAT = "strongcoupling.coefficient-table"


class ModelId(enum.Enum):
    INSTANTON = "instanton"
    BLASIUS = "blasius"

    @classmethod
    def parse(cls, name: str) -> "ModelId":
        try:
            return cls(name.strip().lower())
        except ValueError:
            raise ValueError(f"unknown model {name!r}; expected instanton or blasius") from None


@dataclass(frozen=True)
class CoefficientRow:
    """Order-``j`` coefficients a[n, j] over the sites n >= 0.

    Sites below ``support_lo`` are zero, sites ``support_lo..support_hi`` are
    listed in ``values``, and for n > support_hi the value is
    ``tail + slope * (n - support_hi - 1)``.  Only the zeroth Blasius row has
    a nonzero slope.
    """

    j: int
    support_lo: int
    support_hi: int
    values: tuple
    tail: Rational
    slope: Rational = mpq(0)

    def __post_init__(self):
        if self.support_lo < 0 or self.support_hi < self.support_lo - 1:
            raise ValueError(f"bad support [{self.support_lo}, {self.support_hi}]")

    def __getitem__(self, n: int) -> Rational:
        if n < 0:
            raise IndexError("negative sites are resolved by the table, not the row")
        if n < self.support_lo:
            return mpq(0)
        if n <= self.support_hi:
            i = n - self.support_lo
            if i >= len(self.values):
                raise LookupError(f"site {n} of order {self.j} was not stored")
            return self.values[i]
        return self.tail + self.slope * (n - self.support_hi - 1)


@dataclass
class CoefficientTable:
    model: ModelId
    max_order: int
    rows: list
    metadata: dict = field(default_factory=dict)
    site_limit: Optional[int] = None

    def __post_init__(self):
        if len(self.rows) != self.max_order + 1:
            raise ValueError(f"expected {self.max_order + 1} rows, got {len(self.rows)}")

    def row(self, j: int) -> CoefficientRow:
        return self.rows[j]

    def value(self, n: int, j: int) -> Rational:
        """a[n, j]; Blasius negative sites use a[-n-1, j] = a[n, j]."""
        if n < 0:
            if self.model is ModelId.BLASIUS:
                n = -n - 1
            else:
                raise IndexError("the instanton lattice has no negative sites")
        return self.rows[j][n]

    def site_coefficients(self, n: int, order: Optional[int] = None) -> list:
        order = self.max_order if order is None else order
        return [self.value(n, j) for j in range(order + 1)]

    def site_series(self, n: int = 1, order: Optional[int] = None) -> PowerSeries:
        """The weak-coupling series of site ``n`` as a ``PowerSeries``."""
        return PowerSeries(tuple(self.site_coefficients(n, order)))

    def truncated(self, max_order: int) -> "CoefficientTable":
        if max_order > self.max_order:
            raise ValueError(f"table only reaches order {self.max_order}")
        return CoefficientTable(self.model, max_order, self.rows[: max_order + 1],
                                dict(self.metadata), self.site_limit)

    def __eq__(self, other):
        if not isinstance(other, CoefficientTable):
            return NotImplemented
        return (self.model == other.model and self.max_order == other.max_order
                and self.rows == other.rows and self.site_limit == other.site_limit)


def _metadata(model: ModelId, order: int) -> dict:
    return {"generator": f"strongcoupling {__version__}", "model": model.value,
            "max_order": order}


def generate_instanton(N: int) -> CoefficientTable:
    """Exact instanton table through order ``N``.

    Matching powers of delta gives, for n >= 1 and j >= 1,

        a[n,j] = (a[n+1,j-1] - 2 a[n,j-1] + a[n-1,j-1]) / 2
                 - 3/2 [g^2]_j - 1/2 [g^3]_j,      g = f[n] - 1,

    where the square and cube of ``g`` at each site are cached and extended
    by one coefficient per order.  a[n, j] vanishes for n > j.
    """
    if N < 1:
        raise ValueError("order must be at least 1")
    half = mpq(1, 2)
    three_halves = mpq(3, 2)
    zero = mpq(0)
    nsites = N + 2
    a = [[zero] * (N + 1) for _ in range(nsites)]
    sq = [[zero] * (N + 1) for _ in range(nsites)]
    cu = [[zero] * (N + 1) for _ in range(nsites)]
    for n in range(1, nsites):
        a[n][0] = mpq(1)
    rows = [CoefficientRow(0, 1, 1, (mpq(1),), mpq(1))]
    for j in range(1, N + 1):
        for n in range(1, j + 1):
            an, sn, cn = a[n], sq[n], cu[n]
            s = zero
            for k in range(1, j):
                if an[k] and an[j - k]:
                    s += an[k] * an[j - k]
            sn[j] = s
            c = zero
            for k in range(1, j - 1):
                if an[k] and sn[j - k]:
                    c += an[k] * sn[j - k]
            cn[j] = c
            lap = a[n + 1][j - 1] - 2 * an[j - 1] + a[n - 1][j - 1]
            an[j] = half * lap - three_halves * s - half * c
        rows.append(CoefficientRow(j, 1, j, tuple(a[n][j] for n in range(1, j + 1)), zero))
    return CoefficientTable(ModelId.INSTANTON, N, rows, _metadata(ModelId.INSTANTON, N))


def generate_blasius(N: int) -> CoefficientTable:
    """Exact Blasius table through order ``N``.

    Order j of the difference equation fixes the second difference,

        a[n+1,j] - 2 a[n,j] + a[n-1,j] = R[n,j]
          = -(2/n) T[n,j-1] - (1/n) sum_{k=1}^{j-1} a[n,k] D[n,j-k],

    with T and D the third and second differences.  R is finitely supported
    because every row j >= 1 is constant beyond its support.  The first
    differences are accumulated from infinity (d[n] = -sum_{m>n} R[m], so the
    correction does not grow with n) and the values from a[0,j] = 0.

    Each row is held as integer numerators over one common denominator so
    the inner convolution runs in integer arithmetic.
    """
    if N < 1:
        raise ValueError("order must be at least 1")
    # row k: nums[k][n] for n = 0..hi[k] (value at n >= hi[k] equals nums[k][hi[k]])
    nums: list = [None]
    dens: list = [None]
    his: list = [None]
    d2: list = [None]  # second-difference numerators, index n = 1..hi[k]
    rows = [CoefficientRow(0, 1, 1, (mpq(1),), mpq(2), mpq(1))]

    def numerator(k, n):
        if n < 0:
            n = -n - 1
        row, h = nums[k], his[k]
        return row[n] if n <= h else row[h]

    for j in range(1, N + 1):
        if j == 1:
            bound = 1
        else:
            bound = max([his[j - 1] + 1] + [his[k] for k in range(1, j)])
        common = mpz(1)
        for k in range(1, j):
            common = gmpy2.lcm(common, dens[k] * dens[j - k])
        mult = {k: common // (dens[k] * dens[j - k]) for k in range(1, j)}

        R = [mpq(0)] * (bound + 1)
        for n in range(1, bound + 1):
            if j == 1:
                third = mpq(-1 if n == 1 else 0)
            else:
                g = lambda i: numerator(j - 1, i)  # noqa: E731
                third = mpq(g(n + 1) - 3 * g(n) + 3 * g(n - 1) - g(n - 2), dens[j - 1])
            s = mpz(0)
            for k in range(1, j):
                if n <= his[j - k]:
                    x = d2[j - k][n]
                    if x:
                        s += mult[k] * numerator(k, n) * x
            R[n] = (-2 * third - mpq(s, common)) / n

        d = [mpq(0)] * (bound + 1)
        acc = mpq(0)
        for n in range(bound, 0, -1):
            acc += R[n]
            d[n - 1] = -acc
        vals = [mpq(0)]
        for n in range(1, bound + 1):
            vals.append(vals[-1] + d[n - 1])
        tail = vals[-1]
        while len(vals) > 2 and vals[-2] == tail:
            vals.pop()
        h = len(vals) - 1

        den = mpz(1)
        for v in vals:
            den = gmpy2.lcm(den, v.denominator)
        row_nums = [v.numerator * (den // v.denominator) for v in vals]
        nums.append(row_nums)
        dens.append(den)
        his.append(h)
        d2.append([mpz(0)] + [numerator(j, n + 1) - 2 * row_nums[n] + row_nums[n - 1]
                              for n in range(1, h + 1)])
        rows.append(CoefficientRow(j, 1, h, tuple(vals[1:]), tail))
    return CoefficientTable(ModelId.BLASIUS, N, rows, _metadata(ModelId.BLASIUS, N))


def generate(model, N: int) -> CoefficientTable:
    model = ModelId.parse(model) if isinstance(model, str) else model
    if model is ModelId.INSTANTON:
        return generate_instanton(N)
    return generate_blasius(N)


# -- persistence --------------------------------------------------------------

def _row_json(row: CoefficientRow, max_site: Optional[int]) -> dict:
    values = row.values
    if max_site is not None:
        keep = max(0, min(len(values), max_site - row.support_lo + 1))
        values = values[:keep]
    out = {"j": row.j, "support": [row.support_lo, row.support_hi],
           "values": [format_rational(v) for v in values],
           "tail": format_rational(row.tail)}
    if row.slope != 0:
        out["slope"] = format_rational(row.slope)
    return out


def dumps_table(table: CoefficientTable, max_site: Optional[int] = None) -> str:
    """Serialize to JSON text, one row per line.

    ``max_site`` drops explicit values beyond that site (tails are kept);
    such a table only answers queries for n <= max_site.
    """
    limit = max_site if max_site is not None else table.site_limit
    if table.site_limit is not None and limit is not None:
        limit = min(limit, table.site_limit)
    head = {"format": TABLE_FORMAT, "model": table.model.value,
            "max_order": table.max_order}
    if limit is not None:
        head["site_limit"] = limit
    lines = ["{"]
    for key, value in head.items():
        lines.append(f"  {json.dumps(key)}: {json.dumps(value)},")
    lines.append(f'  "metadata": {json.dumps(table.metadata, sort_keys=True)},')
    lines.append('  "rows": [')
    rows = [json.dumps(_row_json(r, limit)) for r in table.rows]
    lines.append(",\n".join("    " + r for r in rows))
    lines.append("  ]")
    lines.append("}")
    return "\n".join(lines) + "\n"


def save_table(table: CoefficientTable, destination, max_site: Optional[int] = None) -> Path:
    path = Path(destination)
    data = dumps_table(table, max_site).encode("utf-8")
    if path.suffix == ".gz":
        # no name or mtime in the header, so output is byte-identical across runs
        data = gzip.compress(data, mtime=0)
    path.write_bytes(data)
    return path


def _rational_field(text, line, name):
    if not isinstance(text, str):
        raise FormatError(f"expected a 'num/den' string, got {text!r}", line, name)
    try:
        return parse_rational(text)
    except ValueError as exc:
        raise FormatError(str(exc), line, name) from None


def loads_table(text: str) -> CoefficientTable:
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise FormatError(f"invalid JSON: {exc.msg}", exc.lineno) from None
    if not isinstance(doc, dict):
        raise FormatError("top level must be an object", 1)
    row_lines = [text.count("\n", 0, m.start()) + 1 for m in re.finditer(r'"j"\s*:', text)]

    for key in ("model", "max_order", "rows"):
        if key not in doc:
            raise FormatError("missing key", None, key)
    try:
        model = ModelId.parse(str(doc["model"]))
    except ValueError as exc:
        raise FormatError(str(exc), None, "model") from None
    max_order = doc["max_order"]
    if not isinstance(max_order, int) or max_order < 0:
        raise FormatError("max_order must be a nonnegative integer", None, "max_order")
    raw_rows = doc["rows"]
    if not isinstance(raw_rows, list) or len(raw_rows) != max_order + 1:
        raise FormatError(f"expected {max_order + 1} rows", None, "rows")
    if len(row_lines) != len(raw_rows):
        row_lines = [None] * len(raw_rows)

    rows = []
    for i, (raw, line) in enumerate(zip(raw_rows, row_lines)):
        if not isinstance(raw, dict):
            raise FormatError("row must be an object", line, f"rows[{i}]")
        if raw.get("j") != i:
            raise FormatError(f"row {i} has j={raw.get('j')!r}", line, "j")
        support = raw.get("support")
        if (not isinstance(support, list) or len(support) != 2
                or not all(isinstance(s, int) for s in support)):
            raise FormatError("support must be [lo, hi]", line, "support")
        values = raw.get("values")
        if not isinstance(values, list):
            raise FormatError("values must be a list", line, "values")
        vals = tuple(_rational_field(v, line, "values") for v in values)
        tail = _rational_field(raw.get("tail"), line, "tail")
        slope = _rational_field(raw["slope"], line, "slope") if "slope" in raw else mpq(0)
        lo, hi = support
        if "site_limit" not in doc and len(vals) != hi - lo + 1:
            raise FormatError(f"support [{lo}, {hi}] needs {hi - lo + 1} values, got {len(vals)}",
                              line, "values")
        try:
            rows.append(CoefficientRow(i, lo, hi, vals, tail, slope))
        except ValueError as exc:
            raise FormatError(str(exc), line, "support") from None
    metadata = doc.get("metadata", {})
    if not isinstance(metadata, dict):
        raise FormatError("metadata must be an object", None, "metadata")
    return CoefficientTable(model, max_order, rows, metadata, doc.get("site_limit"))


def load_table(source) -> CoefficientTable:
    path = Path(source)
    data = path.read_bytes()
    if path.suffix == ".gz":
        data = gzip.decompress(data)
    return loads_table(data.decode("utf-8"))
