"""Invoice ingestion and the weighted directed debt graph.

Companies are vertices; an edge (u, v) with weight w means u owes v the
amount w, aggregated over all invoices from u to v. All amounts are exact
integers in minor currency units. Floating point never touches money.
"""

from __future__ import annotations

import csv
import json
from dataclasses import dataclass
from datetime import date
from fractions import Fraction
from typing import IO, Iterable, Iterator

CompanyId = str

# A circuit is a cycle v1 -> v2 -> ... -> vk -> v1, stored in canonical
# rotation: the tuple starts at the smallest vertex id.
Circuit = tuple[CompanyId, ...]

CSV_HEADER = ["invoice_id", "debtor", "creditor", "amount_minor", "issue_date"]


class InvoiceError(ValueError):
    """A record failed validation. `locator` names the offending record."""

    def __init__(self, locator: str, reason: str):
        super().__init__(f"{locator}: {reason}")
        self.locator = locator
        self.reason = reason


class DensityUndefinedError(ValueError):
    """Density requires at least two vertices."""


class StaleCircuitError(RuntimeError):
    """A circuit references an edge that is missing or exhausted."""


@dataclass(frozen=True)
class Invoice:
    """One payment obligation: debtor owes creditor `amount` minor units."""

    invoice_id: str
    debtor: CompanyId
    creditor: CompanyId
    amount: int
    issue_date: date


@dataclass(frozen=True)
class RejectedRecord:
    locator: str
    reason: str


@dataclass
class IngestResult:
    graph: "DebtGraph"
    accepted: int
    rejects: list[RejectedRecord]


class DebtGraph:
    """Weighted directed simple graph of aggregated net obligations.

    Invariants: no self-loops, all weights > 0 (an edge is removed the
    moment its weight reaches zero), at most one edge per ordered pair.
    Antiparallel pairs (u, v) and (v, u) may coexist.
    """

    __slots__ = ("vertices", "_adj")

    def __init__(self) -> None:
        self.vertices: set[CompanyId] = set()
        # debtor -> {creditor: weight}
        self._adj: dict[CompanyId, dict[CompanyId, int]] = {}

    def __contains__(self, vertex: CompanyId) -> bool:
        return vertex in self.vertices

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, DebtGraph):
            return NotImplemented
        return self.vertices == other.vertices and dict(self.edges()) == dict(other.edges())

    def add_vertex(self, v: CompanyId) -> None:
        if not v:
            raise ValueError("company id must be non-empty")
        self.vertices.add(v)

    def add_obligation(self, debtor: CompanyId, creditor: CompanyId, amount: int) -> None:
        """Aggregate `amount` onto the (debtor, creditor) edge."""
        if debtor == creditor:
            raise ValueError("self-obligation is not representable")
        if amount <= 0:
            raise ValueError("obligation amount must be positive")
        self.add_vertex(debtor)
        self.add_vertex(creditor)
        row = self._adj.setdefault(debtor, {})
        row[creditor] = row.get(creditor, 0) + amount

    def weight(self, debtor: CompanyId, creditor: CompanyId) -> int:
        """Current weight of (debtor, creditor), 0 if the edge is absent."""
        return self._adj.get(debtor, {}).get(creditor, 0)

    def successors(self, debtor: CompanyId) -> dict[CompanyId, int]:
        return self._adj.get(debtor, {})

    def edges(self) -> Iterator[tuple[tuple[CompanyId, CompanyId], int]]:
        for u, row in self._adj.items():
            for v, w in row.items():
                yield (u, v), w

    def edge_count(self) -> int:
        return sum(len(row) for row in self._adj.values())

    def total_weight(self) -> int:
        return sum(w for _, w in self.edges())

    def copy(self) -> "DebtGraph":
        g = DebtGraph()
        g.vertices = set(self.vertices)
        g._adj = {u: dict(row) for u, row in self._adj.items()}
        return g

    def replace_with(self, other: "DebtGraph") -> None:
        """Adopt another graph's contents in place."""
        self.vertices = other.vertices
        self._adj = other._adj

    def _decrease(self, u: CompanyId, v: CompanyId, amount: int) -> None:
        row = self._adj[u]
        left = row[v] - amount
        if left < 0:
            raise AssertionError("edge weight underflow")
        if left == 0:
            del row[v]
            if not row:
                del self._adj[u]
        else:
            row[v] = left

    # -- serialization --------------------------------------------------

    def to_json(self) -> str:
        """Deterministic snapshot: sorted vertices, edges sorted by pair."""
        payload = {
            "vertices": sorted(self.vertices),
            "edges": [
                {"debtor": u, "creditor": v, "amount_minor": w}
                for (u, v), w in sorted(self.edges())
            ],
        }
        return json.dumps(payload, indent=2) + "\n"

    @classmethod
    def from_json(cls, text: str) -> "DebtGraph":
        payload = json.loads(text)
        g = cls()
        for v in payload["vertices"]:
            g.add_vertex(v)
        for e in payload["edges"]:
            g.add_obligation(e["debtor"], e["creditor"], e["amount_minor"])
        return g


def circuit_edges(circuit: tuple[CompanyId, ...]) -> Iterator[tuple[CompanyId, CompanyId]]:
    k = len(circuit)
    for i in range(k):
        yield circuit[i], circuit[(i + 1) % k]


def canonical_rotation(vertices: Iterable[CompanyId]) -> tuple[CompanyId, ...]:
    """Rotate a cycle's vertex list to start at the smallest id."""
    seq = tuple(vertices)
    pivot = seq.index(min(seq))
    return seq[pivot:] + seq[:pivot]


def circuit_value(g: DebtGraph, circuit: tuple[CompanyId, ...]) -> int:
    """Settleable amount of `circuit`: its minimum edge weight, 0 if any
    edge is absent. Never mutates the graph."""
    value = None
    for u, v in circuit_edges(circuit):
        w = g.weight(u, v)
        if w == 0:
            return 0
        value = w if value is None else min(value, w)
    return value or 0


def settle(g: DebtGraph, circuit: tuple[CompanyId, ...]) -> int:
    """Subtract the circuit's minimum edge weight from every edge on it.

    Returns the settled amount per edge. Edges that reach zero are removed.
    Raises StaleCircuitError (leaving the graph untouched) if any edge is
    missing or already exhausted.
    """
    x = circuit_value(g, circuit)
    if x == 0:
        raise StaleCircuitError(f"circuit {','.join(circuit)} is no longer settleable")
    for u, v in circuit_edges(circuit):
        g._decrease(u, v, x)
    return x


def density(g: DebtGraph) -> Fraction:
    """Edge count over the maximum possible |V|*(|V|-1), as an exact rational."""
    n = len(g.vertices)
    if n < 2:
        raise DensityUndefinedError("density is undefined for fewer than 2 vertices")
    return Fraction(g.edge_count(), n * (n - 1))


# -- ingestion ----------------------------------------------------------


def _check_invoice(inv: Invoice, seen_ids: set[str], locator: str) -> None:
    if not inv.invoice_id:
        raise InvoiceError(locator, "missing invoice_id")
    if inv.invoice_id in seen_ids:
        raise InvoiceError(locator, f"duplicate invoice_id {inv.invoice_id!r}")
    if not inv.debtor or not inv.creditor:
        raise InvoiceError(locator, "missing debtor or creditor")
    if inv.debtor == inv.creditor:
        raise InvoiceError(locator, "debtor equals creditor")
    if not isinstance(inv.amount, int) or inv.amount <= 0:
        raise InvoiceError(locator, f"amount must be a positive integer, got {inv.amount!r}")


def ingest(records: Iterable[Invoice], *, strict: bool = True) -> IngestResult:
    """Validate and aggregate invoices into a debt graph.

    Strict mode aborts on the first invalid record; lenient mode skips it
    and reports it in the result. The graph contains exactly the companies
    mentioned by accepted invoices; parallel invoices sum onto one edge.
    """
    graph = DebtGraph()
    rejects: list[RejectedRecord] = []
    seen_ids: set[str] = set()
    accepted = 0
    for i, inv in enumerate(records):
        locator = f"record {i + 1}"
        try:
            _check_invoice(inv, seen_ids, locator)
        except InvoiceError as err:
            if strict:
                raise
            rejects.append(RejectedRecord(err.locator, err.reason))
            continue
        seen_ids.add(inv.invoice_id)
        graph.add_obligation(inv.debtor, inv.creditor, inv.amount)
        accepted += 1
    return IngestResult(graph, accepted, rejects)


def _parse_row(row: dict[str, str], locator: str) -> Invoice:
    missing = [k for k in CSV_HEADER if row.get(k) in (None, "")]
    if missing:
        raise InvoiceError(locator, f"missing field(s): {', '.join(missing)}")
    try:
        amount = int(row["amount_minor"])
    except ValueError:
        raise InvoiceError(locator, f"amount_minor is not an integer: {row['amount_minor']!r}")
    try:
        issued = date.fromisoformat(row["issue_date"])
    except ValueError:
        raise InvoiceError(locator, f"issue_date is not an ISO date: {row['issue_date']!r}")
    return Invoice(row["invoice_id"], row["debtor"], row["creditor"], amount, issued)


def read_invoices(stream: IO[str], *, strict: bool = True) -> Iterator[Invoice | RejectedRecord]:
    """Parse the invoice CSV, yielding Invoices and (in lenient mode)
    RejectedRecords for rows that do not parse.

    Expected header: invoice_id,debtor,creditor,amount_minor,issue_date
    """
    reader = csv.DictReader(stream)
    if reader.fieldnames is None:
        return
    if list(reader.fieldnames) != CSV_HEADER:
        raise InvoiceError("line 1", f"bad header {reader.fieldnames!r}, expected {CSV_HEADER!r}")
    for row in reader:
        locator = f"line {reader.line_num}"
        try:
            yield _parse_row(row, locator)
        except InvoiceError as err:
            if strict:
                raise
            yield RejectedRecord(err.locator, err.reason)


def ingest_csv(stream: IO[str], *, strict: bool = True) -> IngestResult:
    """Read and aggregate an invoice CSV in one pass.

    Parse failures and validation failures are reported with a line
    locator; semantic validation (duplicate ids etc.) happens per record.
    """
    graph = DebtGraph()
    rejects: list[RejectedRecord] = []
    seen_ids: set[str] = set()
    accepted = 0
    for item in read_invoices(stream, strict=strict):
        if isinstance(item, RejectedRecord):
            rejects.append(item)
            continue
        locator = f"invoice {item.invoice_id!r}"
        try:
            _check_invoice(item, seen_ids, locator)
        except InvoiceError as err:
            if strict:
                raise
            rejects.append(RejectedRecord(err.locator, err.reason))
            continue
        seen_ids.add(item.invoice_id)
        graph.add_obligation(item.debtor, item.creditor, item.amount)
        accepted += 1
    return IngestResult(graph, accepted, rejects)


def write_invoices_csv(stream: IO[str], invoices: Iterable[Invoice]) -> None:
    writer = csv.writer(stream, lineterminator="\n")
    writer.writerow(CSV_HEADER)
    for inv in invoices:
        writer.writerow([inv.invoice_id, inv.debtor, inv.creditor, inv.amount, inv.issue_date.isoformat()])
