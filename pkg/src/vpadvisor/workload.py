"""Schema, workload, and statistics model.

An :class:`Instance` bundles the relational schema (tables and attributes
with byte widths), the transactional workload (transactions made of read
and write queries with row-count statistics), and the advisor settings
(site count, network penalty, cost/load mix weight, optional latency
penalty).  :func:`derive` turns a validated instance into the dense
matrices the evaluators and solvers consume.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from types import MappingProxyType
from typing import Mapping, Optional

import numpy as np

from .errors import ValidationError

READ = "read"
WRITE = "write"
QUERY_KINDS = (READ, WRITE)


@dataclass(frozen=True)
class Attribute:
    """A single column: belongs to one table and occupies ``width`` bytes."""

    id: int
    table_id: int
    name: str
    width: int


@dataclass(frozen=True)
class Table:
    id: int
    name: str
    attribute_ids: tuple[int, ...]


@dataclass(frozen=True)
class Query:
    """One read or write step of a transaction.

    ``accessed_attributes`` lists the columns the query touches directly
    (reads retrieve them, writes modify them).  ``rows_per_table`` gives the
    average number of rows the query retrieves from / writes to each table
    it touches; the keys must be exactly the tables of the accessed
    attributes.
    """

    id: int
    name: str
    kind: str
    frequency: float
    accessed_attributes: frozenset[int]
    rows_per_table: Mapping[int, float]

    def __post_init__(self):
        object.__setattr__(self, "accessed_attributes",
                           frozenset(self.accessed_attributes))
        object.__setattr__(self, "rows_per_table",
                           MappingProxyType(dict(self.rows_per_table)))

    @property
    def is_write(self) -> bool:
        return self.kind == WRITE


@dataclass(frozen=True)
class Transaction:
    id: int
    name: str
    query_ids: tuple[int, ...]


@dataclass(frozen=True)
class Instance:
    """A complete advisor problem: schema + workload + settings.

    ``network_penalty`` prices one transferred byte relative to one locally
    accessed byte.  ``cost_weight`` mixes total access cost (weight
    ``cost_weight``) against the maximum per-site load (weight
    ``1 - cost_weight``).  ``latency_penalty`` — when set — prices each
    write query that must reach a replica off its transaction's site.
    """

    tables: tuple[Table, ...]
    attributes: tuple[Attribute, ...]
    queries: tuple[Query, ...]
    transactions: tuple[Transaction, ...]
    site_count: int
    network_penalty: float = 8.0
    cost_weight: float = 0.1
    latency_penalty: Optional[float] = None

    @property
    def attribute_count(self) -> int:
        return len(self.attributes)

    @property
    def transaction_count(self) -> int:
        return len(self.transactions)

    @property
    def query_count(self) -> int:
        return len(self.queries)

    @property
    def table_count(self) -> int:
        return len(self.tables)


@dataclass(frozen=True)
class CostModel:
    """Dense matrices derived from an instance.

    Flag matrices (all boolean):

    * ``attr_access[a, q]`` — query ``q`` touches attribute ``a`` directly.
    * ``table_access[a, q]`` — query ``q`` touches ``a``'s table (so the
      table fraction holding ``a`` is read/written wherever it lives).
    * ``query_txn[q, t]`` — query ``q`` belongs to transaction ``t``.
    * ``is_write[q]`` — query ``q`` modifies data.
    * ``txn_reads[a, t]`` — some read query of ``t`` touches ``a`` directly,
      so ``a`` must be co-located with ``t``'s site.

    ``access_weight[a, q]`` is the byte weight ``width(a) * frequency(q) *
    rows(q, table(a))``.

    Folded coefficients (see the evaluators):

    * ``coloc_cost[a, t]`` — objective contribution when ``a`` shares a site
      with ``t`` (reads of the fraction minus the transfer the co-located
      replica avoids).
    * ``replica_cost[a]`` — objective contribution of every replica of ``a``
      (write upkeep plus priced transfer).
    * ``coloc_load[a, t]`` — work added to ``t``'s site when ``a`` lives
      there (read traffic).
    * ``replica_load[a]`` — work added to every site holding ``a`` (write
      traffic).
    """

    attr_access: np.ndarray
    table_access: np.ndarray
    query_txn: np.ndarray
    is_write: np.ndarray
    txn_reads: np.ndarray
    access_weight: np.ndarray
    coloc_cost: np.ndarray
    replica_cost: np.ndarray
    coloc_load: np.ndarray
    replica_load: np.ndarray
    attr_table: np.ndarray
    frequencies: np.ndarray
    txn_of_query: np.ndarray


def _freeze(arr: np.ndarray) -> np.ndarray:
    arr.flags.writeable = False
    return arr


def validate(instance: Instance) -> list[str]:
    """Check structural invariants; return a list of violation messages.

    An empty list means the instance is well formed.  Messages carry enough
    context (names/ids) to locate the offending object.
    """
    out: list[str] = []

    for i, table in enumerate(instance.tables):
        if table.id != i:
            out.append(f"table '{table.name}': id {table.id} is not dense (expected {i})")
    for i, attr in enumerate(instance.attributes):
        if attr.id != i:
            out.append(f"attribute '{attr.name}': id {attr.id} is not dense (expected {i})")
    for i, q in enumerate(instance.queries):
        if q.id != i:
            out.append(f"query '{q.name}': id {q.id} is not dense (expected {i})")
    for i, txn in enumerate(instance.transactions):
        if txn.id != i:
            out.append(f"transaction '{txn.name}': id {txn.id} is not dense (expected {i})")

    n_tables = len(instance.tables)
    n_attrs = len(instance.attributes)
    n_queries = len(instance.queries)

    seen_attr = [None] * n_attrs
    for table in instance.tables:
        if not table.attribute_ids:
            out.append(f"table '{table.name}' has no attributes")
        for a in table.attribute_ids:
            if not (0 <= a < n_attrs):
                out.append(f"table '{table.name}' references unknown attribute id {a}")
            elif seen_attr[a] is not None:
                out.append(
                    f"attribute id {a} listed by both table '{seen_attr[a]}' and '{table.name}'")
            else:
                seen_attr[a] = table.name

    for attr in instance.attributes:
        if not (0 <= attr.table_id < n_tables):
            out.append(f"attribute '{attr.name}' references unknown table id {attr.table_id}")
        else:
            table = instance.tables[attr.table_id]
            if attr.id not in table.attribute_ids:
                out.append(
                    f"attribute '{attr.name}' claims table '{table.name}' "
                    f"but the table does not list it")
        if not isinstance(attr.width, int) or isinstance(attr.width, bool) or attr.width < 1:
            out.append(f"attribute '{attr.name}': width must be >= 1 (got {attr.width!r})")

    for q in instance.queries:
        if q.kind not in QUERY_KINDS:
            out.append(f"query '{q.name}': unknown kind {q.kind!r}")
        if not (q.frequency >= 0):
            out.append(f"query '{q.name}': frequency must be nonnegative (got {q.frequency!r})")
        if not q.accessed_attributes:
            out.append(f"query '{q.name}' accesses no attributes")
        touched_tables = set()
        for a in q.accessed_attributes:
            if not (0 <= a < n_attrs):
                out.append(f"query '{q.name}' references unknown attribute id {a}")
            else:
                touched_tables.add(instance.attributes[a].table_id)
        for table_id, rows in q.rows_per_table.items():
            if not (0 <= table_id < n_tables):
                out.append(f"query '{q.name}': row count for unknown table id {table_id}")
            elif table_id not in touched_tables:
                out.append(
                    f"query '{q.name}': row count listed for table "
                    f"'{instance.tables[table_id].name}' but no attribute of it is accessed")
            elif not (rows > 0):
                out.append(
                    f"query '{q.name}': row count for table "
                    f"'{instance.tables[table_id].name}' must be > 0 (got {rows!r})")
        for table_id in touched_tables:
            if table_id not in q.rows_per_table:
                if 0 <= table_id < n_tables:
                    out.append(
                        f"query '{q.name}' accesses table "
                        f"'{instance.tables[table_id].name}' but lists no row count for it")

    owner = [None] * n_queries
    for txn in instance.transactions:
        if not txn.query_ids:
            out.append(f"transaction '{txn.name}' has no queries")
        for qid in txn.query_ids:
            if not (0 <= qid < n_queries):
                out.append(f"transaction '{txn.name}' references unknown query id {qid}")
            elif owner[qid] is not None:
                out.append(
                    f"query id {qid} belongs to both transaction "
                    f"'{owner[qid]}' and '{txn.name}'")
            else:
                owner[qid] = txn.name
    for qid, own in enumerate(owner):
        if own is None:
            out.append(f"query '{instance.queries[qid].name}' belongs to no transaction")

    if instance.site_count < 1:
        out.append(f"site count must be >= 1 (got {instance.site_count})")
    if not (instance.network_penalty >= 0):
        out.append(f"network penalty must be nonnegative (got {instance.network_penalty!r})")
    if not (0.0 <= instance.cost_weight <= 1.0):
        out.append(f"cost weight must lie in [0, 1] (got {instance.cost_weight!r})")
    if instance.latency_penalty is not None and not (instance.latency_penalty >= 0):
        out.append(f"latency penalty must be nonnegative (got {instance.latency_penalty!r})")

    return out


def lint(instance: Instance) -> list[str]:
    """Advisory warnings that do not make an instance invalid.

    Currently flags write queries whose transaction never reads the written
    table — usually a sign that an update was encoded without its read half.
    """
    warnings: list[str] = []
    for txn in instance.transactions:
        read_tables = set()
        for qid in txn.query_ids:
            q = instance.queries[qid]
            if not q.is_write:
                for a in q.accessed_attributes:
                    read_tables.add(instance.attributes[a].table_id)
        for qid in txn.query_ids:
            q = instance.queries[qid]
            if q.is_write:
                for table_id in q.rows_per_table:
                    if table_id not in read_tables:
                        warnings.append(
                            f"transaction '{txn.name}': write query '{q.name}' touches table "
                            f"'{instance.tables[table_id].name}' that the transaction never reads")
                        break
    return warnings


def derive(instance: Instance) -> CostModel:
    """Build the dense flag matrices and folded cost coefficients.

    Raises :class:`ValidationError` carrying the violation list when the
    instance is not well formed.
    """
    violations = validate(instance)
    if violations:
        raise ValidationError(violations)

    n_a = instance.attribute_count
    n_q = instance.query_count
    n_t = instance.transaction_count

    attr_table = np.array([a.table_id for a in instance.attributes], dtype=np.int64)
    widths = np.array([a.width for a in instance.attributes], dtype=np.float64)
    freqs = np.array([q.frequency for q in instance.queries], dtype=np.float64)

    attr_access = np.zeros((n_a, n_q), dtype=bool)
    table_access = np.zeros((n_a, n_q), dtype=bool)
    rows = np.zeros((n_a, n_q), dtype=np.float64)
    is_write = np.zeros(n_q, dtype=bool)

    for q in instance.queries:
        is_write[q.id] = q.is_write
        for a in q.accessed_attributes:
            attr_access[a, q.id] = True
        for table_id, count in q.rows_per_table.items():
            members = np.asarray(instance.tables[table_id].attribute_ids, dtype=np.int64)
            table_access[members, q.id] = True
            rows[members, q.id] = count

    query_txn = np.zeros((n_q, n_t), dtype=bool)
    txn_of_query = np.zeros(n_q, dtype=np.int64)
    for txn in instance.transactions:
        for qid in txn.query_ids:
            query_txn[qid, txn.id] = True
            txn_of_query[qid] = txn.id

    # txn_reads[a, t]: some read query of t touches a directly.
    read_access = attr_access & ~is_write[None, :]
    txn_reads = (read_access.astype(np.int64) @ query_txn.astype(np.int64)) > 0

    access_weight = widths[:, None] * freqs[None, :] * rows

    penalty = float(instance.network_penalty)
    q_txn_f = query_txn.astype(np.float64)
    write_f = is_write.astype(np.float64)
    read_f = 1.0 - write_f
    attr_f = attr_access.astype(np.float64)
    table_f = table_access.astype(np.float64)

    # Per-(attribute, query) objective weights, then folded over queries.
    coloc_q = access_weight * (table_f * read_f[None, :]
                               - penalty * attr_f * write_f[None, :])
    coloc_cost = coloc_q @ q_txn_f
    replica_cost = (access_weight * write_f[None, :]
                    * (table_f + penalty * attr_f)).sum(axis=1)

    coloc_load = (access_weight * table_f * read_f[None, :]) @ q_txn_f
    replica_load = (access_weight * table_f * write_f[None, :]).sum(axis=1)

    return CostModel(
        attr_access=_freeze(attr_access),
        table_access=_freeze(table_access),
        query_txn=_freeze(query_txn),
        is_write=_freeze(is_write),
        txn_reads=_freeze(txn_reads),
        access_weight=_freeze(access_weight),
        coloc_cost=_freeze(coloc_cost),
        replica_cost=_freeze(replica_cost),
        coloc_load=_freeze(coloc_load),
        replica_load=_freeze(replica_load),
        attr_table=_freeze(attr_table),
        frequencies=_freeze(freqs),
        txn_of_query=_freeze(txn_of_query),
    )


def subset_transactions(instance: Instance, transaction_ids) -> Instance:
    """Restrict an instance to the given transactions (schema unchanged).

    Queries of dropped transactions are removed and the kept queries are
    renumbered densely in their original order.  Used by the staged solve
    that fixes replicas found for the heaviest transactions first.
    """
    keep = sorted(set(int(t) for t in transaction_ids))
    n_t = instance.transaction_count
    for t in keep:
        if not (0 <= t < n_t):
            raise ValueError(f"unknown transaction id {t}")
    if not keep:
        raise ValueError("at least one transaction must be kept")

    query_map: dict[int, int] = {}
    new_queries: list[Query] = []
    new_txns: list[Transaction] = []
    for new_tid, tid in enumerate(keep):
        txn = instance.transactions[tid]
        new_qids = []
        for qid in txn.query_ids:
            q = instance.queries[qid]
            new_qid = len(new_queries)
            query_map[qid] = new_qid
            new_queries.append(Query(
                id=new_qid, name=q.name, kind=q.kind, frequency=q.frequency,
                accessed_attributes=q.accessed_attributes,
                rows_per_table=dict(q.rows_per_table)))
            new_qids.append(new_qid)
        new_txns.append(Transaction(id=new_tid, name=txn.name, query_ids=tuple(new_qids)))

    return Instance(
        tables=instance.tables,
        attributes=instance.attributes,
        queries=tuple(new_queries),
        transactions=tuple(new_txns),
        site_count=instance.site_count,
        network_penalty=instance.network_penalty,
        cost_weight=instance.cost_weight,
        latency_penalty=instance.latency_penalty,
    )
