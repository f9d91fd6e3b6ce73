"""Closed-form DOF arithmetic: cut-set bound, scheme feasibility, baselines.

All results are reported under the full-duplex convention (both directions of
every pair count), which contributes the factor 2 in every formula.
"""

from __future__ import annotations

from dataclasses import dataclass

__all__ = [
    "DofReport",
    "dof_upper_bound",
    "sajic_achievable_dof",
    "reduced_achievable_full",
    "time_share_dof",
    "dof_report",
]


def dof_upper_bound(m: int, n: int) -> int:
    """Cut-set bound on the total DOF: 2 min(2M, N)."""
    _check(m, n)
    return 2 * min(2 * m, n)


def sajic_achievable_dof(m: int, n: int) -> int:
    """Total DOF the aligned joint-cancellation scheme achieves.

    2N when ``5N <= 8M`` (the bound is met); 16M - 8N in the degraded band
    ``8M < 5N`` with ``N < 2M`` (each pair limited to its 2M - N intersection
    dimensions); 0 once ``N >= 2M`` where alignment is impossible.
    """
    _check(m, n)
    if n >= 2 * m:
        return 0
    if 5 * n <= 8 * m:
        return 2 * n
    return 16 * m - 8 * n


def reduced_achievable_full(m: int, n: int) -> bool:
    """Whether relay-side-only nulling still reaches the 2N bound: 3N <= 4M."""
    _check(m, n)
    return 3 * n <= 4 * m


def time_share_dof(m: int, n: int) -> int:
    """Pair-at-a-time relaying baseline: 2 min(M, N)."""
    _check(m, n)
    return 2 * min(m, n)


@dataclass(frozen=True)
class DofReport:
    """Tabulated DOF figures for one (M, N).

    ``reduced_dof`` is None when relay-side-only nulling cannot reach the
    bound; no partial figure exists for that scheme.
    """

    M: int
    N: int
    upper_bound: int
    sajic_dof: int
    reduced_dof: int | None
    time_share_dof: int
    sajic_full: bool
    reduced_full: bool


def dof_report(m: int, n: int) -> DofReport:
    """Fill a DofReport consistently from the closed forms above."""
    upper = dof_upper_bound(m, n)
    sajic = sajic_achievable_dof(m, n)
    reduced_full = reduced_achievable_full(m, n)
    return DofReport(
        M=m,
        N=n,
        upper_bound=upper,
        sajic_dof=sajic,
        reduced_dof=2 * n if reduced_full else None,
        time_share_dof=time_share_dof(m, n),
        sajic_full=(n <= 2 * m and sajic == upper),
        reduced_full=reduced_full,
    )


def _check(m: int, n: int) -> None:
    if m < 1 or n < 1:
        raise ValueError("antenna counts must be >= 1")
