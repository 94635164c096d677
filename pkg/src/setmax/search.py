"""Exhaustive search for the maximum number of sets on an n-card board.

Two engines answer the same question.  The naive engine enumerates every
n-card board and refuses instances beyond a triple-check budget; it is the
reference.  The pruned engine walks the same lexicographic subset tree
depth-first, keeps the running set count incrementally, and discards a
branch when even an optimistic completion cannot beat the best board seen.
With symmetry on it also fixes the first two cards to 0 and 1: the affine
group moves any ordered pair of distinct cards onto any other while
preserving set counts, so some maximizer contains that pair.

Pruning is strict (a branch is cut only when it cannot *reach* the current
best), which means every board achieving the final maximum is visited no
matter how the shared best value evolves.  That makes results, witness
included, independent of worker scheduling.

The frontier of the depth-first walk is a stack of cards plus the next
candidate at the current level; checkpoints serialize exactly that, so a
resumed run continues the identical traversal.  Parallel runs split the
tree at its top level into work units and checkpoint at unit boundaries.
"""

from __future__ import annotations

import csv
import json
import os
import time
from concurrent.futures import FIRST_COMPLETED, ProcessPoolExecutor, wait
from dataclasses import dataclass
from math import comb

from . import geometry
from .counting import Board

DEFAULT_NAIVE_BUDGET = 10 ** 10  # triple-checks; roughly a day of CPU

CHECKPOINT_FORMAT = "setmax-checkpoint"
CHECKPOINT_VERSION = 1

CSV_HEADER = ("n", "max_sets", "search_space", "nodes_visited", "elapsed_seconds", "complete")

# The hot loop only looks at the clock / stop limit every time the node
# counter crosses a multiple of this power of two.
_PROGRESS_EVERY = 4096


class BudgetExceededError(RuntimeError):
    """A naive search was refused because its estimated cost is too large."""

    def __init__(self, message: str, estimate: int):
        super().__init__(message)
        self.estimate = estimate


class CheckpointError(RuntimeError):
    """A checkpoint file is corrupt or from an incompatible version."""


@dataclass
class SearchConfig:
    dim: int
    n: int
    mode: str = "pruned"  # "naive" or "pruned"
    symmetry: bool = True
    threads: int = 1
    checkpoint_path: str | None = None
    report_interval: float = 60.0
    naive_budget: int = DEFAULT_NAIVE_BUDGET
    stop_after_nodes: int | None = None

    def __post_init__(self):
        geometry.check_dimension(self.dim)
        deck = 3 ** self.dim
        if not 3 <= self.n <= deck:
            raise ValueError(f"board size must be in [3, {deck}], got {self.n}")
        if self.mode not in ("naive", "pruned"):
            raise ValueError(f"mode must be 'naive' or 'pruned', got {self.mode!r}")
        if self.threads < 1:
            raise ValueError(f"threads must be positive, got {self.threads}")
        if self.report_interval <= 0:
            raise ValueError("report_interval must be positive")
        if self.mode == "naive" and self.checkpoint_path is not None:
            raise ValueError("checkpointing is only supported in pruned mode")


@dataclass
class SearchResult:
    max_sets: int
    witness: Board | None
    nodes_visited: int
    configs_pruned: int
    elapsed: float
    complete: bool


@dataclass
class Checkpoint:
    dim: int
    n: int
    mode: str
    symmetry: bool
    kind: str  # "stack", "units" or "finished"
    state: dict


def bound_remaining(current_size: int, target_n: int) -> int:
    """Most sets the remaining cards could still add, growing a board from
    current_size to target_n.

    A card joining an m-card board completes at most floor(m/2) new sets:
    every new set pairs it with two existing cards, and two sets through
    the same new card cannot share an existing card.  Summing that per
    growth step never undercounts, so pruning with it stays exact.
    """
    if current_size > target_n:
        raise ValueError(f"current size {current_size} exceeds target {target_n}")
    return sum(m // 2 for m in range(current_size, target_n))


def search_space(dim: int, n: int) -> int:
    """Cost model of the naive search: C(3**d, n) boards, C(n, 3) triples each."""
    return comb(3 ** geometry.check_dimension(dim), n) * comb(n, 3)


def _fresh_state(lo: int) -> dict:
    return {"stack": [], "next_card": lo, "best": -1, "witness": None, "nodes": 0, "pruned": 0}


def _base_and_lo(n: int, mode: str, symmetry: bool) -> tuple[list[int], int]:
    if mode == "pruned" and symmetry and n >= 2:
        return [0, 1], 2
    return [], 0


def _count_cards(dim: int, cards) -> int:
    cards = sorted(cards)
    if len(cards) < 3:
        return 0
    present = set(cards)
    tally = 0
    for i, a in enumerate(cards):
        for b in cards[i + 1 :]:
            if geometry.third_value(a, b, dim) in present:
                tally += 1
    return tally // 3


def _dfs_segment(
    dim: int,
    n: int,
    base: list[int],
    state: dict,
    *,
    prune: bool,
    seed_best: int = -1,
    stop_after_nodes: int | None = None,
    report_interval: float | None = None,
    on_checkpoint=None,
) -> bool:
    """Advance the depth-first walk described by `state` until the subtree is
    exhausted (returns True) or a stop trigger fires (returns False).

    The walk extends `base` with cards in strictly increasing order until
    boards of n cards are reached.  `seed_best` only tightens pruning;
    best/witness in the state reflect boards actually visited here, which
    is what keeps merged parallel results deterministic.
    """
    deck = 3 ** dim
    need = n - len(base)
    if need < 0:
        raise ValueError("base is larger than the target board")

    best = state["best"]
    witness = state["witness"]
    nodes = state["nodes"]
    pruned = state["pruned"]

    if need == 0:
        # Degenerate unit: the base itself is the only board in the subtree.
        if nodes == 0:
            nodes = 1
            best = _count_cards(dim, base)
            witness = list(base)
        state.update(best=best, witness=witness, nodes=nodes, pruned=pruned)
        return True

    # Above TABLE_MAX_DIM the full pair table would not fit in memory;
    # fall back to computing thirds digit-wise inside the scan.
    rows = geometry.third_rows(dim) if dim <= geometry.TABLE_MAX_DIM else None
    third = geometry.third_value

    member = bytearray(deck)
    chosen = list(base)
    for x in base:
        member[x] = 1

    # Rebuild the incremental counts along the saved frontier.
    base_cnt = _count_cards(dim, base)
    cnt = base_cnt
    cnt_stack = []
    stack = list(state["stack"])
    for s in stack:
        t = 0
        if rows is not None:
            row = rows[s]
            for b in chosen:
                t += member[row[b]]
        else:
            for b in chosen:
                t += member[third(s, b, dim)]
        cnt += t >> 1
        member[s] = 1
        chosen.append(s)
        cnt_stack.append(cnt)

    c = state["next_card"]
    best_eff = best if best > seed_best else seed_best

    # bound[s] = most sets any completion of an s-card board can still add.
    bound = [bound_remaining(s, n) for s in range(n + 1)]

    base_len = len(base)
    next_check = (nodes | (_PROGRESS_EVERY - 1)) + 1
    next_report = time.monotonic() + report_interval if report_interval else None

    def _sync():
        state.update(
            stack=list(stack), next_card=c, best=best, witness=witness, nodes=nodes, pruned=pruned
        )

    try:
        while True:
            if nodes >= next_check:
                # The frontier (stack, c) is saved before candidate c is
                # processed, so a resumed run recounts nothing.
                next_check = nodes + _PROGRESS_EVERY
                if stop_after_nodes is not None and nodes >= stop_after_nodes:
                    _sync()
                    if on_checkpoint is not None:
                        on_checkpoint(state)
                    return False
                if next_report is not None and time.monotonic() >= next_report:
                    _sync()
                    if on_checkpoint is not None:
                        on_checkpoint(state)
                    next_report = time.monotonic() + report_interval

            limit = deck - (need - len(stack) - 1)
            if c >= limit:
                if not stack:
                    break
                p = stack.pop()
                cnt_stack.pop()
                cnt = cnt_stack[-1] if cnt_stack else base_cnt
                member[p] = 0
                chosen.pop()
                c = p + 1
                continue

            t = 0
            if rows is not None:
                row = rows[c]
                for b in chosen:
                    t += member[row[b]]
            else:
                for b in chosen:
                    t += member[third(c, b, dim)]
            ncnt = cnt + (t >> 1)
            nodes += 1

            if base_len + len(stack) + 1 == n:
                if ncnt > best:
                    best = ncnt
                    witness = chosen + [c]
                    if best > best_eff:
                        best_eff = best
                c += 1
            elif prune and ncnt + bound[base_len + len(stack) + 1] < best_eff:
                pruned += 1
                c += 1
            else:
                stack.append(c)
                chosen.append(c)
                member[c] = 1
                cnt_stack.append(ncnt)
                cnt = ncnt
                c += 1
    except KeyboardInterrupt:
        _sync()
        if on_checkpoint is not None:
            on_checkpoint(state)
        return False

    _sync()
    return True


def _checkpoint_for(config: SearchConfig, kind: str, state: dict) -> Checkpoint:
    return Checkpoint(
        dim=config.dim, n=config.n, mode=config.mode, symmetry=config.symmetry, kind=kind, state=state
    )


def checkpoint_save(cp: Checkpoint, path) -> None:
    """Write a checkpoint atomically (JSON, versioned)."""
    payload = {
        "format": CHECKPOINT_FORMAT,
        "version": CHECKPOINT_VERSION,
        "config": {"dim": cp.dim, "n": cp.n, "mode": cp.mode, "symmetry": cp.symmetry},
        "kind": cp.kind,
        "state": cp.state,
    }
    tmp = f"{path}.tmp"
    with open(tmp, "w", encoding="utf-8") as f:
        json.dump(payload, f)
    os.replace(tmp, path)


def checkpoint_load(path) -> Checkpoint:
    try:
        with open(path, "r", encoding="utf-8") as f:
            payload = json.load(f)
    except (OSError, json.JSONDecodeError) as exc:
        raise CheckpointError(f"unreadable checkpoint {path}: {exc}") from exc
    if not isinstance(payload, dict) or payload.get("format") != CHECKPOINT_FORMAT:
        raise CheckpointError(f"{path} is not a search checkpoint")
    if payload.get("version") != CHECKPOINT_VERSION:
        raise CheckpointError(
            f"checkpoint version mismatch: file has {payload.get('version')!r}, "
            f"this build reads {CHECKPOINT_VERSION}"
        )
    try:
        cfg = payload["config"]
        return Checkpoint(
            dim=cfg["dim"],
            n=cfg["n"],
            mode=cfg["mode"],
            symmetry=cfg["symmetry"],
            kind=payload["kind"],
            state=payload["state"],
        )
    except KeyError as exc:
        raise CheckpointError(f"checkpoint {path} is missing field {exc}") from exc


def _result_from_state(config: SearchConfig, state: dict, elapsed: float, complete: bool) -> SearchResult:
    witness = state["witness"]
    return SearchResult(
        max_sets=state["best"],
        witness=Board(config.dim, witness) if witness is not None else None,
        nodes_visited=state["nodes"],
        configs_pruned=state["pruned"],
        elapsed=elapsed,
        complete=complete,
    )


def _run_sequential(config: SearchConfig, base: list[int], state: dict, *, prune: bool) -> SearchResult:
    t0 = time.monotonic()
    path = config.checkpoint_path

    def save(st):
        if path is not None:
            checkpoint_save(_checkpoint_for(config, "stack", dict(st)), path)

    finished = _dfs_segment(
        config.dim,
        config.n,
        base,
        state,
        prune=prune,
        stop_after_nodes=config.stop_after_nodes,
        report_interval=config.report_interval if path is not None else None,
        on_checkpoint=save,
    )
    if finished and path is not None:
        done = {k: state[k] for k in ("best", "witness", "nodes", "pruned")}
        checkpoint_save(_checkpoint_for(config, "finished", done), path)
    return _result_from_state(config, state, time.monotonic() - t0, finished)


def _unit_worker(args) -> dict:
    dim, n, base, unit_card, seed_best, prune = args
    state = _fresh_state(unit_card + 1)
    _dfs_segment(dim, n, base + [unit_card], state, prune=prune, seed_best=seed_best)
    return {
        "unit": unit_card,
        "best": state["best"],
        "witness": state["witness"],
        "nodes": state["nodes"],
        "pruned": state["pruned"],
    }


def _merge_units(config: SearchConfig, units: list[int], done: dict, elapsed: float, complete: bool) -> SearchResult:
    # Deterministic merge: best value over all units, witness from the
    # lexicographically first unit that achieved it.  Strict pruning
    # guarantees every unit that contains a maximum board reports it.
    best = -1
    witness = None
    nodes = 0
    pruned = 0
    for u in units:
        r = done.get(str(u))
        if r is None:
            continue
        nodes += r["nodes"]
        pruned += r["pruned"]
        if r["best"] > best:
            best = r["best"]
            witness = r["witness"]
    state = {"best": best, "witness": witness, "nodes": nodes, "pruned": pruned}
    return _result_from_state(config, state, elapsed, complete)


def _run_parallel(
    config: SearchConfig, base: list[int], lo: int, *, prune: bool, done: dict | None = None
) -> SearchResult:
    t0 = time.monotonic()
    deck = 3 ** config.dim
    need = config.n - len(base)
    units = list(range(lo, deck - need + 1))
    done = dict(done or {})
    pending = [u for u in units if str(u) not in done]
    path = config.checkpoint_path
    seed = max([-1] + [r["best"] for r in done.values()])
    stop = config.stop_after_nodes
    next_report = time.monotonic() + config.report_interval

    stopped = False
    with ProcessPoolExecutor(max_workers=config.threads) as pool:
        it = iter(pending)
        futures = {}

        def submit_next():
            u = next(it, None)
            if u is not None:
                fut = pool.submit(
                    _unit_worker, (config.dim, config.n, base, u, seed, prune)
                )
                futures[fut] = u

        for _ in range(config.threads):
            submit_next()
        while futures:
            ready, _ = wait(list(futures), return_when=FIRST_COMPLETED)
            for fut in ready:
                u = futures.pop(fut)
                r = fut.result()
                done[str(u)] = r
                if r["best"] > seed:
                    seed = r["best"]
                total_nodes = sum(x["nodes"] for x in done.values())
                if stop is not None and total_nodes >= stop:
                    stopped = True
                if not stopped:
                    submit_next()
            if path is not None and time.monotonic() >= next_report:
                checkpoint_save(
                    _checkpoint_for(config, "units", {"done": done}), path
                )
                next_report = time.monotonic() + config.report_interval

    complete = len(done) == len(units) and not stopped
    if path is not None:
        if complete:
            merged = _merge_units(config, units, done, 0.0, True)
            checkpoint_save(
                _checkpoint_for(
                    config,
                    "finished",
                    {
                        "best": merged.max_sets,
                        "witness": list(merged.witness.cards) if merged.witness is not None else None,
                        "nodes": merged.nodes_visited,
                        "pruned": merged.configs_pruned,
                    },
                ),
                path,
            )
        else:
            checkpoint_save(_checkpoint_for(config, "units", {"done": done}), path)
    return _merge_units(config, units, done, time.monotonic() - t0, complete)


def max_sets_naive(config: SearchConfig) -> SearchResult:
    """Exact maximum by enumerating every n-card board in lexicographic order.

    Refuses instances whose estimated triple-check count exceeds the budget;
    the witness is the lexicographically first maximizer.
    """
    if config.mode != "naive":
        raise ValueError("max_sets_naive requires mode='naive'")
    estimate = search_space(config.dim, config.n)
    if estimate > config.naive_budget:
        raise BudgetExceededError(
            f"naive search would need about {estimate:.3e} triple-checks, over the "
            f"budget of {config.naive_budget:.3e}; use the pruned engine instead",
            estimate,
        )
    base, lo = _base_and_lo(config.n, "naive", False)
    if config.threads > 1:
        return _run_parallel(config, base, lo, prune=False)
    return _run_sequential(config, base, _fresh_state(lo), prune=False)


def max_sets_pruned(config: SearchConfig) -> SearchResult:
    """Exact maximum by branch-and-bound; same answers as the naive engine.

    With symmetry on, only boards containing cards 0 and 1 are searched and
    the witness is one representative of an orbit of equivalent boards.
    """
    if config.mode != "pruned":
        raise ValueError("max_sets_pruned requires mode='pruned'")
    base, lo = _base_and_lo(config.n, "pruned", config.symmetry)
    if config.threads > 1:
        return _run_parallel(config, base, lo, prune=True)
    return _run_sequential(config, base, _fresh_state(lo), prune=True)


def run_search(config: SearchConfig) -> SearchResult:
    if config.mode == "naive":
        return max_sets_naive(config)
    return max_sets_pruned(config)


def resume_search(
    checkpoint_path,
    *,
    threads: int | None = None,
    stop_after_nodes: int | None = None,
    report_interval: float = 60.0,
) -> SearchResult:
    """Continue a checkpointed pruned search to completion (or the next stop).

    A run resumed any number of times ends with the same result as an
    uninterrupted one, elapsed time aside.
    """
    cp = checkpoint_load(checkpoint_path)
    config = SearchConfig(
        dim=cp.dim,
        n=cp.n,
        mode=cp.mode,
        symmetry=cp.symmetry,
        threads=threads if threads is not None else 1,
        checkpoint_path=str(checkpoint_path),
        report_interval=report_interval,
        stop_after_nodes=stop_after_nodes,
    )
    if cp.kind == "finished":
        return _result_from_state(config, cp.state, 0.0, True)
    base, lo = _base_and_lo(config.n, config.mode, config.symmetry)
    if cp.kind == "stack":
        state = {
            "stack": list(cp.state["stack"]),
            "next_card": cp.state["next_card"],
            "best": cp.state["best"],
            "witness": cp.state["witness"],
            "nodes": cp.state["nodes"],
            "pruned": cp.state["pruned"],
        }
        return _run_sequential(config, base, state, prune=config.mode == "pruned")
    if cp.kind == "units":
        return _run_parallel(config, base, lo, prune=config.mode == "pruned", done=cp.state["done"])
    raise CheckpointError(f"unknown checkpoint kind {cp.kind!r}")


@dataclass(frozen=True)
class TableRow:
    n: int
    max_sets: int
    search_space: int
    nodes_visited: int
    elapsed_seconds: float
    complete: bool


def run_table(
    dim: int,
    n_from: int,
    n_to: int,
    out=None,
    *,
    threads: int = 1,
    symmetry: bool = True,
) -> list[TableRow]:
    """Maximum set counts for every board size in [n_from, n_to].

    Each row is computed by the pruned engine and, when `out` is given,
    streamed to it as CSV as soon as it is known.  If a row's search is
    interrupted the row is emitted with complete=false and the table stops.
    """
    geometry.check_dimension(dim)
    deck = 3 ** dim
    if not 3 <= n_from <= n_to <= deck:
        raise ValueError(f"need 3 <= n_from <= n_to <= {deck}, got [{n_from}, {n_to}]")
    writer = None
    if out is not None:
        writer = csv.writer(out)
        writer.writerow(CSV_HEADER)
        if hasattr(out, "flush"):
            out.flush()
    rows = []
    for n in range(n_from, n_to + 1):
        config = SearchConfig(dim=dim, n=n, mode="pruned", symmetry=symmetry, threads=threads)
        result = max_sets_pruned(config)
        row = TableRow(
            n=n,
            max_sets=result.max_sets,
            search_space=search_space(dim, n),
            nodes_visited=result.nodes_visited,
            elapsed_seconds=result.elapsed,
            complete=result.complete,
        )
        rows.append(row)
        if writer is not None:
            writer.writerow(
                (
                    row.n,
                    row.max_sets,
                    row.search_space,
                    row.nodes_visited,
                    f"{row.elapsed_seconds:.3f}",
                    "true" if row.complete else "false",
                )
            )
            if hasattr(out, "flush"):
                out.flush()
        if not row.complete:
            break
    return rows
