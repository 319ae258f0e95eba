"""Turing machines on an accelerating clock, and staged orbit watching.

A machine description is plain text: one rule per line in the form

    state,symbol -> state,symbol,move

with moves L, R, S, the blank written as ``_``, comments from ``#`` to
end of line, and optional ``@init state`` / ``@halt state...`` directives
(the first rule's source state is initial by default). Symbols are
single characters. A missing transition halts the machine by stalling,
which is distinct from reaching a declared halt state.

Step k of a run is charged 2**-k hours, so k steps finish at the exact
rational time 1 - 2**-k and the full infinite run would land at 1. The
simulator is finite: it runs to a budget and reports exact elapsed time,
plus a limit classification for any tape cell - stabilized, alternating,
or inconclusive - judged over a trailing snapshot window. A cell like a
lamp toggled every step alternates forever and has no limit value.

The same schedule drives a staged orbit watcher: stage i reads one more
approximation digit of a parameter, runs i quadratic-map steps on the
resulting box with the overflow rescale x * min(|x|, 3) / |x|, and flags
the stage when the orbit modulus provably reached 2.1. The flag pattern
over all stages is classified, not summed: escape keeps recurring, or
the orbit stayed bounded so far, or the evidence is mixed.
"""

from __future__ import annotations

import hashlib
import json
from dataclasses import dataclass
from fractions import Fraction
from importlib import resources
from typing import Iterator

from .exact import (
    ComplexBox,
    DyadicInterval,
    RealOracle,
    _abs_sq_tri,
    _box_step_tri,
    _tri_from_fractions,
    _tri_intersect,
    _tri_mul,
    _tri_round,
    _tri_to_fractions,
    _TRI_ZERO,
    oracle_query,
    sqrt_bounds,
)

BLANK = "_"
MOVES = {"L": -1, "R": 1, "S": 0}

HALT = "halt"
STALL = "stall"
BUDGET = "budget"

STABILIZED = "stabilized"
ALTERNATING = "alternating"
INCONCLUSIVE = "inconclusive"


class TMParseError(ValueError):
    """Malformed machine text; the message carries the line number."""


@dataclass(frozen=True)
class TMDescription:
    states: frozenset[str]
    alphabet: frozenset[str]
    transitions: dict[tuple[str, str], tuple[str, str, str]]
    initial: str
    halts: frozenset[str]


@dataclass(frozen=True)
class Configuration:
    state: str
    head: int
    tape: dict[int, str]  # blank cells are absent

    def read(self, cell: int) -> str:
        return self.tape.get(cell, BLANK)


def parse_tm(text: str, strict: bool = False) -> TMDescription:
    """Parse machine text.

    Duplicate rules for one (state, symbol), malformed moves, and bad
    tokens raise TMParseError with the offending line number. With
    strict=True every rule's target state must itself have rules or be
    a declared halt state.
    """
    transitions: dict[tuple[str, str], tuple[str, str, str]] = {}
    rule_lines: dict[tuple[str, str], int] = {}
    initial: str | None = None
    first_source: str | None = None
    halts: set[str] = set()
    states: set[str] = set()
    alphabet: set[str] = {BLANK}
    for ln, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if line.startswith("@"):
            parts = line.split()
            if parts[0] == "@init":
                if len(parts) != 2:
                    raise TMParseError(f"line {ln}: @init takes exactly one state")
                if initial is not None:
                    raise TMParseError(f"line {ln}: duplicate @init")
                initial = parts[1]
            elif parts[0] == "@halt":
                if len(parts) < 2:
                    raise TMParseError(f"line {ln}: @halt needs at least one state")
                halts.update(parts[1:])
            else:
                raise TMParseError(f"line {ln}: unknown directive {parts[0]!r}")
            continue
        lhs, sep, rhs = line.partition("->")
        if not sep:
            raise TMParseError(
                f"line {ln}: expected 'state,symbol -> state,symbol,move'"
            )
        lhs_parts = [tok.strip() for tok in lhs.split(",")]
        rhs_parts = [tok.strip() for tok in rhs.split(",")]
        if len(lhs_parts) != 2 or len(rhs_parts) != 3:
            raise TMParseError(f"line {ln}: malformed rule {line!r}")
        state, symbol = lhs_parts
        nstate, nsymbol, move = rhs_parts
        for tok in (state, nstate):
            if not tok or any(ch.isspace() for ch in tok):
                raise TMParseError(f"line {ln}: bad state name {tok!r}")
        for sym in (symbol, nsymbol):
            if len(sym) != 1:
                raise TMParseError(f"line {ln}: symbols are single characters, got {sym!r}")
        if move not in MOVES:
            raise TMParseError(f"line {ln}: move must be L, R, or S, not {move!r}")
        key = (state, symbol)
        if key in transitions:
            raise TMParseError(
                f"line {ln}: duplicate rule for ({state},{symbol}),"
                f" first defined on line {rule_lines[key]}"
            )
        transitions[key] = (nstate, nsymbol, move)
        rule_lines[key] = ln
        if first_source is None:
            first_source = state
        states.update((state, nstate))
        alphabet.update((symbol, nsymbol))
    if initial is None:
        if first_source is None:
            raise TMParseError("machine has no rules and no @init")
        initial = first_source
    states.add(initial)
    states.update(halts)
    if strict:
        sources = {st for st, _ in transitions}
        for key, (nstate, _, _) in transitions.items():
            if nstate not in sources and nstate not in halts:
                raise TMParseError(
                    f"line {rule_lines[key]}: target state {nstate!r} has no"
                    f" rules and is not declared @halt"
                )
    return TMDescription(
        states=frozenset(states),
        alphabet=frozenset(alphabet),
        transitions=dict(transitions),
        initial=initial,
        halts=frozenset(halts),
    )


def step(m: TMDescription, cfg: Configuration) -> Configuration | None:
    """One transition. Halting configurations are fixed points; a missing
    transition returns None (halt by stall)."""
    if cfg.state in m.halts:
        return cfg
    tr = m.transitions.get((cfg.state, cfg.read(cfg.head)))
    if tr is None:
        return None
    nstate, nsymbol, move = tr
    tape = dict(cfg.tape)
    if nsymbol == BLANK:
        tape.pop(cfg.head, None)
    else:
        tape[cfg.head] = nsymbol
    return Configuration(nstate, cfg.head + MOVES[move], tape)


def zeno_elapsed(k: int) -> Fraction:
    """Exact time after k steps on the halving schedule: 1 - 2**-k."""
    if k < 0:
        raise ValueError("step count must be >= 0")
    return Fraction((1 << k) - 1, 1 << k)


@dataclass(frozen=True)
class Snapshot:
    step: int
    state: str
    head: int
    tape: dict[int, str]
    digest: str

    def read(self, cell: int) -> str:
        return self.tape.get(cell, BLANK)


@dataclass(frozen=True)
class ZenoTrace:
    snapshots: tuple[Snapshot, ...]
    steps: int
    halted_at: int | None  # steps executed when the machine stopped itself
    stop_reason: str  # HALT | STALL | BUDGET
    elapsed: Fraction


def _digest(state: str, head: int, tape: dict[int, str]) -> str:
    body = f"{state}|{head}|" + ",".join(
        f"{pos}:{sym}" for pos, sym in sorted(tape.items())
    )
    return hashlib.sha256(body.encode()).hexdigest()


def run_stages(
    m: TMDescription,
    input_str: str = "",
    budget: int = 100,
    snapshot_every: int = 1,
) -> ZenoTrace:
    """Run at most budget steps, snapshotting on a cadence.

    The input string occupies cells 0.. with the head on cell 0. The
    initial configuration and the final one are always snapshotted.
    elapsed is exactly zeno_elapsed(steps executed); halted_at is set
    for halt and stall stops, None when only the budget ran out.
    """
    if budget < 0:
        raise ValueError("budget must be >= 0")
    if snapshot_every < 1:
        raise ValueError("snapshot cadence must be >= 1")
    tape = {i: ch for i, ch in enumerate(input_str) if ch != BLANK}
    state, head = m.initial, 0
    snaps = [Snapshot(0, state, head, dict(tape), _digest(state, head, tape))]
    steps = 0
    reason: str | None = None
    while steps < budget:
        if state in m.halts:
            reason = HALT
            break
        tr = m.transitions.get((state, tape.get(head, BLANK)))
        if tr is None:
            reason = STALL
            break
        nstate, nsymbol, move = tr
        if nsymbol == BLANK:
            tape.pop(head, None)
        else:
            tape[head] = nsymbol
        state = nstate
        head += MOVES[move]
        steps += 1
        if steps % snapshot_every == 0:
            snaps.append(Snapshot(steps, state, head, dict(tape), _digest(state, head, tape)))
    if reason is None:
        reason = HALT if state in m.halts else BUDGET
    if snaps[-1].step != steps:
        snaps.append(Snapshot(steps, state, head, dict(tape), _digest(state, head, tape)))
    return ZenoTrace(
        snapshots=tuple(snaps),
        steps=steps,
        halted_at=steps if reason in (HALT, STALL) else None,
        stop_reason=reason,
        elapsed=zeno_elapsed(steps),
    )


@dataclass(frozen=True)
class CellLimit:
    kind: str  # STABILIZED | ALTERNATING | INCONCLUSIVE
    value: str | None = None  # final symbol, for STABILIZED
    since: int | None = None  # first snapshot step holding that value


def classify_cell_limit(trace: ZenoTrace, cell: int, window: int = 8) -> CellLimit:
    """Judge whether a tape cell has a limit value at time 1.

    A trace that halted or stalled literally sits in its final
    configuration forever, so the cell is stabilized no matter the
    window. A budget-exhausted trace is judged on its last `window`
    snapshots: no changes is stabilized, at least ceil(window/2) changes
    is alternating (no limit), anything between is inconclusive. Needs
    at least `window` snapshots in that case.
    """
    vals = [s.read(cell) for s in trace.snapshots]
    if trace.stop_reason in (HALT, STALL):
        return _stabilized(trace, vals)
    if window < 1:
        raise ValueError("window must be >= 1")
    if len(vals) < window:
        raise ValueError("trace has fewer snapshots than the window")
    tail = vals[-window:]
    changes = sum(1 for a, b in zip(tail, tail[1:]) if a != b)
    if changes == 0:
        return _stabilized(trace, vals)
    if changes >= (window + 1) // 2:
        return CellLimit(ALTERNATING)
    return CellLimit(INCONCLUSIVE)


def _stabilized(trace: ZenoTrace, vals: list[str]) -> CellLimit:
    final = vals[-1]
    since = trace.snapshots[0].step
    for i in range(len(vals) - 1, 0, -1):
        if vals[i - 1] != final:
            since = trace.snapshots[i].step
            break
    return CellLimit(STABILIZED, final, since)


def trace_to_jsonl(trace: ZenoTrace) -> Iterator[str]:
    """One canonical JSON line per snapshot, then a summary line."""
    for s in trace.snapshots:
        yield json.dumps(
            {
                "step": s.step,
                "elapsed": str(zeno_elapsed(s.step)),
                "state": s.state,
                "head": s.head,
                "tape": {str(pos): sym for pos, sym in sorted(s.tape.items())},
                "digest": s.digest,
            },
            sort_keys=True,
            separators=(",", ":"),
        )
    yield json.dumps(
        {
            "summary": {
                "steps": trace.steps,
                "halted_at": trace.halted_at,
                "stop_reason": trace.stop_reason,
                "elapsed": str(trace.elapsed),
            }
        },
        sort_keys=True,
        separators=(",", ":"),
    )


def bundled_machine(name: str) -> str:
    """Text of a machine shipped with the package (no .tm suffix)."""
    return (resources.files("mandelcert") / "machines" / f"{name}.tm").read_text()


def list_bundled() -> list[str]:
    folder = resources.files("mandelcert") / "machines"
    return sorted(
        entry.name[: -len(".tm")]
        for entry in folder.iterdir()
        if entry.name.endswith(".tm")
    )


# --- staged orbit watching on the same schedule -------------------------

ESCAPE_COFINAL = "escape-cofinal"
BOUNDED_SO_FAR = "bounded-so-far"
MIXED = "mixed"

_FLAG_SQ = Fraction(441, 100)  # 2.1**2: modulus threshold on the square
_RESCALE_SQ = 9  # rescale kicks in above modulus 3


@dataclass(frozen=True)
class StageRecord:
    stage: int
    z: ComplexBox  # enclosure after the stage's last (rescaled) step
    abs_sq: DyadicInterval  # pre-rescale |z|**2 enclosure at that step
    flagged: bool


@dataclass(frozen=True)
class ZenoMandelbrotRun:
    records: tuple[StageRecord, ...]
    classification: str  # ESCAPE_COFINAL | BOUNDED_SO_FAR | MIXED
    first_flagged: int | None
    window: int


def _rescaled_step(zre, zim, cre, cim, p: int):
    """One quadratic step, then the x*min(|x|,3)/|x| pull-back on boxes.

    Returns the new component enclosures plus the pre-rescale |z|**2
    enclosure; the escape flag must be read off the latter, because the
    rescale by construction drags the modulus back to at most 3. The
    scale factor t = min(1, 3/|z|) is enclosed via rational square-root
    bounds on 9/|z|**2 and applied as an interval factor on each
    component, then intersected with [-3, 3] (every truly rescaled point
    lands there, so the intersection is sound and nonempty).
    """
    zre, zim = _box_step_tri(zre, zim, cre, cim, p)
    msq = _abs_sq_tri(zre, zim, p)
    lo_f, hi_f = _tri_to_fractions(msq)
    if hi_f <= _RESCALE_SQ:
        return zre, zim, msq
    t2_lo = Fraction(_RESCALE_SQ) / hi_f
    t2_hi = Fraction(1) if lo_f <= _RESCALE_SQ else Fraction(_RESCALE_SQ) / lo_f
    t_lo = sqrt_bounds(t2_lo, p)[0]
    t_hi = sqrt_bounds(t2_hi, p)[1]
    t = _tri_from_fractions(t_lo, t_hi, p)
    clamp = (-3, 3, 0)
    zre = _tri_intersect(_tri_round(_tri_mul(t, zre), p), clamp)
    zim = _tri_intersect(_tri_round(_tri_mul(t, zim), p), clamp)
    return zre, zim, msq


def _classify_flags(flags: list[bool], window: int) -> tuple[str, int | None]:
    if not any(flags):
        return BOUNDED_SO_FAR, None
    first = flags.index(True)
    run = 0
    for f in flags[first:]:
        run = 0 if f else run + 1
        if run >= window:
            return MIXED, first + 1
    return ESCAPE_COFINAL, first + 1


def zeno_mandelbrot_run(
    ox: RealOracle,
    oy: RealOracle,
    stages: int,
    p: int = 64,
    window: int = 5,
) -> ZenoMandelbrotRun:
    """Watch the orbit of an oracle-presented parameter, stage by stage.

    Stage i re-queries both oracles at accuracy i (box radius 2**-i per
    axis) and recomputes i rescaled quadratic steps from scratch on that
    box. The stage is flagged when the final pre-rescale |z|**2 lower
    bound reaches 2.1**2, i.e. the whole box provably pushed the orbit
    to modulus 2.1 by step i. Classification of the flag pattern:
    bounded-so-far when nothing was flagged; escape-cofinal when, after
    the first flag, no window-long run of unflagged stages occurs
    (including at the end); mixed otherwise. Never a membership claim;
    a finite prefix of stages cannot decide the limit.
    """
    if stages < 1:
        raise ValueError("stages must be >= 1")
    if window < 1:
        raise ValueError("window must be >= 1")
    records: list[StageRecord] = []
    flags: list[bool] = []
    for i in range(1, stages + 1):
        qx = oracle_query(ox, i)
        qy = oracle_query(oy, i)
        rad = Fraction(1, 1 << i)
        p_box = max(p, i) + 16
        cre = _tri_from_fractions(qx - rad, qx + rad, p_box)
        cim = _tri_from_fractions(qy - rad, qy + rad, p_box)
        zre, zim = _TRI_ZERO, _TRI_ZERO
        msq = _TRI_ZERO
        for _ in range(i):
            zre, zim, msq = _rescaled_step(zre, zim, cre, cim, p)
        abs_sq = DyadicInterval._from_tri(msq)
        flagged = abs_sq.lo.as_fraction() >= _FLAG_SQ
        flags.append(flagged)
        records.append(
            StageRecord(
                stage=i,
                z=ComplexBox(
                    DyadicInterval._from_tri(zre), DyadicInterval._from_tri(zim)
                ),
                abs_sq=abs_sq,
                flagged=flagged,
            )
        )
    classification, first = _classify_flags(flags, window)
    return ZenoMandelbrotRun(tuple(records), classification, first, window)
