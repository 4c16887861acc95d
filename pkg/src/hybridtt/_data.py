"""Flattened integer view of an :class:`Instance` consumed by the kernels."""

from __future__ import annotations

from dataclasses import dataclass
from typing import List, Sequence, Tuple

from .model.types import Instance

# Violation families, in ledger order.
FAM_CURRICULUM = 0
FAM_PROFESSOR = 1
FAM_ROOM = 2
FAM_DIFFERENT_DAY = 3
FAM_PRECEDENCE = 4
FAMILIES = ("curriculum", "professor", "room", "different_day", "precedence")

# Entity kinds for kernel queries.
KIND_CURRICULUM = 0
KIND_PROFESSOR = 1
KIND_ROOM = 2
KIND_ALL = 3


def _csr(groups: Sequence[Sequence[int]]) -> Tuple[List[int], List[int]]:
    ptr = [0]
    idx: List[int] = []
    for g in groups:
        idx.extend(g)
        ptr.append(len(idx))
    return ptr, idx


@dataclass
class KernelData:
    n_lectures: int
    n_curricula: int
    n_professors: int
    n_rooms: int
    n_days: int
    n_slots_per_day: int
    n_periods: int
    n_campi: int
    duration: List[int]
    room: List[int]
    campus: List[int]
    mask: List[int]
    lc_ptr: List[int]
    lc_idx: List[int]
    lp_ptr: List[int]
    lp_idx: List[int]
    cl_ptr: List[int]
    cl_idx: List[int]
    pl_ptr: List[int]
    pl_idx: List[int]
    rl_ptr: List[int]
    rl_idx: List[int]
    dd_ptr: List[int]
    dd_idx: List[int]
    pred_ptr: List[int]
    pred_idx: List[int]
    succ_ptr: List[int]
    succ_idx: List[int]
    cur_period: List[int]
    cur_max_daily: List[int]
    cur_max_consec: List[int]
    prof_max_daily: List[int]
    prof_max_consec: List[int]
    room_cap: List[int]
    room_type: List[int]
    travel: List[int]
    # labels, not used by the kernels
    room_keys: List[Tuple[str, str]]
    campus_names: List[str]
    type_names: List[str]

    @property
    def n_slots(self) -> int:
        return self.n_days * self.n_slots_per_day


def compile_instance(inst: Instance) -> KernelData:
    lidx = inst.lecture_index
    cal = inst.calendar
    campus_names = list(inst.layout.campi)
    for lec in inst.lectures:
        if lec.campus not in campus_names:
            campus_names.append(lec.campus)
    cidx = {c: n for n, c in enumerate(campus_names)}
    room_keys = list(inst.layout.room_counts)
    ridx = {k: n for n, k in enumerate(room_keys)}
    type_names = sorted({t for _, t in room_keys})
    tidx = {t: n for n, t in enumerate(type_names)}

    P = cal.periods
    masks = []
    for lec in inst.lectures:
        m = 0
        for p in lec.active_periods(P):
            m |= 1 << (p - 1)
        masks.append(m)

    lc = [[] for _ in inst.lectures]
    for n, cur in enumerate(inst.curricula):
        for lid in cur.lectures:
            lc[lidx[lid]].append(n)
    lp = [[] for _ in inst.lectures]
    for n, prof in enumerate(inst.professors):
        for lid in prof.lectures:
            lp[lidx[lid]].append(n)
    rl = [[] for _ in room_keys]
    for n, lec in enumerate(inst.lectures):
        rl[ridx[(lec.campus, lec.room_type)]].append(n)
    dd = [sorted(lidx[x] for x in lec.different_day) for lec in inst.lectures]
    pred = [sorted(lidx[x] for x in lec.predecessors) for lec in inst.lectures]
    succ = [[] for _ in inst.lectures]
    for n, ps in enumerate(pred):
        for q in ps:
            succ[q].append(n)

    nc = len(campus_names)
    travel = [0] * (nc * nc)
    for a in campus_names:
        for b in campus_names:
            travel[cidx[a] * nc + cidx[b]] = inst.layout.travel(a, b)

    lc_ptr, lc_idx = _csr(lc)
    lp_ptr, lp_idx = _csr(lp)
    cl_ptr, cl_idx = _csr([[lidx[x] for x in c.lectures] for c in inst.curricula])
    pl_ptr, pl_idx = _csr([[lidx[x] for x in p.lectures] for p in inst.professors])
    rl_ptr, rl_idx = _csr(rl)
    dd_ptr, dd_idx = _csr(dd)
    pred_ptr, pred_idx = _csr(pred)
    succ_ptr, succ_idx = _csr(succ)

    return KernelData(
        n_lectures=len(inst.lectures),
        n_curricula=len(inst.curricula),
        n_professors=len(inst.professors),
        n_rooms=len(room_keys),
        n_days=cal.days,
        n_slots_per_day=cal.slots_per_day,
        n_periods=P,
        n_campi=nc,
        duration=[lec.duration for lec in inst.lectures],
        room=[ridx[(lec.campus, lec.room_type)] for lec in inst.lectures],
        campus=[cidx[lec.campus] for lec in inst.lectures],
        mask=masks,
        lc_ptr=lc_ptr, lc_idx=lc_idx,
        lp_ptr=lp_ptr, lp_idx=lp_idx,
        cl_ptr=cl_ptr, cl_idx=cl_idx,
        pl_ptr=pl_ptr, pl_idx=pl_idx,
        rl_ptr=rl_ptr, rl_idx=rl_idx,
        dd_ptr=dd_ptr, dd_idx=dd_idx,
        pred_ptr=pred_ptr, pred_idx=pred_idx,
        succ_ptr=succ_ptr, succ_idx=succ_idx,
        cur_period=[c.period - 1 for c in inst.curricula],
        cur_max_daily=[c.max_daily for c in inst.curricula],
        cur_max_consec=[c.max_consecutive for c in inst.curricula],
        prof_max_daily=[p.max_daily for p in inst.professors],
        prof_max_consec=[p.max_consecutive for p in inst.professors],
        room_cap=[inst.layout.room_counts[k] for k in room_keys],
        room_type=[tidx[t] for _, t in room_keys],
        travel=travel,
        room_keys=room_keys,
        campus_names=campus_names,
        type_names=type_names,
    )
