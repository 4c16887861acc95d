# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True, initializedcheck=False
"""Compiled violation kernel; typed port of ``_kernel_py.Kernel``."""

import numpy as np
cimport numpy as cnp

cnp.import_array()

cdef enum:
    CURR = 0
    PROF = 1
    ROOM = 2
    DD = 3
    PREC = 4


cdef inline int _ind(long long v) nogil:
    return 1 if v > 0 else 0


def _i32(x):
    return np.ascontiguousarray(np.asarray(x, dtype=np.int32))


cdef class Kernel:
    cdef public object data
    cdef public int nl, nc, np_, nr, nd, nk, S, P, ncamp
    cdef bint multi_campus
    cdef int[::1] dur, room_of, campus, mask, travel
    cdef int[::1] cur_maxd, cur_maxc, prof_maxd, prof_maxc, cap
    cdef int[::1] lc_ptr, lc_idx, lp_ptr, lp_idx, cl_ptr, cl_idx, pl_ptr, pl_idx
    cdef int[::1] rl_ptr, rl_idx, dd_ptr, dd_idx, pred_ptr, pred_idx, succ_ptr, succ_idx
    cdef int[::1] _day, _start
    cdef long long[::1] _curr, _prof, _room, _occ
    cdef long long[::1] _f4, _f5, _slot_total, _curr_total, _prof_total, _room_total, _lam_curr, _lam_slot
    cdef int[::1] _f4slot, _f5slot
    cdef long long[::1] _fam
    cdef long long lam_prof, lam_room, lam_dd, lam_prec
    cdef public long long grand, aug
    cdef long long[::1] cnt, out
    cdef int[::1] items
    cdef object _arrays

    backend = "cython"

    def __init__(self, data):
        self.data = data
        self.nl = data.n_lectures
        self.nc = data.n_curricula
        self.np_ = data.n_professors
        self.nr = data.n_rooms
        self.nd = data.n_days
        self.nk = data.n_slots_per_day
        self.S = self.nd * self.nk
        self.P = data.n_periods
        self.ncamp = data.n_campi
        self.multi_campus = data.n_campi > 1 and any(data.travel)
        self.dur = _i32(data.duration)
        self.room_of = _i32(data.room)
        self.campus = _i32(data.campus)
        self.mask = _i32(data.mask)
        self.travel = _i32(data.travel)
        self.cur_maxd = _i32(data.cur_max_daily)
        self.cur_maxc = _i32(data.cur_max_consec)
        self.prof_maxd = _i32(data.prof_max_daily)
        self.prof_maxc = _i32(data.prof_max_consec)
        self.cap = _i32(data.room_cap)
        self.lc_ptr = _i32(data.lc_ptr); self.lc_idx = _i32(data.lc_idx)
        self.lp_ptr = _i32(data.lp_ptr); self.lp_idx = _i32(data.lp_idx)
        self.cl_ptr = _i32(data.cl_ptr); self.cl_idx = _i32(data.cl_idx)
        self.pl_ptr = _i32(data.pl_ptr); self.pl_idx = _i32(data.pl_idx)
        self.rl_ptr = _i32(data.rl_ptr); self.rl_idx = _i32(data.rl_idx)
        self.dd_ptr = _i32(data.dd_ptr); self.dd_idx = _i32(data.dd_idx)
        self.pred_ptr = _i32(data.pred_ptr); self.pred_idx = _i32(data.pred_idx)
        self.succ_ptr = _i32(data.succ_ptr); self.succ_idx = _i32(data.succ_idx)

        widest = 1
        for ptr in (data.cl_ptr, data.pl_ptr):
            for n in range(len(ptr) - 1):
                widest = max(widest, ptr[n + 1] - ptr[n])
        self.items = np.zeros(widest, dtype=np.int32)
        self.cnt = np.zeros(self.nk, dtype=np.int64)
        self.out = np.zeros(self.nk, dtype=np.int64)

        self._day = np.full(self.nl, -1, dtype=np.int32)
        self._start = np.full(self.nl, -1, dtype=np.int32)
        self._lam_curr = np.zeros(self.nc, dtype=np.int64)
        self._lam_slot = np.zeros(self.S, dtype=np.int64)
        self.lam_prof = self.lam_room = self.lam_dd = self.lam_prec = 0
        self._zero()

    cdef void _zero(self):
        cdef int S = self.S, P = self.P
        self._curr = np.zeros(self.nc * S, dtype=np.int64)
        self._prof = np.zeros(self.np_ * P * S, dtype=np.int64)
        self._room = np.zeros(self.nr * P * S, dtype=np.int64)
        self._occ = np.zeros(self.nr * P * S, dtype=np.int64)
        self._f4 = np.zeros(self.nl, dtype=np.int64)
        self._f5 = np.zeros(self.nl, dtype=np.int64)
        self._f4slot = np.full(self.nl, -1, dtype=np.int32)
        self._f5slot = np.full(self.nl, -1, dtype=np.int32)
        self._slot_total = np.zeros(S, dtype=np.int64)
        self._curr_total = np.zeros(self.nc, dtype=np.int64)
        self._prof_total = np.zeros(self.np_, dtype=np.int64)
        self._room_total = np.zeros(self.nr, dtype=np.int64)
        self._fam = np.zeros(5, dtype=np.int64)
        self.grand = 0
        self.aug = 0

    cdef inline void _charge(self, int fam, long long lam_e, int t, long long old, long long new) noexcept nogil:
        cdef long long diff = new - old
        self._slot_total[t] += diff
        self._fam[fam] += diff
        self.grand += diff
        self.aug += diff + (_ind(new) - _ind(old)) * (lam_e + self._lam_slot[t])

    # ------------------------------------------------------------ entity rows
    cdef void _row(self, int[::1] ptr, int[::1] idx, int e, int p, int d, int maxd, int maxc) noexcept nogil:
        cdef int nk = self.nk
        cdef int q, i, k, s, c, n_items = 0, occupied = 0, last = -1, run = 0
        cdef int x, y, a, b, first, second, gap
        for k in range(nk):
            self.cnt[k] = 0
            self.out[k] = 0
        for q in range(ptr[e], ptr[e + 1]):
            i = idx[q]
            if self._day[i] != d:
                continue
            if p >= 0 and not ((self.mask[i] >> p) & 1):
                continue
            s = self._start[i]
            for k in range(s, s + self.dur[i]):
                self.cnt[k] += 1
            self.items[n_items] = i
            n_items += 1
        if n_items == 0:
            return
        for k in range(nk):
            c = <int>self.cnt[k]
            if c > 0:
                if c > 1:
                    self.out[k] += c - 1
                occupied += 1
                last = k
                run += 1
            else:
                if run > maxc:
                    self.out[k - 1] += run - maxc
                run = 0
        if run > maxc:
            self.out[nk - 1] += run - maxc
        if occupied > maxd:
            self.out[last] += occupied - maxd
        if self.multi_campus and n_items > 1:
            for x in range(n_items):
                a = self.items[x]
                for y in range(x + 1, n_items):
                    b = self.items[y]
                    if self.campus[a] == self.campus[b]:
                        continue
                    if self._start[a] <= self._start[b]:
                        first = a
                        second = b
                    else:
                        first = b
                        second = a
                    gap = self._start[second] - self._start[first] - self.dur[first]
                    if gap >= 0 and gap < self.travel[self.campus[first] * self.ncamp + self.campus[second]]:
                        self.out[self._start[second]] += 1

    cdef void _update_curr(self, int e, int d) noexcept nogil:
        cdef int k, base
        cdef long long old, new
        self._row(self.cl_ptr, self.cl_idx, e, -1, d, self.cur_maxd[e], self.cur_maxc[e])
        base = e * self.S + d * self.nk
        for k in range(self.nk):
            old = self._curr[base + k]
            new = self.out[k]
            if old != new:
                self._curr[base + k] = new
                self._curr_total[e] += new - old
                self._charge(CURR, self._lam_curr[e], d * self.nk + k, old, new)

    cdef void _update_prof(self, int e, int p, int d) noexcept nogil:
        cdef int k, base
        cdef long long old, new
        self._row(self.pl_ptr, self.pl_idx, e, p, d, self.prof_maxd[e], self.prof_maxc[e])
        base = (e * self.P + p) * self.S + d * self.nk
        for k in range(self.nk):
            old = self._prof[base + k]
            new = self.out[k]
            if old != new:
                self._prof[base + k] = new
                self._prof_total[e] += new - old
                self._charge(PROF, self.lam_prof, d * self.nk + k, old, new)

    cdef void _update_room_cell(self, int r, int p, int t) noexcept nogil:
        cdef int idx = (r * self.P + p) * self.S + t
        cdef long long new = self._occ[idx] - self.cap[r]
        cdef long long old
        if new < 0:
            new = 0
        old = self._room[idx]
        if old != new:
            self._room[idx] = new
            self._room_total[r] += new - old
            self._charge(ROOM, self.lam_room, t, old, new)

    cdef void _cover(self, int i, int sign) noexcept nogil:
        cdef int r = self.room_of[i]
        cdef int t0 = self._day[i] * self.nk + self._start[i]
        cdef int p, t, base
        for p in range(self.P):
            if not ((self.mask[i] >> p) & 1):
                continue
            base = (r * self.P + p) * self.S
            for t in range(t0, t0 + self.dur[i]):
                self._occ[base + t] += sign
                self._update_room_cell(r, p, t)

    # -------------------------------------------------------- lecture pairs
    cdef void _update_f5(self, int i) noexcept nogil:
        cdef int d = self._day[i], t = -1, q, ot
        cdef long long new = 0, old
        if d >= 0:
            t = d * self.nk + self._start[i]
            for q in range(self.dd_ptr[i], self.dd_ptr[i + 1]):
                if self._day[self.dd_idx[q]] == d:
                    new += 1
        old = self._f5[i]
        ot = self._f5slot[i]
        if old == new and ot == t:
            return
        if ot >= 0:
            self._charge(DD, self.lam_dd, ot, old, 0)
        if t >= 0:
            self._charge(DD, self.lam_dd, t, 0, new)
        self._f5[i] = new
        self._f5slot[i] = t

    cdef void _update_f4(self, int i) noexcept nogil:
        cdef int d = self._day[i], t = -1, q, j, dj, k, ot
        cdef long long new = 0, old
        if d >= 0:
            k = self._start[i]
            t = d * self.nk + k
            for q in range(self.pred_ptr[i], self.pred_ptr[i + 1]):
                j = self.pred_idx[q]
                dj = self._day[j]
                if dj < 0:
                    continue
                if dj > d or (dj == d and self._start[j] >= k):
                    new += 1
        old = self._f4[i]
        ot = self._f4slot[i]
        if old == new and ot == t:
            return
        if ot >= 0:
            self._charge(PREC, self.lam_prec, ot, old, 0)
        if t >= 0:
            self._charge(PREC, self.lam_prec, t, 0, new)
        self._f4[i] = new
        self._f4slot[i] = t

    # ------------------------------------------------------------------- API
    cdef void _place(self, int i, int d, int k) noexcept nogil:
        cdef int od = self._day[i], ok = self._start[i], q, e, p
        if od == d and ok == k:
            return
        if od >= 0:
            self._cover(i, -1)
        self._day[i] = d
        self._start[i] = k if d >= 0 else -1
        if d >= 0:
            self._cover(i, 1)
        for q in range(self.lc_ptr[i], self.lc_ptr[i + 1]):
            e = self.lc_idx[q]
            if od >= 0:
                self._update_curr(e, od)
            if d >= 0 and d != od:
                self._update_curr(e, d)
        for q in range(self.lp_ptr[i], self.lp_ptr[i + 1]):
            e = self.lp_idx[q]
            for p in range(self.P):
                if not ((self.mask[i] >> p) & 1):
                    continue
                if od >= 0:
                    self._update_prof(e, p, od)
                if d >= 0 and d != od:
                    self._update_prof(e, p, d)
        self._update_f4(i)
        for q in range(self.succ_ptr[i], self.succ_ptr[i + 1]):
            self._update_f4(self.succ_idx[q])
        self._update_f5(i)
        for q in range(self.dd_ptr[i], self.dd_ptr[i + 1]):
            self._update_f5(self.dd_idx[q])

    def place(self, int i, int d, int k):
        """Move lecture ``i`` to (day d, start k); d = -1 removes it."""
        self._place(i, d, k)

    def swap(self, int a, int b):
        cdef int da = self._day[a], ka = self._start[a]
        self._place(a, self._day[b], self._start[b])
        self._place(b, da, ka)

    def load(self, day, start):
        day = np.array(day, dtype=np.int32, copy=True)
        start = np.where(day >= 0, np.asarray(start, dtype=np.int32), -1).astype(np.int32)
        self._day = day
        self._start = start
        self.recompute()

    def recompute(self):
        cdef int i, e, d, p
        self._zero()
        for i in range(self.nl):
            if self._day[i] >= 0:
                self._cover(i, 1)
        for e in range(self.nc):
            for d in range(self.nd):
                self._update_curr(e, d)
        for e in range(self.np_):
            for p in range(self.P):
                for d in range(self.nd):
                    self._update_prof(e, p, d)
        for i in range(self.nl):
            self._update_f4(i)
            self._update_f5(i)

    def set_penalties(self, lam_curr, lam_prof, lam_room, lam_dd, lam_prec, lam_slot):
        self._lam_curr = np.array(lam_curr, dtype=np.int64, copy=True)
        self.lam_prof = lam_prof
        self.lam_room = lam_room
        self.lam_dd = lam_dd
        self.lam_prec = lam_prec
        self._lam_slot = np.array(lam_slot, dtype=np.int64, copy=True)
        self.aug = self._augmented()

    cdef long long _augmented(self):
        cdef int S = self.S, e, t, n, i
        cdef long long total = self.grand
        for e in range(self.nc):
            for t in range(S):
                if self._curr[e * S + t] > 0:
                    total += self._lam_curr[e] + self._lam_slot[t]
        for n in range(self._prof.shape[0]):
            if self._prof[n] > 0:
                total += self.lam_prof + self._lam_slot[n % S]
        for n in range(self._room.shape[0]):
            if self._room[n] > 0:
                total += self.lam_room + self._lam_slot[n % S]
        for i in range(self.nl):
            if self._f4[i] > 0:
                total += self.lam_prec + self._lam_slot[self._f4slot[i]]
            if self._f5[i] > 0:
                total += self.lam_dd + self._lam_slot[self._f5slot[i]]
        return total

    def clone(self):
        """Independent copy sharing only the immutable instance arrays."""
        cdef Kernel k = Kernel.__new__(Kernel)
        k.data = self.data
        k.nl, k.nc, k.np_, k.nr, k.nd = self.nl, self.nc, self.np_, self.nr, self.nd
        k.nk, k.S, k.P, k.ncamp = self.nk, self.S, self.P, self.ncamp
        k.multi_campus = self.multi_campus
        k.dur, k.room_of, k.campus, k.mask, k.travel = self.dur, self.room_of, self.campus, self.mask, self.travel
        k.cur_maxd, k.cur_maxc, k.prof_maxd, k.prof_maxc, k.cap = (
            self.cur_maxd, self.cur_maxc, self.prof_maxd, self.prof_maxc, self.cap)
        k.lc_ptr, k.lc_idx, k.lp_ptr, k.lp_idx = self.lc_ptr, self.lc_idx, self.lp_ptr, self.lp_idx
        k.cl_ptr, k.cl_idx, k.pl_ptr, k.pl_idx = self.cl_ptr, self.cl_idx, self.pl_ptr, self.pl_idx
        k.rl_ptr, k.rl_idx, k.dd_ptr, k.dd_idx = self.rl_ptr, self.rl_idx, self.dd_ptr, self.dd_idx
        k.pred_ptr, k.pred_idx, k.succ_ptr, k.succ_idx = self.pred_ptr, self.pred_idx, self.succ_ptr, self.succ_idx
        k.items = np.zeros_like(np.asarray(self.items))
        k.cnt = np.zeros_like(np.asarray(self.cnt))
        k.out = np.zeros_like(np.asarray(self.out))
        k._day = np.array(self._day, copy=True)
        k._start = np.array(self._start, copy=True)
        k._curr = np.array(self._curr, copy=True)
        k._prof = np.array(self._prof, copy=True)
        k._room = np.array(self._room, copy=True)
        k._occ = np.array(self._occ, copy=True)
        k._f4 = np.array(self._f4, copy=True)
        k._f5 = np.array(self._f5, copy=True)
        k._f4slot = np.array(self._f4slot, copy=True)
        k._f5slot = np.array(self._f5slot, copy=True)
        k._slot_total = np.array(self._slot_total, copy=True)
        k._curr_total = np.array(self._curr_total, copy=True)
        k._prof_total = np.array(self._prof_total, copy=True)
        k._room_total = np.array(self._room_total, copy=True)
        k._fam = np.array(self._fam, copy=True)
        k._lam_curr = np.array(self._lam_curr, copy=True)
        k._lam_slot = np.array(self._lam_slot, copy=True)
        k.lam_prof, k.lam_room, k.lam_dd, k.lam_prec = self.lam_prof, self.lam_room, self.lam_dd, self.lam_prec
        k.grand = self.grand
        k.aug = self.aug
        return k

    # --------------------------------------------------------------- queries
    property day:
        def __get__(self):
            return np.asarray(self._day)

    property start:
        def __get__(self):
            return np.asarray(self._start)

    def position(self, int i):
        return (self._day[i], self._start[i])

    def family_totals(self):
        return tuple(int(self._fam[n]) for n in range(5))

    def argmax_entities(self, int kind):
        cdef long long[::1] arr
        cdef long long best = 0, v
        cdef int n
        if kind == 0:
            arr = self._curr_total
        elif kind == 1:
            arr = self._prof_total
        elif kind == 2:
            arr = self._room_total
        else:
            arr = self._slot_total
        for n in range(arr.shape[0]):
            if arr[n] > best:
                best = arr[n]
        if best == 0:
            return []
        return [n for n in range(arr.shape[0]) if arr[n] == best]

    def row_argmax(self, int kind, int e):
        cdef long long[::1] arr
        cdef int base, n, q
        cdef long long best = 0
        if kind == 0:
            arr = self._curr
            base = e * self.S
            n = self.S
        elif kind == 1:
            arr = self._prof
            base = e * self.P * self.S
            n = self.P * self.S
        else:
            arr = self._room
            base = e * self.P * self.S
            n = self.P * self.S
        for q in range(n):
            if arr[base + q] > best:
                best = arr[base + q]
        if best == 0:
            return []
        return [q for q in range(n) if arr[base + q] == best]

    def covering(self, int kind, int e, int p, int t):
        cdef int d = t // self.nk, k = t % self.nk, q, i, lo, hi, s
        cdef int[::1] idx
        out = []
        if kind == 3:
            for i in range(self.nl):
                if self._day[i] != d:
                    continue
                if p >= 0 and not ((self.mask[i] >> p) & 1):
                    continue
                s = self._start[i]
                if s <= k < s + self.dur[i]:
                    out.append(i)
            return out
        if kind == 0:
            lo = self.cl_ptr[e]; hi = self.cl_ptr[e + 1]; idx = self.cl_idx
        elif kind == 1:
            lo = self.pl_ptr[e]; hi = self.pl_ptr[e + 1]; idx = self.pl_idx
        else:
            lo = self.rl_ptr[e]; hi = self.rl_ptr[e + 1]; idx = self.rl_idx
        for q in range(lo, hi):
            i = idx[q]
            if self._day[i] != d:
                continue
            if p >= 0 and not ((self.mask[i] >> p) & 1):
                continue
            s = self._start[i]
            if s <= k < s + self.dur[i]:
                out.append(i)
        return out

    def violators(self, int fam):
        cdef long long[::1] arr = self._f5 if fam == DD else self._f4
        cdef int i
        return [i for i in range(self.nl) if arr[i] > 0]

    def arrays(self):
        return {
            "day": np.asarray(self._day), "start": np.asarray(self._start),
            "curriculum": np.asarray(self._curr), "professor": np.asarray(self._prof),
            "room": np.asarray(self._room),
            "precedence": np.asarray(self._f4), "precedence_slot": np.asarray(self._f4slot),
            "different_day": np.asarray(self._f5), "different_day_slot": np.asarray(self._f5slot),
            "slot_total": np.asarray(self._slot_total), "curriculum_total": np.asarray(self._curr_total),
            "professor_total": np.asarray(self._prof_total), "room_total": np.asarray(self._room_total),
        }
