"""Pure-Python violation kernel.

Keeps the violation ledger of a schedule exact under single-lecture moves by
recomputing only the (entity, day) rows, room cells and lecture-pair counts a
move can touch. ``_kernel.pyx`` is a line-for-line typed port; both must agree
bit for bit.
"""

from __future__ import annotations

from ._data import KernelData

CURR, PROF, ROOM, DD, PREC = 0, 1, 2, 3, 4


class Kernel:
    backend = "python"

    def __init__(self, data: KernelData):
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
        self.dur = list(data.duration)
        self.room_of = list(data.room)
        self.campus = list(data.campus)
        self.mask = list(data.mask)
        self.travel = list(data.travel)
        self.cur_maxd = list(data.cur_max_daily)
        self.cur_maxc = list(data.cur_max_consec)
        self.prof_maxd = list(data.prof_max_daily)
        self.prof_maxc = list(data.prof_max_consec)
        self.cap = list(data.room_cap)
        d = data
        self.lc = [d.lc_idx[d.lc_ptr[i]:d.lc_ptr[i + 1]] for i in range(self.nl)]
        self.lp = [d.lp_idx[d.lp_ptr[i]:d.lp_ptr[i + 1]] for i in range(self.nl)]
        self.cl = [d.cl_idx[d.cl_ptr[e]:d.cl_ptr[e + 1]] for e in range(self.nc)]
        self.pl = [d.pl_idx[d.pl_ptr[e]:d.pl_ptr[e + 1]] for e in range(self.np_)]
        self.rl = [d.rl_idx[d.rl_ptr[e]:d.rl_ptr[e + 1]] for e in range(self.nr)]
        self.dd = [d.dd_idx[d.dd_ptr[i]:d.dd_ptr[i + 1]] for i in range(self.nl)]
        self.pred = [d.pred_idx[d.pred_ptr[i]:d.pred_ptr[i + 1]] for i in range(self.nl)]
        self.succ = [d.succ_idx[d.succ_ptr[i]:d.succ_ptr[i + 1]] for i in range(self.nl)]
        self.periods_of = [[p for p in range(self.P) if (self.mask[i] >> p) & 1] for i in range(self.nl)]

        self.day = [-1] * self.nl
        self.start = [-1] * self.nl
        self.lam_curr = [0] * self.nc
        self.lam_prof = 0
        self.lam_room = 0
        self.lam_dd = 0
        self.lam_prec = 0
        self.lam_slot = [0] * self.S
        self._zero()

    # ------------------------------------------------------------------ state
    def _zero(self):
        S, P = self.S, self.P
        self.curr = [0] * (self.nc * S)
        self.prof = [0] * (self.np_ * P * S)
        self.room = [0] * (self.nr * P * S)
        self.occ = [0] * (self.nr * P * S)
        self.f4 = [0] * self.nl
        self.f4slot = [-1] * self.nl
        self.f5 = [0] * self.nl
        self.f5slot = [-1] * self.nl
        self.slot_total = [0] * S
        self.curr_total = [0] * self.nc
        self.prof_total = [0] * self.np_
        self.room_total = [0] * self.nr
        self.fam = [0] * 5
        self.grand = 0
        self.aug = 0

    def _charge(self, fam, lam_e, t, old, new):
        diff = new - old
        self.slot_total[t] += diff
        self.fam[fam] += diff
        self.grand += diff
        self.aug += diff + ((new > 0) - (old > 0)) * (lam_e + self.lam_slot[t])

    # ------------------------------------------------------------ entity rows
    def _row(self, lecs, p, d, maxd, maxc):
        nk = self.nk
        day, start, dur, mask = self.day, self.start, self.dur, self.mask
        cnt = [0] * nk
        items = []
        for i in lecs:
            if day[i] != d:
                continue
            if p >= 0 and not (mask[i] >> p) & 1:
                continue
            s = start[i]
            for k in range(s, s + dur[i]):
                cnt[k] += 1
            items.append(i)
        out = [0] * nk
        if not items:
            return out
        occupied = 0
        last = -1
        run = 0
        for k in range(nk):
            c = cnt[k]
            if c > 0:
                if c > 1:
                    out[k] += c - 1
                occupied += 1
                last = k
                run += 1
            else:
                if run > maxc:
                    out[k - 1] += run - maxc
                run = 0
        if run > maxc:
            out[nk - 1] += run - maxc
        if occupied > maxd:
            out[last] += occupied - maxd
        if self.multi_campus and len(items) > 1:
            campus, travel, ncamp = self.campus, self.travel, self.ncamp
            for x in range(len(items)):
                a = items[x]
                for y in range(x + 1, len(items)):
                    b = items[y]
                    if campus[a] == campus[b]:
                        continue
                    if start[a] <= start[b]:
                        first, second = a, b
                    else:
                        first, second = b, a
                    gap = start[second] - start[first] - dur[first]
                    if 0 <= gap < travel[campus[first] * ncamp + campus[second]]:
                        out[start[second]] += 1
        return out

    def _update_curr(self, e, d):
        new = self._row(self.cl[e], -1, d, self.cur_maxd[e], self.cur_maxc[e])
        base = e * self.S + d * self.nk
        lam = self.lam_curr[e]
        arr = self.curr
        for k in range(self.nk):
            old = arr[base + k]
            if old != new[k]:
                arr[base + k] = new[k]
                self.curr_total[e] += new[k] - old
                self._charge(CURR, lam, d * self.nk + k, old, new[k])

    def _update_prof(self, e, p, d):
        new = self._row(self.pl[e], p, d, self.prof_maxd[e], self.prof_maxc[e])
        base = (e * self.P + p) * self.S + d * self.nk
        arr = self.prof
        for k in range(self.nk):
            old = arr[base + k]
            if old != new[k]:
                arr[base + k] = new[k]
                self.prof_total[e] += new[k] - old
                self._charge(PROF, self.lam_prof, d * self.nk + k, old, new[k])

    def _update_room_cell(self, r, p, t):
        idx = (r * self.P + p) * self.S + t
        new = self.occ[idx] - self.cap[r]
        if new < 0:
            new = 0
        old = self.room[idx]
        if old != new:
            self.room[idx] = new
            self.room_total[r] += new - old
            self._charge(ROOM, self.lam_room, t, old, new)

    def _cover(self, i, sign):
        r = self.room_of[i]
        t0 = self.day[i] * self.nk + self.start[i]
        for p in self.periods_of[i]:
            base = (r * self.P + p) * self.S
            for t in range(t0, t0 + self.dur[i]):
                self.occ[base + t] += sign
                self._update_room_cell(r, p, t)

    # -------------------------------------------------------- lecture pairs
    def _update_f5(self, i):
        day = self.day
        d = day[i]
        new = 0
        t = -1
        if d >= 0:
            t = d * self.nk + self.start[i]
            for j in self.dd[i]:
                if day[j] == d:
                    new += 1
        old = self.f5[i]
        ot = self.f5slot[i]
        if old == new and ot == t:
            return
        if ot >= 0:
            self._charge(DD, self.lam_dd, ot, old, 0)
        if t >= 0:
            self._charge(DD, self.lam_dd, t, 0, new)
        self.f5[i] = new
        self.f5slot[i] = t

    def _update_f4(self, i):
        day, start = self.day, self.start
        d = day[i]
        new = 0
        t = -1
        if d >= 0:
            k = start[i]
            t = d * self.nk + k
            for j in self.pred[i]:
                dj = day[j]
                if dj < 0:
                    continue
                if dj > d or (dj == d and start[j] >= k):
                    new += 1
        old = self.f4[i]
        ot = self.f4slot[i]
        if old == new and ot == t:
            return
        if ot >= 0:
            self._charge(PREC, self.lam_prec, ot, old, 0)
        if t >= 0:
            self._charge(PREC, self.lam_prec, t, 0, new)
        self.f4[i] = new
        self.f4slot[i] = t

    # ------------------------------------------------------------------- API
    def place(self, i: int, d: int, k: int) -> None:
        """Move lecture ``i`` to (day d, start k); d = -1 removes it."""
        od = self.day[i]
        ok = self.start[i]
        if od == d and ok == k:
            return
        if od >= 0:
            self._cover(i, -1)
        self.day[i] = d
        self.start[i] = k if d >= 0 else -1
        if d >= 0:
            self._cover(i, 1)
        for e in self.lc[i]:
            if od >= 0:
                self._update_curr(e, od)
            if d >= 0 and d != od:
                self._update_curr(e, d)
        for e in self.lp[i]:
            for p in self.periods_of[i]:
                if od >= 0:
                    self._update_prof(e, p, od)
                if d >= 0 and d != od:
                    self._update_prof(e, p, d)
        self._update_f4(i)
        for j in self.succ[i]:
            self._update_f4(j)
        self._update_f5(i)
        for j in self.dd[i]:
            self._update_f5(j)

    def swap(self, a: int, b: int) -> None:
        da, ka = self.day[a], self.start[a]
        self.place(a, self.day[b], self.start[b])
        self.place(b, da, ka)

    def load(self, day, start) -> None:
        self.day = [int(x) for x in day]
        self.start = [int(x) if d >= 0 else -1 for x, d in zip(start, self.day)]
        self.recompute()

    def recompute(self) -> None:
        """Rebuild the whole ledger from the current schedule."""
        self._zero()
        for i in range(self.nl):
            if self.day[i] >= 0:
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

    def set_penalties(self, lam_curr, lam_prof, lam_room, lam_dd, lam_prec, lam_slot) -> None:
        self.lam_curr = [int(x) for x in lam_curr]
        self.lam_prof = int(lam_prof)
        self.lam_room = int(lam_room)
        self.lam_dd = int(lam_dd)
        self.lam_prec = int(lam_prec)
        self.lam_slot = [int(x) for x in lam_slot]
        self.aug = self._augmented()

    def _augmented(self) -> int:
        S, nk = self.S, self.nk
        ls = self.lam_slot
        total = self.grand
        for e in range(self.nc):
            base = e * S
            lam = self.lam_curr[e]
            for t in range(S):
                if self.curr[base + t] > 0:
                    total += lam + ls[t]
        for n, v in enumerate(self.prof):
            if v > 0:
                total += self.lam_prof + ls[n % S]
        for n, v in enumerate(self.room):
            if v > 0:
                total += self.lam_room + ls[n % S]
        for i in range(self.nl):
            if self.f4[i] > 0:
                total += self.lam_prec + ls[self.f4slot[i]]
            if self.f5[i] > 0:
                total += self.lam_dd + ls[self.f5slot[i]]
        return total

    def clone(self) -> "Kernel":
        """Independent copy sharing only the immutable instance tables."""
        k = object.__new__(Kernel)
        k.__dict__.update(self.__dict__)
        for name in ("day", "start", "lam_curr", "lam_slot", "curr", "prof", "room", "occ", "f4",
                     "f4slot", "f5", "f5slot", "slot_total", "curr_total", "prof_total",
                     "room_total", "fam"):
            setattr(k, name, list(getattr(self, name)))
        return k

    # --------------------------------------------------------------- queries
    def position(self, i: int):
        return (self.day[i], self.start[i])

    def family_totals(self):
        return tuple(self.fam)

    def argmax_entities(self, kind: int):
        arr = (self.curr_total, self.prof_total, self.room_total, self.slot_total)[kind]
        best = 0
        out = []
        for n, v in enumerate(arr):
            if v > best:
                best = v
                out = [n]
            elif v == best and v > 0:
                out.append(n)
        return out

    def row_argmax(self, kind: int, e: int):
        """Flat (period * n_slots + slot) indices of the entity's worst cells."""
        if kind == 0:
            arr, base, n = self.curr, e * self.S, self.S
        elif kind == 1:
            arr, base, n = self.prof, e * self.P * self.S, self.P * self.S
        else:
            arr, base, n = self.room, e * self.P * self.S, self.P * self.S
        best = 0
        out = []
        for q in range(n):
            v = arr[base + q]
            if v > best:
                best = v
                out = [q]
            elif v == best and v > 0:
                out.append(q)
        return out

    def covering(self, kind: int, e: int, p: int, t: int):
        """Added lectures of an entity that are active in period p (-1: any) and cover slot t."""
        if kind == 0:
            lecs = self.cl[e]
        elif kind == 1:
            lecs = self.pl[e]
        elif kind == 2:
            lecs = self.rl[e]
        else:
            lecs = range(self.nl)
        d, k = divmod(t, self.nk)
        out = []
        for i in lecs:
            if self.day[i] != d:
                continue
            if p >= 0 and not (self.mask[i] >> p) & 1:
                continue
            s = self.start[i]
            if s <= k < s + self.dur[i]:
                out.append(i)
        return out

    def violators(self, fam: int):
        arr = self.f5 if fam == DD else self.f4
        return [i for i in range(self.nl) if arr[i] > 0]

    def arrays(self):
        return {
            "day": self.day, "start": self.start,
            "curriculum": self.curr, "professor": self.prof, "room": self.room,
            "precedence": self.f4, "precedence_slot": self.f4slot,
            "different_day": self.f5, "different_day_slot": self.f5slot,
            "slot_total": self.slot_total, "curriculum_total": self.curr_total,
            "professor_total": self.prof_total, "room_total": self.room_total,
        }
