# cython: boundscheck=False, wraparound=False, cdivision=True
# distutils: language = c++
"""Compiled circuit-search kernel. Same algorithm as the pure-Python
engine in circuits.py, over CSR int adjacency; see that module for the
blocking and cap-propagation rules.

Blocked lists drain through a head index instead of front erasure, and
only vertices touched by a start's search are reset before the next one,
so per-start cost tracks the work actually done."""

from libcpp.vector cimport vector

import time as _time


cdef class _Kernel:
    cdef vector[int] indptr
    cdef vector[int] indices
    cdef vector[char] blocked
    cdef vector[char] dirty
    cdef vector[int] touched
    cdef vector[vector[int]] blist
    cdef vector[size_t] bhead
    cdef vector[int] stack
    cdef int n, max_len, start
    cdef long long remaining      # -1 means unlimited
    cdef double deadline          # 0.0 means none
    cdef long long ticks
    cdef int stop_reason          # 0 ok, 1 max_circuits, 2 time_budget
    cdef list out

    def __init__(self, indptr, indices, int n, int max_len,
                 long long max_circuits, double deadline):
        cdef int x
        for x in indptr:
            self.indptr.push_back(x)
        for x in indices:
            self.indices.push_back(x)
        self.n = n
        self.max_len = max_len
        self.remaining = max_circuits
        self.deadline = deadline
        self.ticks = 0
        self.stop_reason = 0
        self.out = []
        self.blocked.resize(n, 0)
        self.dirty.resize(n, 0)
        self.blist.resize(n)
        self.bhead.resize(n, 0)

    cdef inline void _touch(self, int v):
        if not self.dirty[v]:
            self.dirty[v] = 1
            self.touched.push_back(v)

    cdef int _emit(self):
        cdef size_t i
        row = []
        for i in range(self.stack.size()):
            row.append(self.stack[i])
        self.out.append(tuple(row))
        if self.remaining > 0:
            self.remaining -= 1
            if self.remaining == 0:
                self.stop_reason = 1
                return -1
        return 0

    cdef void _unblock(self, int v):
        cdef vector[int] work
        cdef int u, w
        work.push_back(v)
        while not work.empty():
            u = work.back()
            work.pop_back()
            self.blocked[u] = 0
            while self.bhead[u] < self.blist[u].size():
                w = self.blist[u][self.bhead[u]]
                self.bhead[u] += 1
                if self.blocked[w]:
                    work.push_back(w)

    cdef int _search(self, int v):
        # returns 1 found-or-capped, 0 fully explored circuit-free, -1 stop
        cdef int ptr, w, r
        cdef bint found = False, present
        cdef size_t j
        self.ticks += 1
        if self.deadline > 0 and (self.ticks & 1023) == 0:
            if _time.monotonic() >= self.deadline:
                self.stop_reason = 2
                return -1
        self.stack.push_back(v)
        self.blocked[v] = 1
        self._touch(v)
        for ptr in range(self.indptr[v], self.indptr[v + 1]):
            w = self.indices[ptr]
            if w < self.start:
                continue
            if w == self.start:
                found = True
                if self._emit() < 0:
                    return -1
            elif not self.blocked[w]:
                if <int>self.stack.size() >= self.max_len:
                    found = True
                else:
                    r = self._search(w)
                    if r < 0:
                        return -1
                    if r:
                        found = True
        if found:
            self._unblock(v)
        else:
            for ptr in range(self.indptr[v], self.indptr[v + 1]):
                w = self.indices[ptr]
                if w < self.start:
                    continue
                present = False
                for j in range(self.bhead[w], self.blist[w].size()):
                    if self.blist[w][j] == v:
                        present = True
                        break
                if not present:
                    self.blist[w].push_back(v)
                    self._touch(w)
        self.stack.pop_back()
        return 1 if found else 0

    cdef tuple run(self):
        cdef int s, i
        cdef size_t t
        for s in range(self.n):
            for t in range(self.touched.size()):
                i = self.touched[t]
                self.blocked[i] = 0
                self.dirty[i] = 0
                self.blist[i].clear()
                self.bhead[i] = 0
            self.touched.clear()
            self.stack.clear()
            self.start = s
            if self._search(s) < 0:
                break
        return self.out, self.stop_reason


def enumerate_component(indptr, indices, int n, int max_len,
                        long long max_circuits, double deadline):
    """Circuits of one component as tuples of local vertex indices, plus a
    stop code (0 complete, 1 max_circuits, 2 time_budget)."""
    if n == 0:
        return [], 0
    kernel = _Kernel(indptr, indices, n, max_len, max_circuits, deadline)
    return kernel.run()
