# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled kernel backend. Numerically twinned with ``_pure.py``:
same loop order, same double-precision operations, bit-identical results.
Keep the two files in sync."""

from libc.math cimport exp


cdef inline double _wait(double arrival, double carried, double now,
                         double cycle_start) nogil:
    if arrival < cycle_start:
        return carried + now - cycle_start
    return now - arrival


def penalty_sum(double[::1] principal, double[::1] arrival, double[::1] carried,
                double now, double cycle_start, double rate):
    """Sum of principal * e^(wait * rate) over one queue's live vehicles."""
    cdef Py_ssize_t j, n = principal.shape[0]
    cdef double total = 0.0
    for j in range(n):
        total += principal[j] * exp(_wait(arrival[j], carried[j], now, cycle_start) * rate)
    return total


def wait_sum(double[::1] arrival, double[::1] carried,
             double now, double cycle_start):
    """Sum of waiting times over one queue's live vehicles."""
    cdef Py_ssize_t j, n = arrival.shape[0]
    cdef double total = 0.0
    for j in range(n):
        total += _wait(arrival[j], carried[j], now, cycle_start)
    return total


def update_carried(double[::1] arrival, double[::1] carried,
                   double now, double cycle_start):
    """Fold the current cycle's wait into each vehicle's carried wait."""
    cdef Py_ssize_t j, n = arrival.shape[0]
    for j in range(n):
        carried[j] = _wait(arrival[j], carried[j], now, cycle_start)


def run_phase(double[:, ::1] principal, double[:, ::1] arrival,
              double[:, ::1] carried, long long[::1] head, long long[::1] tail,
              int green, int ticks, double[::1] probs, double[:, ::1] uniforms,
              double[::1] new_principal, int capacity, double headway,
              double t0, double accum, long long[::1] passthrough):
    """Advance the intersection tick-by-tick for one green phase.

    Same semantics as the pure backend: arrivals, then failure check, then
    green-queue discharge, each simulated second. Returns
    ``(ticks_done, failed_queue, accum)``.
    """
    cdef Py_ssize_t k, q, j
    cdef double t
    cdef int done = 0, failed = -1
    cdef long long hd[4]
    cdef long long tl[4]
    for q in range(4):
        hd[q] = head[q]
        tl[q] = tail[q]

    for k in range(1, ticks + 1):
        t = t0 + k
        for q in range(4):
            if uniforms[k - 1, q] < probs[q]:
                if q == green and tl[q] == hd[q]:
                    passthrough[q] += 1
                else:
                    j = tl[q]
                    principal[q, j] = new_principal[q]
                    arrival[q, j] = t
                    carried[q, j] = 0.0
                    tl[q] = j + 1
        done = k
        for q in range(4):
            if tl[q] - hd[q] >= capacity:
                failed = q
                break
        if failed >= 0:
            break
        accum += 1.0
        while accum >= headway:
            if tl[green] > hd[green]:
                hd[green] += 1
                accum -= headway
            else:
                if accum > headway:
                    accum = headway
                break

    for q in range(4):
        head[q] = hd[q]
        tail[q] = tl[q]
    return done, failed, accum
