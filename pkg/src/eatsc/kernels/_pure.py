"""Pure-Python kernel backend.

Numerically twinned with the Cython backend in ``_speed.pyx``: every loop
runs in the same order with the same double-precision operations, so both
backends produce bit-identical results. Keep the two files in sync.

Conventions shared by both backends:
  * a queue's live vehicles occupy ``buf[q, head[q]:tail[q]]`` of the flat
    per-episode buffers (indices only ever move forward);
  * a vehicle's waiting time at time ``now`` is ``carried + now - cycle_start``
    if it arrived before the queue's current cycle started, else
    ``now - arrival``.
"""

from math import exp


def _wait(arrival, carried, now, cycle_start):
    if arrival < cycle_start:
        return carried + now - cycle_start
    return now - arrival


def penalty_sum(principal, arrival, carried, now, cycle_start, rate):
    """Sum of principal * e^(wait * rate) over one queue's live vehicles."""
    total = 0.0
    for p, a, c in zip(principal.tolist(), arrival.tolist(), carried.tolist()):
        total += p * exp(_wait(a, c, now, cycle_start) * rate)
    return total


def wait_sum(arrival, carried, now, cycle_start):
    """Sum of waiting times over one queue's live vehicles."""
    total = 0.0
    for a, c in zip(arrival.tolist(), carried.tolist()):
        total += _wait(a, c, now, cycle_start)
    return total


def update_carried(arrival, carried, now, cycle_start):
    """Fold the current cycle's wait into each vehicle's carried wait.

    Called when a queue's green phase ends (its cycle boundary); the caller
    then sets the queue's cycle_start to ``now``.
    """
    n = arrival.shape[0]
    for j in range(n):
        carried[j] = _wait(arrival[j], carried[j], now, cycle_start)


def run_phase(
    principal,
    arrival,
    carried,
    head,
    tail,
    green,
    ticks,
    probs,
    uniforms,
    new_principal,
    capacity,
    headway,
    t0,
    accum,
    passthrough,
):
    """Advance the intersection tick-by-tick for one green phase.

    Each 1-second tick: (a) Bernoulli arrivals per queue (a vehicle reaching
    an empty green queue passes through without queueing), (b) failure check
    (any count at capacity ends the phase at this tick), (c) discharge from
    the green queue, one vehicle per ``headway`` seconds of accumulated green.

    Mutates the queue buffers, ``head``/``tail`` and ``passthrough`` in
    place. Returns ``(ticks_done, failed_queue, accum)`` where
    ``failed_queue`` is -1 when no queue reached capacity.
    """
    u = uniforms.tolist()
    p = probs.tolist()
    pr = new_principal.tolist()
    hd = [int(head[q]) for q in range(4)]
    tl = [int(tail[q]) for q in range(4)]

    done = 0
    failed = -1
    for k in range(1, ticks + 1):
        t = t0 + k
        row = u[k - 1]
        for q in range(4):
            if row[q] < p[q]:
                if q == green and tl[q] == hd[q]:
                    passthrough[q] += 1
                else:
                    j = tl[q]
                    principal[q, j] = pr[q]
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
