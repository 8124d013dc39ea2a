#!/usr/bin/env python3
# The same job over real sockets: 9 loopback workers, one coordinator,
# length-prefixed binary frames, and a captured transcript proving each
# worker saw nothing but its own share.

import random

from smm import (
    FieldMatrix,
    JobSpec,
    PrimeField,
    WorkerRegistry,
    WorkerServer,
    captured_shares,
    encode,
    plan_fully_secure,
    run_distributed,
    run_local,
)
from smm.linalg import to_bytes

field = PrimeField(101)
plan = plan_fully_secure(9, 1, field)
rng = random.Random(5)
A = FieldMatrix.random(field, 4, 3, rng)
B = FieldMatrix.random(field, 3, 2, rng)
job = JobSpec(plan, A, B, seed=5)

print("starting 9 workers on loopback...")
servers = [WorkerServer(job_log=lambda line: None) for _ in range(9)]
for s in servers:
    s.start()
registry = WorkerRegistry(tuple(s.address for s in servers))
print("registry:", [f"{h}:{p}" for h, p in registry.endpoints])

try:
    product, log = run_distributed(job, registry, capture=True)
finally:
    for s in servers:
        s.stop()

print("\nproduct correct:", product == A @ B)
print(log.summary())

local_product, _ = run_local(job)
print("byte-identical to the in-process run (same seed):",
      to_bytes(product) == to_bytes(local_product))

# transcript inspection: worker i's frame decodes to share i and only share i
expected = encode(plan, A, B, random.Random(5))
views = captured_shares(log, range(1, 10))
clean = all(
    views[i - 1].a == expected.shares[i - 1].a
    and all(views[i - 1].a != expected.shares[j].a for j in range(9) if j != i - 1)
    for i in range(1, 10)
)
print("per-worker share isolation on the wire:", clean)
print("phase timings (s):", {k: round(v, 4) for k, v in log.phase_seconds.items()})
