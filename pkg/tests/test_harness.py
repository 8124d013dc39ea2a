import itertools
import random
import socket
import threading
from collections import Counter
from fractions import Fraction

import pytest

from smm.errors import ConfigurationError, ProtocolError, WorkerError
from smm.field import PrimeField
from smm.harness import (
    ENTRY_BYTES,
    MSG_ANSWER,
    MSG_ERROR,
    JobSpec,
    LocalFleet,
    WorkerRegistry,
    WorkerServer,
    adversary_view,
    captured_shares,
    encode_frame,
    read_frame,
    run_distributed,
    run_local,
    share_frame,
)
from smm.linalg import FieldMatrix, to_bytes
from smm.schemes import (
    encode,
    encode_with_keys,
    plan_aligned_8_1,
    plan_fully_secure,
    plan_one_sided,
)

F101 = PrimeField(101)


def naive_matmul(a, b):
    q = a.field.modulus
    return FieldMatrix.from_rows(a.field, [
        [sum(a.at(i, k) * b.at(k, j) for k in range(a.cols)) % q
         for j in range(b.cols)]
        for i in range(a.rows)
    ])


@pytest.fixture
def small_job():
    rng = random.Random(0)
    a = FieldMatrix.random(F101, 4, 3, rng)
    b = FieldMatrix.random(F101, 3, 2, rng)
    return a, b


# ---------------------------------------------------------------------------
# local mode
# ---------------------------------------------------------------------------

def test_run_local_one_sided(small_job):
    a, b = small_job
    plan = plan_one_sided(4, 2, F101)
    product, log = run_local(JobSpec(plan, a, b, seed=1))
    assert product == naive_matmul(a, b)
    assert log.empirical_rate == Fraction(1, 2)
    assert set(log.phase_seconds) == {"encode", "compute", "decode"}


def test_run_local_aligned_rate(small_job):
    a, b = small_job
    product, log = run_local(JobSpec(plan_aligned_8_1(F101), a, b, seed=2))
    assert product == naive_matmul(a, b)
    assert log.empirical_rate == Fraction(1, 2)


def test_run_local_fully_rate(small_job):
    a, b = small_job
    product, log = run_local(JobSpec(plan_fully_secure(9, 1, F101), a, b, seed=3))
    assert product == naive_matmul(a, b)
    assert log.empirical_rate == Fraction(4, 9)


def test_run_local_single_server_degenerate(small_job):
    # N=1, l=0: plain remote multiplication
    a, b = small_job
    product, log = run_local(JobSpec(plan_one_sided(1, 0, F101), a, b, seed=4))
    assert product == naive_matmul(a, b)
    assert log.empirical_rate == 1


def test_download_accounting(small_job):
    a, b = small_job
    plan = plan_fully_secure(9, 1, F101)
    _, log = run_local(JobSpec(plan, a, b, seed=5))
    # answers are (4/2)x(2/2) = 2x1 blocks
    assert all(v == 2 * 1 * ENTRY_BYTES for v in log.download_bytes.values())
    assert log.total_download == 9 * 2 * ENTRY_BYTES


def test_seeded_runs_are_identical(small_job):
    a, b = small_job
    plan = plan_one_sided(4, 2, F101)
    p1, l1 = run_local(JobSpec(plan, a, b, seed=7))
    p2, l2 = run_local(JobSpec(plan, a, b, seed=7))
    assert p1 == p2
    assert l1.summary() == l2.summary()
    p3, _ = run_local(JobSpec(plan, a, b, seed=8))
    assert p3 == p1  # the product never depends on the keys


def test_fleet_size_checked(small_job):
    a, b = small_job
    with pytest.raises(ConfigurationError):
        run_local(JobSpec(plan_one_sided(4, 2, F101), a, b), fleet=LocalFleet(3))


# ---------------------------------------------------------------------------
# adversary view
# ---------------------------------------------------------------------------

def test_adversary_view_matches_encoder(small_job):
    a, b = small_job
    plan = plan_one_sided(4, 2, F101)
    fleet = LocalFleet(4)
    run_local(JobSpec(plan, a, b, seed=11), fleet)
    ss = encode(plan, a, b, random.Random(11))
    views = adversary_view(fleet, [1, 3])
    assert views[0].a == ss.shares[0].a
    assert views[1].a == ss.shares[2].a
    # the public matrix reaches every worker
    assert all(w.received_public_b == b for w in fleet.workers)


def test_adversary_view_passes_secrecy_audit():
    # wire the exact-counting audit through the fleet: enumerate keys,
    # dispatch for real, histogram what the colluders captured
    f3 = PrimeField(3)
    plan = plan_one_sided(3, 1, f3, allow_repeated_points=True)
    b = FieldMatrix(f3, 1, 1, [1])
    collusion = [2]
    hists = []
    for a_vals in itertools.product(range(3), repeat=2):
        a = FieldMatrix(f3, 2, 1, a_vals)
        hist = Counter()
        for k in range(3):
            ss = encode_with_keys(plan, a, b, [FieldMatrix(f3, 1, 1, [k])])
            fleet = LocalFleet(3)
            fleet.dispatch(ss)
            views = adversary_view(fleet, collusion)
            hist[tuple(v.a.entries for v in views)] += 1
        hists.append(hist)
    assert all(h == hists[0] for h in hists)  # tv distance exactly 0


# ---------------------------------------------------------------------------
# framing
# ---------------------------------------------------------------------------

def test_frame_roundtrip_over_socketpair():
    left, right = socket.socketpair()
    try:
        payload = b"\x01\x02\x03" * 100
        left.sendall(encode_frame(MSG_ANSWER, payload))
        msg_type, got = read_frame(right)
        assert msg_type == MSG_ANSWER and got == payload
    finally:
        left.close()
        right.close()


def test_frame_rejects_bad_magic():
    left, right = socket.socketpair()
    try:
        left.sendall(b"NOPE" + bytes(9))
        with pytest.raises(ProtocolError):
            read_frame(right)
    finally:
        left.close()
        right.close()


def test_share_frame_needs_public_matrix(small_job):
    a, b = small_job
    ss = encode(plan_one_sided(4, 2, F101), a, b, random.Random(0))
    with pytest.raises(ConfigurationError):
        share_frame(ss.shares[0], None)


# ---------------------------------------------------------------------------
# distributed mode
# ---------------------------------------------------------------------------

@pytest.fixture
def fleet9():
    servers = [WorkerServer() for _ in range(9)]
    for s in servers:
        s.start()
    yield servers
    for s in servers:
        s.stop()


def test_distributed_equals_local(fleet9, small_job):
    a, b = small_job
    plan = plan_fully_secure(9, 1, F101)
    registry = WorkerRegistry(tuple(s.address for s in fleet9))
    job = JobSpec(plan, a, b, seed=21)
    p_dist, log = run_distributed(job, registry, capture=True)
    p_local, _ = run_local(job)
    assert to_bytes(p_dist) == to_bytes(p_local)
    assert p_dist == naive_matmul(a, b)
    assert log.empirical_rate == Fraction(4, 9)


def test_distributed_share_isolation(fleet9, small_job):
    a, b = small_job
    plan = plan_fully_secure(9, 1, F101)
    registry = WorkerRegistry(tuple(s.address for s in fleet9))
    _, log = run_distributed(JobSpec(plan, a, b, seed=22), registry, capture=True)
    expected = encode(plan, a, b, random.Random(22))
    views = captured_shares(log, range(1, 10))
    for i, view in enumerate(views, start=1):
        assert view.a == expected.shares[i - 1].a
        assert view.b == expected.shares[i - 1].b
        for j in range(9):
            if j != i - 1:
                assert view.a != expected.shares[j].a
    assert len({log.sent_frames[i] for i in range(1, 10)}) == 9


def test_distributed_one_sided_ships_public_matrix(small_job):
    a, b = small_job
    plan = plan_one_sided(4, 2, F101)
    servers = [WorkerServer() for _ in range(4)]
    for s in servers:
        s.start()
    try:
        registry = WorkerRegistry(tuple(s.address for s in servers))
        product, log = run_distributed(JobSpec(plan, a, b, seed=23), registry,
                                       capture=True)
        assert product == naive_matmul(a, b)
        # every one-sided frame carries the public B
        from smm.harness import parse_share_payload, MSG_SHARE_ONE_SIDED
        for i in range(1, 5):
            frame = log.sent_frames[i]
            payload = frame[13:]
            _, second = parse_share_payload(MSG_SHARE_ONE_SIDED, payload)
            assert second == b
    finally:
        for s in servers:
            s.stop()


def test_worker_count_mismatch(small_job):
    a, b = small_job
    plan = plan_fully_secure(9, 1, F101)
    with pytest.raises(ConfigurationError):
        run_distributed(JobSpec(plan, a, b), WorkerRegistry((("127.0.0.1", 1),)))


def test_unreachable_worker_fails_job(small_job):
    a, b = small_job
    plan = plan_one_sided(4, 2, F101)
    # grab ports that nothing listens on
    dead = []
    for _ in range(4):
        s = socket.socket()
        s.bind(("127.0.0.1", 0))
        dead.append(s.getsockname())
        s.close()
    with pytest.raises(WorkerError):
        run_distributed(JobSpec(plan, a, b, seed=1),
                        WorkerRegistry(tuple(dead)), timeout=2.0)


def test_worker_survives_malformed_magic():
    with WorkerServer() as server:
        host, port = server.address
        with socket.create_connection((host, port), timeout=5) as sock:
            sock.sendall(b"XXXX" + bytes(9))
            msg_type, payload = read_frame(sock)
            assert msg_type == MSG_ERROR
            assert b"magic" in payload
        # a well-formed job still works afterwards
        rng = random.Random(1)
        a = FieldMatrix.random(F101, 2, 2, rng)
        share = encode(plan_one_sided(1, 0, F101),
                       a, FieldMatrix.identity(F101, 2), rng).shares[0]
        frame = share_frame(share, FieldMatrix.identity(F101, 2))
        with socket.create_connection((host, port), timeout=5) as sock:
            sock.sendall(frame)
            msg_type, payload = read_frame(sock)
            assert msg_type == MSG_ANSWER


def test_worker_reports_shape_mismatch():
    with WorkerServer() as server:
        rng = random.Random(2)
        share = FieldMatrix.random(F101, 2, 3, rng)
        wrong_b = FieldMatrix.random(F101, 5, 2, rng)
        frame = encode_frame(1, to_bytes(share) + to_bytes(wrong_b))
        with socket.create_connection(server.address, timeout=5) as sock:
            sock.sendall(frame)
            msg_type, payload = read_frame(sock)
            assert msg_type == MSG_ERROR


def test_distributed_grid_matches_local():
    # one representative plan per scheme kind, over real sockets
    rng = random.Random(4)
    plans = [
        plan_one_sided(3, 1, F101),
        plan_fully_secure(4, 0, F101),
        plan_aligned_8_1(F101),
    ]
    for plan in plans:
        a = FieldMatrix.random(F101, 4, 3, rng)
        b = FieldMatrix.random(F101, 3, 2, rng)
        job = JobSpec(plan, a, b, seed=99)
        servers = [WorkerServer() for _ in range(plan.n_servers)]
        for s in servers:
            s.start()
        try:
            registry = WorkerRegistry(tuple(s.address for s in servers))
            p_dist, _ = run_distributed(job, registry)
        finally:
            for s in servers:
                s.stop()
        p_local, _ = run_local(job)
        assert p_dist == p_local == naive_matmul(a, b), plan.kind


def test_concurrent_jobs_from_two_coordinators(fleet9):
    plan = plan_fully_secure(9, 1, F101)
    registry = WorkerRegistry(tuple(s.address for s in fleet9))
    rng = random.Random(3)
    jobs = []
    for seed in (31, 32):
        a = FieldMatrix.random(F101, 4, 3, rng)
        b = FieldMatrix.random(F101, 3, 2, rng)
        jobs.append(JobSpec(plan, a, b, seed=seed))
    results = {}

    def coordinate(idx, job):
        product, _ = run_distributed(job, registry)
        results[idx] = product

    threads = [threading.Thread(target=coordinate, args=(i, j))
               for i, j in enumerate(jobs)]
    for t in threads:
        t.start()
    for t in threads:
        t.join(timeout=30)
    assert results[0] == naive_matmul(jobs[0].a, jobs[0].b)
    assert results[1] == naive_matmul(jobs[1].a, jobs[1].b)


# ---------------------------------------------------------------------------
# registry parsing
# ---------------------------------------------------------------------------

def test_registry_from_file(tmp_path):
    path = tmp_path / "workers.txt"
    path.write_text("# comment\n127.0.0.1:9001\nlocalhost:9002\n\n")
    reg = WorkerRegistry.from_file(path)
    assert reg.endpoints == (("127.0.0.1", 9001), ("localhost", 9002))
    bad = tmp_path / "bad.txt"
    bad.write_text("no-port-here\n")
    with pytest.raises(ConfigurationError):
        WorkerRegistry.from_file(bad)


def test_captured_shares_requires_capture(small_job):
    a, b = small_job
    _, log = run_local(JobSpec(plan_one_sided(4, 2, F101), a, b, seed=1))
    with pytest.raises(ConfigurationError):
        captured_shares(log, [1])
