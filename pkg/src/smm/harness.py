"""The distributed-execution surface: an in-process server fleet and a
coordinator/worker mode over TCP.

Topology: one user connected to each of N honest-but-curious servers
over a private link.  A worker is stateless per job: it receives its
share (plus the public matrix when only A is hidden), multiplies,
answers, and forgets.  No frame addressed to worker i ever carries
share material for worker j.

Wire framing: magic ``SMM1``, one type byte, a little-endian u64
payload length, then the payload in the binary matrix format.  Share
payloads hold two matrices back to back (encoded A-share, then either
the public B or the encoded B-share); answers hold one.
"""

from __future__ import annotations

import socket
import socketserver
import struct
import threading
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field as dc_field
from fractions import Fraction
from pathlib import Path
from typing import Callable, Optional

from .errors import ConfigurationError, ProtocolError, WorkerError
from .field import make_rng
from .linalg import FieldMatrix, from_bytes, to_bytes
from .schemes import (
    AnswerSet,
    SchemePlan,
    Share,
    ShareSet,
    decode,
    encode,
    server_compute,
)

MAGIC = b"SMM1"
MSG_SHARE_ONE_SIDED = 1
MSG_SHARE_FULLY = 2
MSG_ANSWER = 3
MSG_ERROR = 4

_FRAME_HEADER = struct.Struct("<4sBQ")
MAX_PAYLOAD = 1 << 30  # refuse absurd frames instead of allocating them

ENTRY_BYTES = 8  # wire entries are u64


def encode_frame(msg_type: int, payload: bytes) -> bytes:
    return _FRAME_HEADER.pack(MAGIC, msg_type, len(payload)) + payload


def _recvall(sock: socket.socket, n: int) -> bytes:
    chunks = []
    got = 0
    while got < n:
        chunk = sock.recv(n - got)
        if not chunk:
            raise ProtocolError(f"connection closed mid-frame ({got}/{n} bytes)")
        chunks.append(chunk)
        got += len(chunk)
    return b"".join(chunks)


def read_frame(sock: socket.socket) -> tuple[int, bytes]:
    """Read one frame; raises ProtocolError on bad magic or oversize."""
    header = _recvall(sock, _FRAME_HEADER.size)
    magic, msg_type, length = _FRAME_HEADER.unpack(header)
    if magic != MAGIC:
        raise ProtocolError(f"bad magic {magic!r}")
    if length > MAX_PAYLOAD:
        raise ProtocolError(f"frame payload of {length} bytes refused")
    return msg_type, _recvall(sock, length)


def share_frame(share: Share, public_b: Optional[FieldMatrix]) -> bytes:
    if share.b is not None:
        return encode_frame(MSG_SHARE_FULLY, to_bytes(share.a) + to_bytes(share.b))
    if public_b is None:
        raise ConfigurationError("one-sided share frame needs the public matrix")
    return encode_frame(MSG_SHARE_ONE_SIDED, to_bytes(share.a) + to_bytes(public_b))


def parse_share_payload(msg_type: int, payload: bytes) -> tuple[FieldMatrix, FieldMatrix]:
    """Returns (a_share, second matrix) where the second matrix is the
    public B for one-sided frames and the B-share for fully frames."""
    first, offset = from_bytes(payload)
    second, offset = from_bytes(payload, offset)
    if offset != len(payload):
        raise ProtocolError(f"{len(payload) - offset} trailing bytes in share frame")
    return first, second


def parse_answer_payload(payload: bytes) -> FieldMatrix:
    z, offset = from_bytes(payload)
    if offset != len(payload):
        raise ProtocolError(f"{len(payload) - offset} trailing bytes in answer frame")
    return z


# -- job description and accounting -----------------------------------------


@dataclass(frozen=True)
class JobSpec:
    """One multiplication job: the plan, both inputs (B is the public
    matrix for one-sided plans), and an optional seed that makes the key
    draws reproducible."""

    plan: SchemePlan
    a: FieldMatrix
    b: FieldMatrix
    seed: Optional[int] = None


@dataclass
class TranscriptLog:
    """Byte accounting and timings for one job.

    Download bytes count answer-matrix entries only (N * entries * 8),
    which is the denominator of the communication rate; framing and the
    public matrix are excluded.  The summary deliberately omits
    wall-clock so that seeded runs print byte-identical output.
    """

    scheme_id: str
    n_servers: int
    desired_entries: int
    upload_bytes: dict[int, int] = dc_field(default_factory=dict)
    download_bytes: dict[int, int] = dc_field(default_factory=dict)
    phase_seconds: dict[str, float] = dc_field(default_factory=dict)
    sent_frames: Optional[dict[int, bytes]] = None
    received_frames: Optional[dict[int, bytes]] = None

    @property
    def total_upload(self) -> int:
        return sum(self.upload_bytes.values())

    @property
    def total_download(self) -> int:
        return sum(self.download_bytes.values())

    @property
    def empirical_rate(self) -> Fraction:
        return Fraction(self.desired_entries * ENTRY_BYTES, self.total_download)

    def summary(self) -> str:
        rate = self.empirical_rate
        lines = [
            f"scheme: {self.scheme_id}",
            f"servers: {self.n_servers}",
            f"upload bytes: {self.total_upload} "
            f"({' '.join(str(self.upload_bytes[i]) for i in sorted(self.upload_bytes))})",
            f"download bytes: {self.total_download} "
            f"({' '.join(str(self.download_bytes[i]) for i in sorted(self.download_bytes))})",
            f"desired bytes: {self.desired_entries * ENTRY_BYTES}",
            f"empirical rate: {rate} ({float(rate):.6f})",
        ]
        return "\n".join(lines) + "\n"


def _share_value_bytes(share: Share) -> int:
    n = len(share.a.entries)
    if share.b is not None:
        n += len(share.b.entries)
    return n * ENTRY_BYTES


# -- in-process fleet ---------------------------------------------------------


class LocalWorker:
    """A simulated honest-but-curious server: it keeps what it saw."""

    def __init__(self, index: int):
        self.index = index
        self.received_share: Optional[Share] = None
        self.received_public_b: Optional[FieldMatrix] = None

    def receive(self, share: Share, public_b: Optional[FieldMatrix]):
        self.received_share = share
        self.received_public_b = public_b

    def compute(self) -> FieldMatrix:
        if self.received_share is None:
            raise WorkerError(f"worker {self.index} has no share")
        return server_compute(self.received_share, self.received_public_b)


class LocalFleet:
    def __init__(self, n: int):
        self.workers = [LocalWorker(i) for i in range(1, n + 1)]

    def dispatch(self, share_set: ShareSet):
        for worker, share in zip(self.workers, share_set.shares):
            worker.receive(share, share_set.public_b)

    def collect(self) -> dict[int, FieldMatrix]:
        return {w.index: w.compute() for w in self.workers}


def adversary_view(fleet: LocalFleet, indices) -> list[Share]:
    """What a colluding subset pooled: exactly the shares it received."""
    views = []
    for i in indices:
        share = fleet.workers[i - 1].received_share
        if share is None:
            raise ConfigurationError(f"worker {i} received nothing to capture")
        views.append(share)
    return views


def run_local(job: JobSpec, fleet: Optional[LocalFleet] = None
              ) -> tuple[FieldMatrix, TranscriptLog]:
    """Encode, dispatch to N in-process servers, collect, decode."""
    plan = job.plan
    log = TranscriptLog(
        scheme_id=f"{plan.kind} N={plan.n_servers} l={plan.n_colluding} "
                  f"q={plan.field.modulus}",
        n_servers=plan.n_servers,
        desired_entries=job.a.rows * job.b.cols,
    )
    rng = make_rng(job.seed)
    t0 = time.perf_counter()
    share_set = encode(plan, job.a, job.b, rng)
    log.phase_seconds["encode"] = time.perf_counter() - t0

    if fleet is None:
        fleet = LocalFleet(plan.n_servers)
    elif len(fleet.workers) != plan.n_servers:
        raise ConfigurationError(
            f"fleet has {len(fleet.workers)} workers, plan needs {plan.n_servers}"
        )
    t0 = time.perf_counter()
    fleet.dispatch(share_set)
    for i, share in enumerate(share_set.shares, start=1):
        log.upload_bytes[i] = _share_value_bytes(share)
    answers = fleet.collect()
    for i, z in answers.items():
        log.download_bytes[i] = len(z.entries) * ENTRY_BYTES
    log.phase_seconds["compute"] = time.perf_counter() - t0

    t0 = time.perf_counter()
    product = decode(plan, AnswerSet(answers, job.a.rows, job.b.cols))
    log.phase_seconds["decode"] = time.perf_counter() - t0
    return product, log


# -- TCP worker ---------------------------------------------------------------


class _WorkerHandler(socketserver.BaseRequestHandler):
    def handle(self):
        log: Callable[[str], None] = self.server.job_log  # type: ignore[attr-defined]
        sock = self.request
        peer = f"{self.client_address[0]}:{self.client_address[1]}"
        while True:
            try:
                msg_type, payload = read_frame(sock)
            except ProtocolError as exc:
                # salvageable protocol garbage: answer with ERROR, drop the
                # connection, keep serving others
                try:
                    sock.sendall(encode_frame(MSG_ERROR, str(exc).encode()))
                except OSError:
                    pass
                return
            except OSError:
                return
            if msg_type not in (MSG_SHARE_ONE_SIDED, MSG_SHARE_FULLY):
                sock.sendall(encode_frame(
                    MSG_ERROR, f"unexpected message type {msg_type}".encode()
                ))
                return
            try:
                first, second = parse_share_payload(msg_type, payload)
                if msg_type == MSG_SHARE_ONE_SIDED:
                    z = server_compute(Share(a=first), public_b=second)
                else:
                    z = server_compute(Share(a=first, b=second))
            except Exception as exc:  # report, stay up
                sock.sendall(encode_frame(MSG_ERROR, str(exc).encode()))
                return
            sock.sendall(encode_frame(MSG_ANSWER, to_bytes(z)))
            log(f"job from {peer}: {first.rows}x{first.cols} share -> "
                f"{z.rows}x{z.cols} answer")


class WorkerServer:
    """A TCP worker; handles concurrent connections, one job at a time
    per connection, no state kept between jobs."""

    def __init__(self, host: str = "127.0.0.1", port: int = 0,
                 job_log: Callable[[str], None] = lambda line: None):
        self._server = socketserver.ThreadingTCPServer(
            (host, port), _WorkerHandler, bind_and_activate=True
        )
        self._server.daemon_threads = True
        self._server.job_log = job_log  # type: ignore[attr-defined]
        self._thread: Optional[threading.Thread] = None

    @property
    def address(self) -> tuple[str, int]:
        return self._server.server_address[:2]

    def start(self):
        self._thread = threading.Thread(target=self._server.serve_forever,
                                        daemon=True)
        self._thread.start()

    def serve_forever(self):
        self._server.serve_forever()

    def stop(self):
        self._server.shutdown()
        self._server.server_close()
        if self._thread is not None:
            self._thread.join(timeout=5)

    def __enter__(self):
        self.start()
        return self

    def __exit__(self, *exc):
        self.stop()


# -- coordinator --------------------------------------------------------------


@dataclass(frozen=True)
class WorkerRegistry:
    """The N worker endpoints a coordinator dispatches to."""

    endpoints: tuple[tuple[str, int], ...]

    @classmethod
    def from_addresses(cls, addresses) -> "WorkerRegistry":
        eps = []
        for addr in addresses:
            host, _, port = addr.strip().rpartition(":")
            if not host or not port.isdigit():
                raise ConfigurationError(f"bad worker address {addr!r}")
            eps.append((host, int(port)))
        return cls(tuple(eps))

    @classmethod
    def from_file(cls, path) -> "WorkerRegistry":
        lines = [
            line for line in Path(path).read_text().splitlines()
            if line.strip() and not line.lstrip().startswith("#")
        ]
        return cls.from_addresses(lines)


def _exchange(endpoint: tuple[str, int], frame: bytes,
              timeout: float) -> tuple[bytes, bytes]:
    """Send one share frame, return (raw answer frame, answer payload)."""
    with socket.create_connection(endpoint, timeout=timeout) as sock:
        sock.sendall(frame)
        msg_type, payload = read_frame(sock)
        if msg_type == MSG_ERROR:
            raise WorkerError(f"worker error: {payload.decode(errors='replace')}")
        if msg_type != MSG_ANSWER:
            raise ProtocolError(f"expected answer frame, got type {msg_type}")
        return encode_frame(msg_type, payload), payload


def run_distributed(job: JobSpec, registry: WorkerRegistry,
                    capture: bool = False, timeout: float = 30.0
                    ) -> tuple[FieldMatrix, TranscriptLog]:
    """Same contract as run_local, over real sockets.

    All N workers must answer; there is no partial decoding.  With
    capture=True the log retains the exact bytes sent to and received
    from every worker, for transcript inspection.
    """
    plan = job.plan
    if len(registry.endpoints) != plan.n_servers:
        raise ConfigurationError(
            f"registry has {len(registry.endpoints)} workers, "
            f"plan needs {plan.n_servers}"
        )
    log = TranscriptLog(
        scheme_id=f"{plan.kind} N={plan.n_servers} l={plan.n_colluding} "
                  f"q={plan.field.modulus}",
        n_servers=plan.n_servers,
        desired_entries=job.a.rows * job.b.cols,
    )
    rng = make_rng(job.seed)
    t0 = time.perf_counter()
    share_set = encode(plan, job.a, job.b, rng)
    log.phase_seconds["encode"] = time.perf_counter() - t0

    frames = [share_frame(s, share_set.public_b) for s in share_set.shares]
    if capture:
        log.sent_frames = {i: f for i, f in enumerate(frames, start=1)}
        log.received_frames = {}

    def talk(i: int) -> tuple[int, bytes, bytes]:
        endpoint = registry.endpoints[i - 1]
        try:
            raw, payload = _exchange(endpoint, frames[i - 1], timeout)
        except OSError as exc:
            raise WorkerError(
                f"worker {i} at {endpoint[0]}:{endpoint[1]} unreachable: {exc}"
            ) from exc
        except ProtocolError as exc:
            raise ProtocolError(f"worker {i}: {exc}") from exc
        except WorkerError as exc:
            raise WorkerError(f"worker {i}: {exc}") from exc
        return i, raw, payload

    t0 = time.perf_counter()
    answers: dict[int, FieldMatrix] = {}
    with ThreadPoolExecutor(max_workers=plan.n_servers) as pool:
        for i, raw, payload in pool.map(talk, range(1, plan.n_servers + 1)):
            z = parse_answer_payload(payload)
            answers[i] = z
            log.upload_bytes[i] = _share_value_bytes(share_set.shares[i - 1])
            log.download_bytes[i] = len(z.entries) * ENTRY_BYTES
            if capture:
                log.received_frames[i] = raw
    log.phase_seconds["compute"] = time.perf_counter() - t0

    t0 = time.perf_counter()
    product = decode(plan, AnswerSet(answers, job.a.rows, job.b.cols))
    log.phase_seconds["decode"] = time.perf_counter() - t0
    return product, log


def captured_shares(log: TranscriptLog, indices) -> list[Share]:
    """Decode the captured per-worker byte transcripts back to shares —
    the colluders' view as it actually crossed the wire."""
    if log.sent_frames is None:
        raise ConfigurationError("transcript capture was not enabled")
    views = []
    for i in indices:
        frame = log.sent_frames[i]
        msg_type, length = _FRAME_HEADER.unpack(frame[:_FRAME_HEADER.size])[1:]
        payload = frame[_FRAME_HEADER.size:]
        if len(payload) != length:
            raise ProtocolError(f"captured frame for worker {i} is truncated")
        first, second = parse_share_payload(msg_type, payload)
        if msg_type == MSG_SHARE_ONE_SIDED:
            views.append(Share(a=first))
        else:
            views.append(Share(a=first, b=second))
    return views
