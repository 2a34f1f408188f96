"""
Streaming transports: NDJSON records in, NDJSON verdicts out.

Records are classified on a worker pool while output order follows input
order. At most ``max_in_flight`` records are queued or being classified at
any time; reading pauses until the oldest verdict has been written.
"""

import io
import os
import socketserver
from collections import deque
from concurrent.futures import Future, ThreadPoolExecutor
from pathlib import Path
from typing import Deque, Iterable, Optional, TextIO, Union

from fluxgate.core.logging_config import get_logger
from fluxgate.core.settings import max_in_flight as default_max_in_flight
from fluxgate.core.settings import worker_threads
from fluxgate.dns.parser import RawRecord, RecordFormat, iter_lines
from fluxgate.pipeline.detector import Detector
from fluxgate.pipeline.verdict import Verdict

logger = get_logger("serve")


def serve(
    detector: Detector,
    source: Iterable[RawRecord],
    sink: TextIO,
    fmt: RecordFormat = RecordFormat.JSON,
    max_in_flight: Optional[int] = None,
    workers: Optional[int] = None,
) -> int:
    """
    Classify a record stream until it ends.

    Blank lines are skipped; every other line yields exactly one verdict
    line, error verdicts included. Lines may be text or undecoded bytes;
    bytes are decoded per line, so invalid UTF-8 only fails its own record.

    Args:
        detector: Loaded detector
        source: Record lines (str, or bytes from a binary stream)
        sink: Verdict lines are written and flushed here
        fmt: Record format of the input lines
        max_in_flight: Bound on pending records (FLUXGATE_MAX_IN_FLIGHT if None)
        workers: Pool size (FLUXGATE_THREADS if None)

    Returns:
        Number of verdicts written
    """
    limit = max_in_flight or default_max_in_flight()
    if limit < 1:
        raise ValueError(f"max_in_flight must be positive, got {limit}")

    written = 0
    pending: Deque["Future[Verdict]"] = deque()

    def emit(future: "Future[Verdict]"):
        nonlocal written
        sink.write(future.result().to_json() + "\n")
        sink.flush()
        written += 1

    with ThreadPoolExecutor(max_workers=workers or worker_threads()) as pool:
        for line in iter_lines(source):
            pending.append(pool.submit(detector.classify_line, line, fmt))
            while len(pending) >= limit or (pending and pending[0].done()):
                emit(pending.popleft())
        while pending:
            emit(pending.popleft())

    logger.info(f"Stream ended after {written} verdicts")
    return written


def serve_socket(
    detector: Detector,
    path: Union[str, Path],
    fmt: RecordFormat = RecordFormat.JSON,
    max_in_flight: Optional[int] = None,
    workers: Optional[int] = None,
) -> socketserver.ThreadingUnixStreamServer:
    """
    Bind a Unix stream socket serving the NDJSON protocol per connection.

    A stale socket file at ``path`` is replaced. The caller runs
    ``serve_forever()`` and ``server_close()``.
    """
    path = Path(path)
    if path.exists():
        path.unlink()

    class _StreamHandler(socketserver.StreamRequestHandler):
        def handle(self):
            writer = io.TextIOWrapper(self.wfile, encoding="utf-8", write_through=True)
            try:
                serve(detector, self.rfile, writer, fmt, max_in_flight, workers)
            except BrokenPipeError:
                logger.warning("Client disconnected before all verdicts were written")
            finally:
                writer.detach()

    server = socketserver.ThreadingUnixStreamServer(os.fspath(path), _StreamHandler)
    server.daemon_threads = True
    logger.success(f"Listening on {path}")
    return server
