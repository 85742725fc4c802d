"""Plain-HTTP header collector.

Produces snapshot CSVs in the same shape the ingest layer reads: one row
per domain with the full response header block in a single column.  Only
http:// targets are contacted; a redirect to another scheme ends the hop
chain and the last response wins.
"""

from __future__ import annotations

import csv
import http.client
import socket
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from pathlib import Path
from typing import Iterable
from urllib.parse import urljoin, urlsplit

from .ingest import ColumnLayout

MAX_HOPS = 5
_REDIRECT_CODES = {301, 302, 303, 307, 308}

# Matches what write_snapshot_csv emits, so collector output can be listed
# in a manifest without further configuration.
COLLECTOR_LAYOUT = ColumnLayout(url_column="url", header_column="headers",
                                whole_blob=True)


@dataclass(frozen=True)
class FetchResult:
    domain: str
    url: str
    status: int | str
    headers: tuple[tuple[str, str], ...]
    fetched_at: str

    @property
    def ok(self) -> bool:
        return isinstance(self.status, int)

    def header_blob(self) -> str:
        return "\r\n".join(f"{name}: {value}" for name, value in self.headers)


def read_domains_file(path: str | Path) -> list[str]:
    """One domain per line; blank lines and #-comments are skipped.

    Names are lowercased and de-duplicated, first occurrence wins.
    """
    seen: dict[str, None] = {}
    with open(path, encoding="utf-8") as handle:
        for line in handle:
            name = line.split("#", 1)[0].strip().lower()
            if name:
                seen.setdefault(name)
    return list(seen)


def _now() -> str:
    return time.strftime("%Y-%m-%dT%H:%M:%SZ", time.gmtime())


def _status_tag(exc: Exception) -> str:
    if isinstance(exc, (socket.timeout, TimeoutError)):
        return "timeout"
    if isinstance(exc, socket.gaierror):
        return "dns-error"
    if isinstance(exc, ConnectionRefusedError):
        return "refused"
    if isinstance(exc, ConnectionResetError):
        return "reset"
    if isinstance(exc, http.client.HTTPException):
        return "protocol-error"
    return "connect-error"


def _head_once(url: str, timeout: float, user_agent: str):
    """Issue one GET and return (status, headers, location or None)."""
    parts = urlsplit(url)
    if parts.scheme != "http":
        raise ValueError(f"unsupported scheme in {url!r}")
    conn = http.client.HTTPConnection(parts.hostname, parts.port or 80,
                                      timeout=timeout)
    try:
        target = parts.path or "/"
        if parts.query:
            target += "?" + parts.query
        conn.request("GET", target, headers={"User-Agent": user_agent,
                                             "Accept": "*/*"})
        resp = conn.getresponse()
        headers = tuple(resp.getheaders())
        status = resp.status
        resp.read()
    finally:
        conn.close()
    location = None
    if status in _REDIRECT_CODES:
        for name, value in headers:
            if name.lower() == "location":
                location = value
                break
    return status, headers, location


def fetch_one(domain: str, timeout: float = 10.0,
              user_agent: str = "reltrace/0.1", delay: float = 0.0) -> FetchResult:
    """Fetch http://<domain>/ and follow up to MAX_HOPS same-scheme redirects.

    Network failures never raise; they come back as a short status tag in
    place of the HTTP status code.
    """
    origin = f"http://{domain}/"
    url = origin
    status: int | str = "connect-error"
    headers: tuple[tuple[str, str], ...] = ()
    try:
        for hop in range(MAX_HOPS + 1):
            if hop:
                time.sleep(delay)
            status, headers, location = _head_once(url, timeout, user_agent)
            if location is None:
                break
            next_url = urljoin(url, location)
            if urlsplit(next_url).scheme != "http":
                break
            url = next_url
    except Exception as exc:
        status, headers = _status_tag(exc), ()
    return FetchResult(domain=domain, url=origin, status=status,
                       headers=headers, fetched_at=_now())


def collect(domains: Iterable[str], timeout: float = 10.0,
            max_parallel: int = 8, user_agent: str = "reltrace/0.1",
            delay: float = 0.0) -> list[FetchResult]:
    """Fetch every domain with a bounded worker pool, sorted by domain."""
    names = list(domains)
    if not names:
        return []
    workers = max(1, min(max_parallel, len(names)))
    with ThreadPoolExecutor(max_workers=workers) as pool:
        results = list(pool.map(
            lambda d: fetch_one(d, timeout, user_agent, delay), names))
    return sorted(results, key=lambda r: r.domain)


def write_snapshot_csv(results: Iterable[FetchResult], path: str | Path) -> None:
    with open(path, "w", newline="", encoding="utf-8") as handle:
        writer = csv.writer(handle)
        writer.writerow(["url", "status", "fetched_at", "headers"])
        for result in results:
            writer.writerow([result.url, result.status, result.fetched_at,
                             result.header_blob()])
