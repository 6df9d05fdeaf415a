"""Small shared helpers."""

from __future__ import annotations

import sys
import threading
from typing import Any, Callable

_WORKER_STACK_BYTES = 512 * 1024 * 1024
_WORKER_RECURSION_LIMIT = 1_000_000


def run_with_large_stack(fn: Callable[..., Any], *args: Any, **kwargs: Any) -> Any:
    """Run ``fn`` on a thread with a large stack and recursion limit.

    BDD traversals recurse once per variable; with tens of thousands of
    qubits that exceeds both the default recursion limit and the main
    thread's C stack, so heavy entry points go through here.
    """
    result: list[Any] = []
    error: list[BaseException] = []

    def worker() -> None:
        old_limit = sys.getrecursionlimit()
        sys.setrecursionlimit(_WORKER_RECURSION_LIMIT)
        try:
            result.append(fn(*args, **kwargs))
        except BaseException as exc:
            error.append(exc)
        finally:
            sys.setrecursionlimit(old_limit)

    old_stack = threading.stack_size(_WORKER_STACK_BYTES)
    try:
        thread = threading.Thread(target=worker, name="qsim-worker")
        thread.start()
    finally:
        threading.stack_size(old_stack)
    thread.join()
    if error:
        raise error[0]
    return result[0]
