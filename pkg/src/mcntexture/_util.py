"""Small shared helpers."""

import os
import tempfile


def atomic_write_bytes(path, data):
    """Write a file atomically (temp file in the same directory + rename)."""
    path = os.fspath(path)
    d = os.path.dirname(os.path.abspath(path))
    os.makedirs(d, exist_ok=True)
    fd, tmp = tempfile.mkstemp(dir=d, prefix=".tmp-", suffix=os.path.basename(path))
    try:
        with os.fdopen(fd, "wb") as fh:
            fh.write(data)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def atomic_write_text(path, text):
    atomic_write_bytes(path, text.encode("utf-8"))


def resolve_jobs(jobs_flag):
    """Resolve the image-level parallelism: flag wins, then MCN_NUM_THREADS."""
    if jobs_flag is not None:
        return int(jobs_flag)
    env = os.environ.get("MCN_NUM_THREADS")
    if env:
        return int(env)
    return 1
