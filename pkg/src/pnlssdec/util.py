"""Small shared helpers: seeds, atomic files, digests."""

import hashlib
import json
import os
import tempfile


def derive_seed(base, label):
    """Derive a named 63-bit child seed from a master seed.

    Every random stream in the pipeline is seeded through this function so
    that a single master seed reproduces the whole run while independent
    stages (excitation, tensor points, CPD restarts, ...) get decorrelated
    streams.
    """
    digest = hashlib.sha256(f"{base}/{label}".encode()).digest()
    return int.from_bytes(digest[:8], "big") >> 1


def atomic_write_bytes(path, data):
    """Write ``data`` to ``path`` through a temp file + rename."""
    directory = os.path.dirname(os.path.abspath(path))
    os.makedirs(directory, exist_ok=True)
    fd, tmp = tempfile.mkstemp(dir=directory, suffix=".tmp")
    try:
        with os.fdopen(fd, "wb") as handle:
            handle.write(data)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def atomic_write_text(path, text):
    atomic_write_bytes(path, text.encode())


def save_json(path, obj):
    atomic_write_text(path, json.dumps(obj, indent=2, sort_keys=True) + "\n")


def load_json(path):
    with open(path) as handle:
        return json.load(handle)


def sha256_file(path):
    digest = hashlib.sha256()
    with open(path, "rb") as handle:
        for chunk in iter(lambda: handle.read(65536), b""):
            digest.update(chunk)
    return digest.hexdigest()
