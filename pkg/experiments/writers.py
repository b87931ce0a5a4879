"""
Rendering result records as CSV, JSON or Excel, and writing them atomically.
"""
import io
import json
import logging
import os
import tempfile
from pathlib import Path

import pandas as pd

logger = logging.getLogger(__name__)

EXTENSIONS = {'csv': 'csv', 'json': 'json', 'excel': 'xlsx'}
CONTENT_TYPES = {
    'csv': 'text/csv',
    'json': 'application/json',
    'excel': 'application/vnd.openxmlformats-officedocument.spreadsheetml.sheet',
}


def format_for_path(path, default):
    """Output format implied by a file suffix, else ``default``."""
    suffix = Path(path).suffix.lower().lstrip('.')
    for fmt, extension in EXTENSIONS.items():
        if suffix == extension:
            return fmt
    return default


def render(records, fmt, columns=None):
    """
    Bytes for ``records`` (a list of flat dicts sharing their keys).

    Floats are written with Python's shortest round-trip repr, so reading
    them back gives the same doubles.
    """
    frame = pd.DataFrame.from_records(records, columns=columns)
    if fmt == 'csv':
        return frame.to_csv(index=False, lineterminator='\n').encode('utf-8')
    if fmt == 'json':
        return (json.dumps(records, indent=2, allow_nan=False) + '\n').encode('utf-8')
    if fmt == 'excel':
        buffer = io.BytesIO()
        with pd.ExcelWriter(buffer, engine='openpyxl') as writer:
            frame.to_excel(writer, index=False, sheet_name='Emulation')
        return buffer.getvalue()
    raise ValueError(f"unknown output format {fmt!r}")


def write_atomic(path, content):
    """Write ``content`` to a temp file next to ``path`` and rename it into place."""
    target = Path(path)
    handle, temporary = tempfile.mkstemp(dir=target.parent, prefix=f".{target.name}.", suffix='.tmp')
    try:
        with os.fdopen(handle, 'wb') as stream:
            stream.write(content)
        os.replace(temporary, target)
    except BaseException:
        if os.path.exists(temporary):
            os.unlink(temporary)
        raise
    logger.info(f"Wrote {len(content)} bytes to {target}")
    return target
