"""
Artifact exporter
Atomic file writes (temporary file in the target directory, then rename)
for every CSV, parameter document and SVG the commands emit.
"""

import logging
import os
import tempfile
from datetime import datetime
from pathlib import Path
from typing import Any, Dict, Union

import pandas as pd

logger = logging.getLogger(__name__)

CSV_FLOAT_FORMAT = '%.17g'


def _atomic_write(path: Path, payload: bytes) -> None:
    path.parent.mkdir(parents=True, exist_ok=True)
    fd, tmp_name = tempfile.mkstemp(prefix=f".{path.name}.", suffix='.tmp', dir=path.parent)
    try:
        with os.fdopen(fd, 'wb') as f:
            f.write(payload)
            f.flush()
            os.fsync(f.fileno())
        os.replace(tmp_name, path)
    except BaseException:
        if os.path.exists(tmp_name):
            os.unlink(tmp_name)
        raise


def _result(path: Path) -> Dict[str, Any]:
    if path.exists():
        file_size = path.stat().st_size
        logger.info(f"✓ Wrote {path} ({file_size} bytes)")
        return {
            'success': True,
            'status': 'written',
            'filepath': str(path),
            'filename': path.name,
            'file_size': file_size,
            'timestamp': datetime.now().isoformat(),
        }
    logger.error(f"✗ File was not created: {path}")
    return {
        'success': False,
        'status': 'failed',
        'filepath': str(path),
        'error': 'File was not created after write attempt',
        'timestamp': datetime.now().isoformat(),
    }


def write_bytes(payload: bytes, path: Union[str, Path]) -> Dict[str, Any]:
    """
    Write bytes atomically

    Args:
        payload: file content
        path: destination

    Returns:
        Result dictionary with success flag, path and size
    """
    path = Path(path)
    try:
        _atomic_write(path, payload)
    except PermissionError as e:
        logger.error(f"✗ Permission denied writing {path}: {str(e)}")
        raise
    return _result(path)


def write_text(text: str, path: Union[str, Path]) -> Dict[str, Any]:
    return write_bytes(text.encode('utf-8'), path)


def dataframe_to_csv(frame: pd.DataFrame) -> str:
    """Deterministic CSV text: no index, '\\n' line ends, floats at 17 significant digits"""
    return frame.to_csv(index=False, float_format=CSV_FLOAT_FORMAT, lineterminator='\n')


def write_dataframe(frame: pd.DataFrame, path: Union[str, Path]) -> Dict[str, Any]:
    result = write_text(dataframe_to_csv(frame), path)
    result['rows'] = len(frame)
    return result
