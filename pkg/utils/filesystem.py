"""
Filesystem utilities for writing run artifacts
"""

import json
import logging
import os
from typing import Any, Dict, Iterable, Mapping, Optional

import pandas as pd

logger = logging.getLogger(__name__)


def _ensure_parent(path: str) -> None:
    parent = os.path.dirname(path)
    if parent:
        os.makedirs(parent, exist_ok=True)


def create_directories(
    base_dir: str,
    subdirs: Dict[str, str]
) -> Dict[str, str]:
    """
    Create an output directory tree

    Args:
        base_dir (str): Base directory
        subdirs (Dict[str, str]): Subdirectories relative to base_dir

    Returns:
        Dict[str, str]: Dictionary of absolute directory paths
    """
    directories = {}
    os.makedirs(base_dir, exist_ok=True)

    for name, rel_path in subdirs.items():
        abs_path = os.path.abspath(os.path.join(base_dir, rel_path))
        os.makedirs(abs_path, exist_ok=True)
        logger.debug(f"Created directory: {abs_path}")
        directories[name] = abs_path

    return directories


def dump_json(data: Any) -> str:
    """Stable JSON text: sorted keys, two-space indent, trailing newline"""
    return json.dumps(data, sort_keys=True, indent=2) + "\n"


def write_json(data: Any, output_file: str) -> bool:
    """
    Write a JSON document

    Args:
        data: JSON-serializable object
        output_file (str): Destination path

    Returns:
        bool: True if successful, False otherwise
    """
    try:
        _ensure_parent(output_file)
        with open(output_file, "w", encoding="utf-8") as f:
            f.write(dump_json(data))
        logger.info(f"Wrote {output_file}")
        return True
    except (OSError, TypeError) as e:
        logger.error(f"Failed to write {output_file}: {e}")
        return False


def write_jsonl(records: Iterable[Mapping[str, Any]], output_file: str) -> bool:
    """
    Write one compact JSON object per line

    Args:
        records: JSON-serializable mappings
        output_file (str): Destination path

    Returns:
        bool: True if successful, False otherwise
    """
    try:
        _ensure_parent(output_file)
        count = 0
        with open(output_file, "w", encoding="utf-8") as f:
            for record in records:
                f.write(json.dumps(record, sort_keys=True, separators=(",", ":")) + "\n")
                count += 1
        logger.info(f"Wrote {count} records to {output_file}")
        return True
    except (OSError, TypeError) as e:
        logger.error(f"Failed to write {output_file}: {e}")
        return False


def write_csv(df: pd.DataFrame, output_file: str) -> bool:
    """
    Write a DataFrame as CSV without the index

    Args:
        df (pd.DataFrame): Table to write
        output_file (str): Destination path

    Returns:
        bool: True if successful, False otherwise
    """
    try:
        _ensure_parent(output_file)
        df.to_csv(output_file, index=False)
        logger.info(f"Wrote {len(df)} rows to {output_file}")
        return True
    except OSError as e:
        logger.error(f"Failed to write {output_file}: {e}")
        return False


def write_text(text: str, output_file: str) -> bool:
    try:
        _ensure_parent(output_file)
        with open(output_file, "w", encoding="utf-8") as f:
            f.write(text)
        logger.info(f"Wrote {output_file}")
        return True
    except OSError as e:
        logger.error(f"Failed to write {output_file}: {e}")
        return False


def read_json(input_file: str) -> Optional[Any]:
    """
    Read a JSON document

    Args:
        input_file (str): Source path

    Returns:
        The parsed document, or None if the file is missing or malformed
    """
    if not os.path.exists(input_file):
        logger.error(f"File does not exist: {input_file}")
        return None

    try:
        with open(input_file, "r", encoding="utf-8") as f:
            return json.load(f)
    except (OSError, json.JSONDecodeError) as e:
        logger.error(f"Failed to read {input_file}: {e}")
        return None
