import csv
import logging

import numpy as np
import ujson

from core.errors import SchemaError

logger = logging.getLogger(__name__)

SCHEMA_VERSION = 1
FLOAT_FORMAT = '%.17g'


def encode_complex(value) -> list:
    value = complex(value)
    return [float(value.real), float(value.imag)]


def encode_complex_array(array) -> list:
    """Nested lists of [re, im] pairs, same nesting as `array`."""
    array = np.asarray(array)
    if array.ndim == 0:
        return encode_complex(array.item())
    return [encode_complex_array(item) for item in array]


def encode_real_array(array) -> list:
    return np.asarray(array, dtype=float).tolist()


def decode_complex(value, pointer: str) -> complex:
    """Accept an [re, im] pair or a bare real number."""
    if isinstance(value, bool):
        raise SchemaError(pointer, "expected a number or an [re, im] pair, got a boolean")
    if isinstance(value, (int, float)):
        return complex(float(value), 0.0)
    if isinstance(value, list) and len(value) == 2 and all(
            isinstance(part, (int, float)) and not isinstance(part, bool) for part in value):
        return complex(float(value[0]), float(value[1]))
    raise SchemaError(pointer, f"expected a number or an [re, im] pair, got {value!r}")


def decode_complex_vector(value, pointer: str) -> np.ndarray:
    if not isinstance(value, list) or not value:
        raise SchemaError(pointer, "expected a non-empty array")
    return np.array([decode_complex(item, f"{pointer}/{k}") for k, item in enumerate(value)],
                    dtype=np.complex128)


def decode_complex_matrix(value, pointer: str) -> np.ndarray:
    """Row-major matrix: an array of rows, each an array of complex entries."""
    if not isinstance(value, list) or not value:
        raise SchemaError(pointer, "expected a non-empty array of rows")
    rows = [decode_complex_vector(row, f"{pointer}/{k}") for k, row in enumerate(value)]
    width = len(rows[0])
    for k, row in enumerate(rows):
        if len(row) != width:
            raise SchemaError(f"{pointer}/{k}", f"row has {len(row)} entries, expected {width}")
    return np.vstack(rows)


def require(document: dict, key: str, pointer: str = ""):
    if not isinstance(document, dict):
        raise SchemaError(pointer, "expected an object")
    if key not in document:
        raise SchemaError(f"{pointer}/{key}", "missing required field")
    return document[key]


def load_json_document(file_path: str) -> dict:
    try:
        with open(file_path, 'r', encoding='utf-8') as f:
            document = ujson.load(f)
    except ValueError as e:
        raise SchemaError("/", f"malformed JSON: {e}") from e
    if not isinstance(document, dict):
        raise SchemaError("/", "top-level value must be an object")
    return document


def dumps_report(report: dict) -> str:
    payload = {"schema_version": SCHEMA_VERSION, **report}
    return ujson.dumps(payload, indent=2, escape_forward_slashes=False)


def format_cell(value) -> str:
    if isinstance(value, (bool, np.bool_)):
        return str(int(value))
    if isinstance(value, (int, np.integer)):
        return str(int(value))
    if isinstance(value, (float, np.floating)):
        return FLOAT_FORMAT % float(value)
    return str(value)


def write_csv_rows(stream, header: list, rows: list):
    """Write rows with fixed float formatting and '\\n' line endings."""
    writer = csv.writer(stream, lineterminator='\n')
    writer.writerow(header)
    for row in rows:
        writer.writerow([format_cell(value) for value in row])


def table_csv_rows(entries):
    """One row per entry: an index column per axis, then re and im."""
    entries = np.asarray(entries)
    if entries.ndim == 0:
        raise SchemaError("/", "a quasiprobability table needs at least one axis")
    header = [f"i{axis}" for axis in range(entries.ndim)] + ["re", "im"]
    rows = []
    for index in np.ndindex(*entries.shape):
        value = complex(entries[index])
        rows.append([*index, value.real, value.imag])
    return header, rows


def write_csv(file_path: str, header: list, rows: list):
    with open(file_path, 'w', encoding='utf-8', newline='') as f:
        write_csv_rows(f, header, rows)
    logger.debug(f"Wrote {len(rows)} rows to {file_path}")
