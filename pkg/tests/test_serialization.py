import io

import numpy as np
import pytest
import ujson

from core.errors import SchemaError
from core.utils.serialization import (
    decode_complex,
    decode_complex_matrix,
    decode_complex_vector,
    dumps_report,
    encode_complex_array,
    format_cell,
    load_json_document,
    require,
    table_csv_rows,
    write_csv_rows,
)


def test_complex_entries_accept_pairs_and_reals():
    assert decode_complex([0.5, -0.25], "/rho/0/0") == complex(0.5, -0.25)
    assert decode_complex(2, "/rho/0/0") == complex(2.0, 0.0)


@pytest.mark.parametrize("value", [True, "1", [1, 2, 3], [1, None], None])
def test_bad_complex_entries_name_their_location(value):
    with pytest.raises(SchemaError) as excinfo:
        decode_complex(value, "/rho/1/0")
    assert excinfo.value.pointer == "/rho/1/0"


def test_ragged_matrix_is_rejected():
    with pytest.raises(SchemaError) as excinfo:
        decode_complex_matrix([[1, 0], [0]], "/rho")
    assert excinfo.value.pointer == "/rho/1"


def test_matrix_decoding():
    matrix = decode_complex_matrix([[[0.5, 0], [0, 0.5]], [[0, -0.5], 0.5]], "/rho")

    assert matrix.shape == (2, 2)
    assert matrix[0, 1] == 0.5j
    assert matrix[1, 0] == -0.5j


def test_empty_vector_is_rejected():
    with pytest.raises(SchemaError):
        decode_complex_vector([], "/state")


def test_missing_field_pointer():
    with pytest.raises(SchemaError) as excinfo:
        require({"rho": []}, "basis_a")
    assert excinfo.value.pointer == "/basis_a"


def test_documents_must_be_objects(tmp_path):
    path = tmp_path / "input.json"
    path.write_text("[1, 2]")
    with pytest.raises(SchemaError):
        load_json_document(str(path))

    path.write_text("{not json")
    with pytest.raises(SchemaError):
        load_json_document(str(path))


def test_missing_document_raises_os_error(tmp_path):
    with pytest.raises(OSError):
        load_json_document(str(tmp_path / "absent.json"))


def test_report_carries_schema_version():
    payload = ujson.loads(dumps_report({"entries": encode_complex_array(np.array([[1 + 2j]]))}))

    assert payload["schema_version"] == 1
    assert payload["entries"] == [[[1.0, 2.0]]]


def test_csv_cells():
    assert format_cell(True) == "1"
    assert format_cell(np.int64(3)) == "3"
    assert format_cell(0.1) == "0.10000000000000001"

    stream = io.StringIO()
    write_csv_rows(stream, ["a", "b"], [[0.5, False]])
    assert stream.getvalue() == "a,b\n0.5,0\n"


def test_table_rows_carry_one_index_column_per_axis():
    header, rows = table_csv_rows(np.array([[0.2, 0.3j], [-0.1, 0.6]]))

    assert header == ["i0", "i1", "re", "im"]
    assert rows[1] == [0, 1, 0.0, 0.3]
    assert rows[2] == [1, 0, -0.1, 0.0]
    assert len(rows) == 4

    header, rows = table_csv_rows(np.full((2, 2, 2), 0.125))
    assert header == ["i0", "i1", "i2", "re", "im"]
    assert rows[-1] == [1, 1, 1, 0.125, 0.0]


def test_table_rows_format_indices_as_integers():
    stream = io.StringIO()
    write_csv_rows(stream, *table_csv_rows(np.array([1.0])))

    assert stream.getvalue() == "i0,re,im\n0,1,0\n"


def test_scalar_table_has_no_rows():
    with pytest.raises(SchemaError):
        table_csv_rows(np.array(1.0))
