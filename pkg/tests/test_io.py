import json

import numpy as np
import pytest
from hypothesis import HealthCheck, given, settings, strategies as st

from dtl.errors import EmptyDataset, IoError, ModelFormatError, ParseError, UnsupportedDimension
from dtl.io import (
    MeshData, load_model, read_dataset, read_mesh, read_queries, save_model, write_dataset,
    write_mesh, write_surface_mesh,
)
from dtl.optimizer import DtlModel, FitConfig, LossKind, fit, predict
from dtl.pointset import PointSet
from dtl.triangulation import build_delaunay

SQUARE = np.array([(0, 0), (1, 0), (0, 1), (1, 1)], dtype=float)


def _write(tmp_path, text, name="d.csv"):
    f = tmp_path / name
    f.write_text(text)
    return f


def test_read_minimal(tmp_path):
    ps, y = read_dataset(_write(tmp_path, "x1,x2,y\n0,0,1\n"))
    assert ps.coords.tolist() == [[0.0, 0.0]]
    assert y.tolist() == [1.0]


def test_row_order_and_blank_lines(tmp_path):
    ps, y = read_dataset(_write(tmp_path, "x1,y\n3,1\n1,2\n\n2,3\n"))
    assert ps.coords[:, 0].tolist() == [3, 1, 2] and y.tolist() == [1, 2, 3]


@pytest.mark.parametrize("text, row, column", [
    ("x1,x2\n0,0\n", 1, None),
    ("x1,x2,y\n0,NaN,1\n", 2, 2),
    ("x1,x2,y\n0,0,1\n0,inf,1\n", 3, 2),
    ("x1,x2,y\n0,abc,1\n", 2, 2),
    ("x1,x2,y\n0,1\n", 2, None),
    ("x2,x1,y\n0,1,2\n", 1, 1),
    ("y\n1\n", 1, None),
])
def test_parse_errors(tmp_path, text, row, column):
    with pytest.raises(ParseError) as exc:
        read_dataset(_write(tmp_path, text))
    assert exc.value.row == row and exc.value.column == column
    assert not isinstance(exc.value, EmptyDataset)


@pytest.mark.parametrize("text", ["", "x1,y\n", "x1,y\n\n\n"])
def test_empty(tmp_path, text):
    with pytest.raises(EmptyDataset):
        read_dataset(_write(tmp_path, text))


def test_missing_file(tmp_path):
    with pytest.raises(IoError):
        read_dataset(tmp_path / "nope.csv")


def test_queries_ignore_y(tmp_path):
    Q = read_queries(_write(tmp_path, "x1,x2,y\n1,2,3\n"))
    assert Q.tolist() == [[1.0, 2.0]]
    assert read_queries(_write(tmp_path, "x1,x2\n1,2\n", "q.csv")).tolist() == [[1.0, 2.0]]


finite = st.floats(allow_nan=False, allow_infinity=False, width=64)


@settings(max_examples=50, deadline=None,
          suppress_health_check=[HealthCheck.function_scoped_fixture])
@given(st.integers(1, 4), st.lists(finite, min_size=1, max_size=60))
def test_dataset_round_trip(tmp_path, p, vals):
    k = len(vals) // (p + 1) or 1
    A = np.resize(np.array(vals), (k, p + 1))
    f = tmp_path / "rt.csv"
    write_dataset(f, A[:, :p], A[:, p])
    ps, y = read_dataset(f)
    assert np.array_equal(ps.coords, A[:, :p]) and np.array_equal(y, A[:, p])
    # negative zero survives too
    assert np.array_equal(np.signbit(ps.coords), np.signbit(A[:, :p]))


def _model(P, psi):
    psi = np.asarray(psi, dtype=float)
    return DtlModel(PointSet(P, psi), psi, build_delaunay(P), psi, LossKind.SQUARED, 0.0)


def test_square_surface_off(tmp_path):
    m = _model(SQUARE, [0, 1, 1, 2])
    f = tmp_path / "s.off"
    write_surface_mesh(m, f)
    lines = [l for l in f.read_text().splitlines() if not l.startswith("#")]
    assert lines[0] == "OFF" and lines[1] == "4 2 0"
    assert all(l.split()[0] == "3" for l in lines[6:8])
    back = read_mesh(f)
    assert np.array_equal(back.simplices, m.tri.simplices)
    assert np.array_equal(back.vertices, np.column_stack([SQUARE, m.psi]))


def test_one_dimensional_surface_off(tmp_path):
    P = np.array([[0.0], [1.0], [2.0]])
    m = _model(P, [0, 1, 0])
    write_surface_mesh(m, tmp_path / "l.off")
    back = read_mesh(tmp_path / "l.off")
    assert back.dim == 2 and back.vertices.tolist() == [[0, 0], [1, 1], [2, 0]]


def test_surface_off_rejects_p3(tmp_path):
    P = np.random.default_rng(0).random((10, 3))
    m = _model(P, np.zeros(10))
    with pytest.raises(UnsupportedDimension):
        write_surface_mesh(m, tmp_path / "s.off")
    write_surface_mesh(m, tmp_path / "s.json")
    back = read_mesh(tmp_path / "s.json")
    assert back.dim == 4 and np.array_equal(back.simplices, m.tri.simplices)


@pytest.mark.parametrize("p, fmt", [(2, "off"), (3, "off"), (1, "json"), (2, "json"),
                                    (3, "json"), (4, "json")])
def test_mesh_round_trip(tmp_path, p, fmt):
    P = np.random.default_rng(p).random((30, p))
    tri = build_delaunay(P)
    f = tmp_path / f"m.{fmt}"
    write_mesh(tri, f, fmt)
    assert read_mesh(f) == MeshData(p, tri.points, tri.simplices)
    if fmt == "off":
        counts = [l.split()[0] for l in f.read_text().splitlines()[3 + 30:]]
        assert set(counts) == {str(p + 1)}


def test_mesh_off_unsupported(tmp_path):
    tri = build_delaunay(np.random.default_rng(0).random((10, 4)))
    with pytest.raises(UnsupportedDimension):
        write_mesh(tri, tmp_path / "m.off")
    with pytest.raises(UnsupportedDimension):
        write_mesh(build_delaunay(np.array([[0.0], [1.0], [3.0]])), tmp_path / "m.off")


def test_off_index_out_of_range(tmp_path):
    f = _write(tmp_path, "OFF\n3 1 0\n0 0 0\n1 0 0\n0 1 0\n3 0 1 7\n", "bad.off")
    with pytest.raises(ParseError):
        read_mesh(f)


@pytest.mark.parametrize("p, lam", [(1, 0.0), (2, 0.5), (3, 0.1)])
def test_model_round_trip_predictions(tmp_path, p, lam):
    rng = np.random.default_rng(p)
    X = rng.random((60, p))
    y = np.sin(3 * X.sum(axis=1)) + 0.1 * rng.standard_normal(60)
    model, _ = fit(X, y, FitConfig(lam=lam, max_iters=50))
    save_model(model, tmp_path / "m.json")
    back = load_model(tmp_path / "m.json")
    Q = rng.uniform(-0.2, 1.2, (1000, p))
    assert np.array_equal(predict(model, Q), predict(back, Q))
    assert np.array_equal(back.psi, model.psi) and np.array_equal(back.responses, y)
    assert back.loss == model.loss and back.lam == model.lam
    assert np.array_equal(back.tri.simplices, model.tri.simplices)


def test_model_format_checks(tmp_path):
    m = _model(SQUARE, [0, 1, 1, 2])
    save_model(m, tmp_path / "m.json")
    obj = json.loads((tmp_path / "m.json").read_text())
    assert obj["format_version"] == 1 and obj["library_version"]
    for bad in ({**obj, "format_version": 99}, {k: v for k, v in obj.items() if k != "psi"},
                {**obj, "psi": [0, 1]}, [1, 2]):
        (tmp_path / "b.json").write_text(json.dumps(bad))
        with pytest.raises(ModelFormatError):
            load_model(tmp_path / "b.json")
    (tmp_path / "c.json").write_text("{not json")
    with pytest.raises(ParseError):
        load_model(tmp_path / "c.json")
