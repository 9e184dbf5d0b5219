"""Acceptance gate: one test per criterion, at full scale and stated tolerance.

Each test prints a single ``PASS``/``FAIL`` line with its measured numbers;
the same lines are repeated in the terminal summary.
"""
import json
import time

import numpy as np
import pytest

from dtl.cli import EXPERIMENTS, run
from dtl.io import (
    load_model, read_dataset, read_mesh, save_model, write_dataset, write_mesh,
    write_surface_mesh,
)
from dtl.optimizer import FitConfig, fit, objective, predict
from dtl.regularizer import regularization_gradient, regularization_value, value_and_gradient
from dtl.triangulation import build_delaunay, simplex_volumes

from conftest import dense_empty_sphere_violations, hull_volume_oracle


@pytest.fixture
def report(request, capsys):
    lines = []

    def emit(ok, detail):
        line = f"{'PASS' if ok else 'FAIL'}  {request.node.name}  {detail}"
        lines.append(line)
        request.node.user_properties.append(("detail", detail))
        with capsys.disabled():
            print("\n" + line)
        return ok

    yield emit


def cli_experiment(tmp_path, name, *args):
    out = tmp_path / f"{name}.json"
    assert run(["experiment", "--name", name, "--out", str(out), *args]) == 0
    return json.loads(out.read_text())


def test_c01_delaunay_correctness(report):
    t0 = time.perf_counter()
    combos = [(p, n) for p in (1, 2, 3) for n in (10, 100, 500)]
    worst_vol, violations = 0.0, 0
    for k in range(50):
        p, n = combos[k % len(combos)]
        P = np.random.default_rng(1000 + k).random((n, p))
        tri = build_delaunay(P)
        violations += len(dense_empty_sphere_violations(tri))
        vol, hull = simplex_volumes(tri).sum(), hull_volume_oracle(P)
        worst_vol = max(worst_vol, abs(vol - hull) / hull)
    dt = time.perf_counter() - t0
    ok = violations == 0 and worst_vol <= 1e-9 and dt < 60
    assert report(ok, f"violations={violations} max_rel_volume_err={worst_vol:.2e} time={dt:.1f}s")


def test_c02_geometric_optimality(tmp_path, report):
    t0 = time.perf_counter()
    r = cli_experiment(tmp_path, "optimality", "--p", "2", "--n", "200", "--queries", "500",
                       "--alternatives", "20", "--seed", "1")
    dt = time.perf_counter() - t0
    ok = (r["pointwise_violations"] == 0 and r["comparisons"] == 10000
          and r["mean_loss_delaunay"] <= r["mean_loss_alternative"] and dt < 60)
    assert report(ok, f"violations={r['pointwise_violations']}/{r['comparisons']} "
                      f"max_excess={r['max_excess']:.2e} time={dt:.1f}s")


def test_c03_edge_length_scaling(tmp_path, report):
    t0 = time.perf_counter()
    r2 = cli_experiment(tmp_path, "scaling", "--p", "2", "--sizes", "100,400,1600,6400",
                        "--queries", "200", "--seed", "0")
    r1 = cli_experiment(tmp_path, "scaling", "--p", "1", "--sizes", "100,400,1600,6400",
                        "--queries", "200", "--seed", "0")
    dt = time.perf_counter() - t0
    s2, s1 = r2["fitted_slope"], r1["fitted_slope"]
    ok = abs(s2 + 0.5) <= 0.15 and abs(s1 + 1.0) <= 0.15 and dt < 120
    assert report(ok, f"slope_p2={s2:.3f} slope_p1={s1:.3f} time={dt:.1f}s")


def test_c04_regularizer(report):
    t0 = time.perf_counter()
    rng = np.random.default_rng(4)
    worst_affine = 0.0
    for k in range(20):
        p = 1 + k % 3
        P = rng.random((30 + 5 * k, p))
        psi = rng.standard_normal() + P @ rng.standard_normal(p)
        worst_affine = max(worst_affine, abs(regularization_value(build_delaunay(P), psi).total))
    worst_fd = 0.0
    for k in range(20):
        p = 1 + k % 2
        P = rng.random((25, p))
        psi = rng.standard_normal(25)
        tri = build_delaunay(P)
        g = regularization_gradient(tri, psi)
        fd = np.empty(25)
        for i in range(25):
            e = np.zeros(25)
            e[i] = 1e-6
            fd[i] = (regularization_value(tri, psi + e).total
                     - regularization_value(tri, psi - e).total) / 2e-6
        worst_fd = max(worst_fd, np.linalg.norm(g - fd) / np.linalg.norm(fd))
    hand = regularization_value(build_delaunay(np.array([[0.0], [1.0], [2.0]])),
                                np.array([0.0, 1.0, 0.0])).total
    dt = time.perf_counter() - t0
    ok = worst_affine < 1e-10 and worst_fd < 1e-5 and abs(hand - 1) < 1e-10 and dt < 30
    assert report(ok, f"affine_max_R={worst_affine:.1e} fd_max_rel_err={worst_fd:.1e} "
                      f"hand_R={hand!r} time={dt:.1f}s")


def test_c05_optimizer_fixed_points(report):
    t0 = time.perf_counter()
    rng = np.random.default_rng(5)
    X = rng.random((50, 2))
    y = rng.standard_normal(50)
    exact0 = np.array_equal(fit(X, y, FitConfig(lam=0.0))[0].psi, y)
    affine_ok = True
    for lam in (0.1, 1.0, 10.0, 1000.0):
        for p in (1, 2):
            Xa = rng.random((50, p))
            ya = 0.5 + Xa @ rng.standard_normal(p)
            affine_ok &= np.array_equal(fit(Xa, ya, FitConfig(lam=lam, max_iters=1000))[0].psi, ya)
    worst = -np.inf
    for k in range(10):
        lam = (0.1, 1.0, 10.0)[k % 3]
        Xn = rng.random((50, 2))
        yn = Xn[:, 0] * Xn[:, 1] + 0.1 * rng.standard_normal(50)
        model, state = fit(Xn, yn, FitConfig(lam=lam, max_iters=1000))
        final = objective(model.tri, yn, model.psi, lam, "squared")[0]
        worst = max(worst, final - state.objective_trace[0])
    dt = time.perf_counter() - t0
    ok = exact0 and affine_ok and worst <= 1e-9 and dt < 60
    assert report(ok, f"lambda0_exact={exact0} affine_exact={affine_ok} "
                      f"max(final-initial)={worst:.3e} time={dt:.1f}s")


def test_c06_regression_consistency(tmp_path, report):
    t0 = time.perf_counter()
    r = cli_experiment(tmp_path, "consistency", "--generator", "saddle", "--sizes", "50,200,800",
                       "--lambda", "0", "--noise", "0", "--seed", "0")
    dt = time.perf_counter() - t0
    e = r["errors"]
    ok = all(a > b for a, b in zip(e, e[1:])) and e[-1] < 1e-3 and dt < 60
    assert report(ok, f"mse={[f'{v:.2e}' for v in e]} time={dt:.1f}s")


def test_c07_classification_risk_bound(tmp_path, report):
    t0 = time.perf_counter()
    r = cli_experiment(tmp_path, "risk", "--generator", "flip-circles", "--flip", "0.1",
                       "--n", "1000", "--test-size", "2000", "--seed", "0")
    dt = time.perf_counter() - t0
    ok = (r["bayes_risk"] == 0.1 and abs(r["bound"] - 0.18) < 1e-15
          and r["empirical_dtl_risk"] <= 0.18 + 0.05 and dt < 60)
    assert report(ok, f"R_B={r['bayes_risk']} bound={r['bound']:.4f} "
                      f"risk={r['empirical_dtl_risk']:.4f} time={dt:.1f}s")


def test_c08_local_adaptivity(tmp_path, report):
    t0 = time.perf_counter()
    r = cli_experiment(tmp_path, "adaptivity", "--generator", "saddle",
                       "--sizes", "100,400,1600", "--seed", "0")
    dt = time.perf_counter() - t0
    e = r["errors"]
    ok = all(a > b for a, b in zip(e, e[1:])) and e[-1] < 0.5 * e[0] and dt < 60
    assert report(ok, f"gradient_error={[f'{v:.4f}' for v in e]} time={dt:.1f}s")


def test_c09_serialization(tmp_path, report):
    t0 = time.perf_counter()
    rng = np.random.default_rng(9)
    X = rng.random((200, 2))
    y = np.sin(4 * X[:, 0]) * X[:, 1] + 0.05 * rng.standard_normal(200)
    model, _ = fit(X, y, FitConfig(lam=0.3, max_iters=200))
    save_model(model, tmp_path / "m.json")
    Q = rng.uniform(-0.25, 1.25, (1000, 2))
    same_pred = np.array_equal(predict(model, Q), predict(load_model(tmp_path / "m.json"), Q))
    write_dataset(tmp_path / "d.csv", X, y)
    ps, y2 = read_dataset(tmp_path / "d.csv")
    same_data = np.array_equal(ps.coords, X) and np.array_equal(y2, y)
    mesh_ok = True
    for fmt in ("json", "off"):
        write_mesh(model.tri, tmp_path / f"t.{fmt}", fmt)
        back = read_mesh(tmp_path / f"t.{fmt}")
        mesh_ok &= np.array_equal(back.vertices, X) and np.array_equal(back.simplices,
                                                                       model.tri.simplices)
        write_surface_mesh(model, tmp_path / f"s.{fmt}", fmt)
        back = read_mesh(tmp_path / f"s.{fmt}")
        mesh_ok &= np.array_equal(back.vertices, np.column_stack([X, model.psi]))
    dt = time.perf_counter() - t0
    ok = same_pred and same_data and mesh_ok and dt < 10
    assert report(ok, f"predictions_exact={same_pred} dataset_identity={same_data} "
                      f"mesh_identity={mesh_ok} time={dt:.1f}s")


def test_c10_determinism(tmp_path, report):
    t0 = time.perf_counter()
    outs = []
    for rep in ("a", "b"):
        d = tmp_path / rep
        d.mkdir()
        for name in EXPERIMENTS:
            assert run(["experiment", "--name", name, "--seed", "3",
                        "--out", str(d / f"{name}.json")]) == 0
        outs.append({f.name: f.read_bytes() for f in sorted(d.iterdir())})
    dt = time.perf_counter() - t0
    same = outs[0] == outs[1]
    ok = same and len(outs[0]) == 4 * len(EXPERIMENTS)
    assert report(ok, f"files={len(outs[0])} byte_identical={same} time={dt:.1f}s")
