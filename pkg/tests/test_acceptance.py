"""Acceptance criteria AC1-AC10.

Run alone with ``pytest tests/test_acceptance.py -v``; a PASS/FAIL line per
criterion is printed in the terminal summary.
"""

import json
import time

import numpy as np
import pytest

from manistab import io as mio
from manistab.cli import main
from manistab.datasets import make_shape_dataset
from manistab.filters import FilterCoefficients, apply_filter, design_filter
from manistab.geometry import SignalVector, evaluate_signal, sample_manifold
from manistab.graph import build_graph, laplacian
from manistab.mnn import MnnConfig, Sample, TrainConfig, error_rate, init_model, loss_and_gradients, penalty_grid, train
from manistab.spectral import eigendecompose, partition_spectrum
from manistab.stability import (
    BoundInputs,
    GraphInput,
    bound_filter_absolute,
    bound_filter_relative,
    bound_mnn,
    fdt_network,
    run_convergence_experiment,
    run_filter_stability_experiment,
    run_mnn_stability_experiment,
)
from manistab.verify import filter_suite, lemma_suite

from conftest import PRESETS
from oracles import MpNetwork, corollary_absolute, expm_taylor, max_relative_gap, theorem_relative

ALPHA = 0.02
GAMMA = 0.1
TARGETS = [1.0, 0.6, 0.2]


def _report(label, **values):
    print(f"{label}: " + ", ".join(f"{k}={v}" for k, v in values.items()))


def test_ac1_bound_evaluators():
    a = bound_filter_absolute(BoundInputs(0.01, alpha=0.5, A_h=1.0, N=3), "corollary")
    r = bound_filter_relative(BoundInputs(0.01, gamma=0.5, B_h=1.0, M=3, kind="relative"))
    m = bound_mnn(BoundInputs(0.01, L_layers=2, F_width=4, C_per=5.0))
    _report("AC1", absolute=a, relative=r, mnn=m)
    assert abs(a - corollary_absolute(3, 0.5, 0.01, 1.0)) < 1e-12
    assert abs(r - theorem_relative(3, 0.5, 0.01, 1.0)) < 1e-12
    assert abs(a - 0.20234) <= 1e-4
    assert abs(r - 0.20045) <= 1e-4
    assert m == 0.4


def test_ac2_lemma_suite():
    res = lemma_suite(trials=100, n=50, seed=2024)
    _report("AC2", **res["by_lemma"])
    assert res["violations"] == 0


def test_ac3_filter_path_equivalence():
    res = filter_suite(cases=20, n=60, seed=3)
    assert res["violations"] == 0
    # second, independent oracle: Taylor-series matrix exponential
    rng = np.random.default_rng(33)
    worst = 0.0
    for _ in range(20):
        L = laplacian(build_graph(sample_manifold("sphere2", 60, int(rng.integers(2**32)))))
        dec = eigendecompose(L)
        h = FilterCoefficients(rng.standard_normal(int(rng.integers(2, 7))))
        x = rng.standard_normal(60)
        E = expm_taylor(-L.matrix)
        ref = np.zeros(60)
        power = x.copy()
        for hk in h.taps:
            ref += hk * power
            power = E @ power
        z = apply_filter(h, dec, x).values[:, 0]
        worst = max(worst, np.linalg.norm(z - ref) / np.linalg.norm(ref))
    _report("AC3", scipy_path=res["worst_path_rel_error"], taylor_path=worst)
    assert worst < 1e-8


def _preset(kind):
    cloud = sample_manifold("sphere2", 60, 3)
    op = laplacian(build_graph(cloud))
    dec = eigendecompose(op)
    if kind == "absolute":
        part = partition_spectrum(dec, "alpha_difference", ALPHA)
        rng_ = (0.0, 1.1 * (dec.eigenvalues[-1] + ALPHA))
    else:
        part = partition_spectrum(dec, "gamma_ratio", GAMMA, exclude_zero=True)
        rng_ = (0.0, 1.1 * dec.eigenvalues[-1] * (1 + GAMMA))
    res = design_filter(dec, part, TARGETS, 5, lambda_range=rng_)
    return cloud, op, dec, res.filter


def test_ac4_filter_theorems():
    _, op, dec, h = _preset("absolute")
    eps = [ALPHA / 100, ALPHA / 20, ALPHA / 10]
    rep_a = run_filter_stability_experiment(op, h, "absolute", eps, 100, 0, ALPHA, dec=dec)
    _, op, dec, h = _preset("relative")
    eps = [GAMMA / 100, GAMMA / 20, GAMMA / 10]
    rep_r = run_filter_stability_experiment(op, h, "relative", eps, 100, 0, GAMMA, dec=dec)
    _report(
        "AC4",
        absolute_violations=rep_a.violation_count,
        absolute_max_ratio=rep_a.max_ratio,
        relative_violations=rep_r.violation_count,
        relative_max_ratio=rep_r.max_ratio,
    )
    for rep in (rep_a, rep_r):
        assert len(rep.trials) == 300 and rep.skipped_count == 0
        assert rep.violation_count == 0


def test_ac5_mnn_theorem():
    cloud, op, dec, _ = _preset("absolute")
    model = fdt_network(dec, (1, 4, 1), 3, ALPHA, 0)
    X = evaluate_signal(cloud, "first_harmonic").values
    eps = [ALPHA / 100, ALPHA / 20, ALPHA / 10]
    rep = run_mnn_stability_experiment(model, [GraphInput(cloud, op, dec, X)], "absolute", eps, 50, 0, ALPHA)
    _report("AC5", trials=len(rep.trials), violations=rep.violation_count, max_ratio=rep.max_ratio)
    assert rep.skipped_count == 0 and len(rep.trials) == 150
    assert rep.violation_count == 0


def test_ac6_gradient_check():
    gaps = []
    for seed in range(3):
        cloud = sample_manifold("sphere2", 12, 100 + seed)
        dec = eigendecompose(laplacian(build_graph(cloud)))
        X = evaluate_signal(cloud, "coordinates").values
        model = init_model(MnnConfig((3, 4, 1), 3), seed)
        batch = [Sample(dec, X, 1), Sample(dec, X[::-1].copy(), 0)]
        analytic = loss_and_gradients(model, batch).gradients
        net = MpNetwork([(dec.eigenvalues, dec.eigenvectors, s.X, s.label) for s in batch], model.config.nonlinearity)
        ref = net.central_difference(model.taps, model.readout_weights, model.readout_bias, step=1e-5)
        gaps.append(max_relative_gap(analytic, ref))
    _report("AC6", worst_relative_error=gaps)
    assert max(gaps) < 1e-4


def test_ac7_sphere_spectrum():
    dec = eigendecompose(laplacian(build_graph(sample_manifold("sphere2", 1000, 0))))
    part = partition_spectrum(dec, "alpha_difference", ALPHA)
    lam = dec.eigenvalues
    a, b = part.groups[1]
    # the 1/n kernel sum integrates against the uniform probability measure,
    # so graph eigenvalues approximate Laplace-Beltrami ones divided by the volume
    mean = float(np.mean(lam[a:b])) * 4 * np.pi
    _report("AC7", multiplicity=b - a, scaled_mean=mean)
    assert part.groups[0] == (0, 1)
    assert b - a == 3
    assert abs(mean - 2.0) <= 0.25 * 2.0


def _deviation_curve(model, test_items, eps, seed):
    inputs = [GraphInput(it.cloud, it.op, it.dec, it.cloud.points, it.label) for it in test_items]
    rep = run_mnn_stability_experiment(model, inputs, "deformation", eps, 1, seed)
    return rep.by_epsilon("empirical")


@pytest.mark.slow
def test_ac8_regularization_trend():
    eps = [0.2, 0.4, 0.6, 0.8]
    rows = []
    t0 = time.perf_counter()
    for seed in range(5):
        train_items = make_shape_dataset(200, 300, 1000 + seed)
        test_items = make_shape_dataset(60, 300, 2000 + seed)
        data = [it.sample for it in train_items]
        grid = penalty_grid([s.dec for s in data])
        cfg = MnnConfig((3, 64, 32), 5)
        curves = {}
        for name, weight in (("plain", 0.0), ("regularized", 1.0)):
            tc = TrainConfig(regularizer_weight=weight, lipschitz_target=0.5, integral_lipschitz_target=0.5, seed=seed)
            model = train(init_model(cfg, seed), data, tc, grid=grid).model
            curves[name] = _deviation_curve(model, test_items, eps, seed)
            curves[name + "_test_error"] = error_rate(model, [it.sample for it in test_items])
        rows.append(curves)
        _report(
            f"AC8 seed {seed}",
            plain=[round(curves["plain"][e], 4) for e in eps],
            regularized=[round(curves["regularized"][e], 4) for e in eps],
            test_error=(curves["plain_test_error"], curves["regularized_test_error"]),
        )
    _report("AC8", seconds=round(time.perf_counter() - t0, 1))
    for curves in rows:
        for name in ("plain", "regularized"):
            dev = [curves[name][e] for e in eps]
            assert all(b >= a for a, b in zip(dev, dev[1:])), (name, dev)
        assert all(curves["regularized"][e] <= curves["plain"][e] for e in eps)


def test_ac9_convergence():
    decreasing = 0
    for seed in range(5):
        rows = run_convergence_experiment("sphere2", [250, 500, 1000, 2000], FilterCoefficients([0.0, 1.0]), "first_harmonic", seed)
        d = [r.discrepancy for r in rows]
        ok = all(b < a for a, b in zip(d, d[1:]))
        decreasing += ok
        _report(f"AC9 seed {seed}", discrepancies=[round(v, 5) for v in d], decreasing=ok)
    assert decreasing >= 4


def test_ac10_manifest_replay(tmp_path, monkeypatch):
    monkeypatch.chdir(tmp_path)
    absolute = str(PRESETS / "sphere60_absolute.conf")
    commands = [
        ["sample", "--manifold", "sphere2", "--n", "60", "--seed", "3", "--out", "c.csv"],
        ["deform", "--cloud", "c.csv", "--kind", "gaussian_coordinate", "--eps", "0.1", "--seed", "4", "--out", "d.csv"],
        ["graph", "--cloud", "c.csv", "--out", "L.bin"],
        ["spectrum", "--operator", "L.bin", "--threshold", "0.02", "--out", "s.json"],
        ["filter", "design", "--operator", "L.bin", "--threshold", "0.02", "--targets", "1,0.6,0.2", "--out", "h.json"],
        ["filter", "apply", "--filter", "h.json", "--operator", "L.bin", "--signal", "x.csv", "--out", "z.csv"],
        ["filter", "analyze", "--filter", "h.json", "--operator", "L.bin", "--out", "a.json"],
        ["train", "--train-count", "6", "--test-count", "2", "--n", "60", "--widths", "3,4,1", "--K", "3", "--epochs", "2", "--out", "m.json"],
        ["stability", "--config", absolute, "--kind", "absolute", "--eps", "0.001,0.005", "--trials", "10", "--threads", "3", "--out", "st.json"],
        ["stability", "--model", "m.json", "--kind", "deformation", "--cloud", "c.csv", "--signal-spec", "coordinates", "--eps", "0.2", "--trials", "2", "--out", "sd.json"],
        ["converge", "--n-list", "60,90,120", "--out", "cv.csv"],
        ["verify", "--suite", "all", "--trials", "10", "--n", "20", "--out", "v.json"],
    ]
    mio.write_signal(tmp_path / "x.csv", SignalVector(np.random.default_rng(9).standard_normal((60, 2))))
    for argv in commands:
        assert main(argv) == 0, argv
    manifests = sorted(tmp_path.glob("*.manifest.json"))
    assert len(manifests) == len(commands)
    recorded = {}
    for m in manifests:
        for o in json.loads(m.read_text())["outputs"]:
            recorded[o["path"]] = (tmp_path / o["path"]).read_bytes()
    results = {m.name: main(["replay", str(m)]) for m in manifests}
    identical = all((tmp_path / p).read_bytes() == b for p, b in recorded.items())
    _report("AC10", manifests=len(manifests), replay_codes=sorted(set(results.values())), byte_identical=identical)
    assert all(c == 0 for c in results.values())
    assert identical
    assert mio.sha256_file(tmp_path / "c.csv") == json.loads((tmp_path / "c.csv.manifest.json").read_text())["outputs"][0]["sha256"]
