"""Exit criteria. Each test records one PASS/FAIL line, printed in the pytest summary."""

import math
import time

import numpy as np

from qsvm_ocr import features as ft
from qsvm_ocr import quantum as q
from qsvm_ocr.pipeline import QsvmConfig, build_chi, hhl_solve, kernel_via_discard, label_state, qsvm_classify
from qsvm_ocr.svm import TrainingSet, decision_value, kernel_matrix, sign_label, solve_no_offset, train_no_offset

from conftest import record_criterion

X1 = np.array([0.9872, 0.1595])
X2 = np.array([0.3544, 0.9351])
REF_TS = TrainingSet([X1, X2], [1, -1])
MEASURED_KERNEL = np.array([[0.5065, 0.2425], [0.2425, 0.4935]])
ROUNDED_KERNEL = np.array([[1.0, 0.4990], [0.4990, 1.0]])


def check(name, ok, detail=""):
    record_criterion(name, bool(ok), detail)
    assert ok, f"{name}: {detail}"


def fidelity_with_exact(F, y, cfg):
    out = hhl_solve(F, y, cfg)
    exact = np.linalg.solve(F, y.amplitudes.real)
    return out.solution.fidelity(q.amplitude_encode(exact))


def test_kernel_reproduction():
    start = time.perf_counter()
    rho = kernel_via_discard(build_chi(REF_TS), REF_TS).entries.real
    elapsed = time.perf_counter() - start
    # independent oracle: classical dot products
    k = np.array([[a @ b for b in (X1, X2)] for a in (X1, X2)])
    ideal_err = np.max(np.abs(rho - k / np.trace(k)))
    anchor_err = np.max(np.abs(rho - [[0.5000, 0.2495], [0.2495, 0.5000]]))
    measured_err = np.max(np.abs(rho - MEASURED_KERNEL))
    check(
        "kernel reproduction",
        anchor_err <= 1e-3 and ideal_err <= 1e-10 and measured_err <= 0.02 and elapsed < 1,
        f"|rho-anchor|={anchor_err:.2e} |rho-measured|={measured_err:.4f} t={elapsed * 1e3:.1f}ms",
    )


def test_training_reproduction():
    start = time.perf_counter()
    alpha = solve_no_offset(ROUNDED_KERNEL, [1, -1], 2)
    elapsed = time.perf_counter() - start
    # closed-form 2x2 inverse of F = K + I/2
    (a, b), (c, d) = ROUNDED_KERNEL + np.eye(2) / 2
    det = a * d - b * c
    oracle = np.array([d + b, -c - a]) / det  # [[d,-b],[-c,a]] @ (1,-1)
    ok = (
        abs(alpha[0] + alpha[1]) <= 1e-8
        and abs(alpha[0] - oracle[0]) <= 1e-12
        and abs(alpha[0] - 0.9990) <= 1e-3
        and elapsed < 1
    )
    check("training reproduction", ok, f"alpha={alpha} |a1+a2|={abs(alpha.sum()):.1e} t={elapsed * 1e3:.1f}ms")


def test_classification_reproduction():
    model = train_no_offset(REF_TS, 2)
    labels = {
        "x1": (qsvm_classify(REF_TS, X1).character, LABEL(model, X1)),
        "x2": (qsvm_classify(REF_TS, X2).character, LABEL(model, X2)),
    }
    ok = labels["x1"] == ("6", "6") and labels["x2"] == ("9", "9")

    agree = []
    for name in ft.HANDWRITTEN_GLYPHS:
        x0 = ft.featurize(ft.read_image(ft.asset_dir() / name), ft.PRESETS[ft.DEFAULT_PRESET]).as_array()
        quantum = qsvm_classify(REF_TS, x0).character
        classical = LABEL(model, x0)
        agree.append(quantum == classical != "ambiguous")
    ok = ok and len(agree) == 8 and all(agree)
    check("classification reproduction", ok, f"{labels}, handwritten agreement {sum(agree)}/8")


def LABEL(model, x0):
    return {1: "6", -1: "9", 0: "ambiguous"}[sign_label(decision_value(model, x0))]


def test_hhl_fidelity():
    cfg = QsvmConfig(phase_qubits=2, t0=math.pi / 2)
    start = time.perf_counter()
    f_ref = fidelity_with_exact(ROUNDED_KERNEL + np.eye(2) / 2, label_state([1, -1]), cfg)
    t_ref = time.perf_counter() - start
    start = time.perf_counter()
    f_diag = fidelity_with_exact(np.diag([1.0, 2.0]), q.amplitude_encode([1, 1]), cfg)
    t_diag = time.perf_counter() - start
    check(
        "HHL fidelity",
        f_ref >= 0.999 and f_diag >= 1 - 1e-9 and t_ref < 1 and t_diag < 1,
        f"rounded F {f_ref:.12f} ({t_ref * 1e3:.1f}ms), diag(1,2) 1-{1 - f_diag:.1e} ({t_diag * 1e3:.1f}ms)",
    )


def test_oracle_equivalence_sweep():
    rng = np.random.default_rng(2015)
    start = time.perf_counter()
    checked = mismatches = 0
    below_margin = []
    for _ in range(1000):
        a, b, c = rng.uniform(-math.pi, math.pi, size=3)
        ts = TrainingSet([[math.cos(a), math.sin(a)], [math.cos(b), math.sin(b)]], [1, -1])
        x0 = np.array([math.cos(c), math.sin(c)])
        d = decision_value(train_no_offset(ts, 2), x0)
        label = qsvm_classify(ts, x0).label
        if abs(d) > 0.05:
            checked += 1
            mismatches += label != sign_label(d)
        elif label != sign_label(d):
            below_margin.append(d)
    elapsed = time.perf_counter() - start
    check(
        "oracle equivalence sweep",
        mismatches == 0 and elapsed < 60,
        f"{checked} above margin, {mismatches} mismatches, {len(below_margin)} below-margin disagreements, "
        f"t={elapsed:.1f}s",
    )


def test_property_suites():
    rng = np.random.default_rng(7)
    failures = []

    psi = q.amplitude_encode(rng.normal(size=16) + 1j * rng.normal(size=16))
    for _ in range(200):
        g = [q.H, q.S, q.ry(rng.uniform(-3, 3)), q.SWAP, q.controlled(q.X)][rng.integers(5)]
        psi = q.apply_gate(psi, g, rng.choice(4, size=g.arity, replace=False))
        if abs(np.linalg.norm(psi.amplitudes) - 1) > 1e-10:
            failures.append("norm")
            break

    for _ in range(1000):
        n = int(rng.integers(1, 5))
        keep = rng.choice(n, size=int(rng.integers(1, n + 1)), replace=False)
        rho = q.partial_trace(q.amplitude_encode(rng.normal(size=2**n) + 1j * rng.normal(size=2**n)), keep).entries
        if (
            np.max(np.abs(rho - rho.conj().T)) > 1e-10
            or abs(np.trace(rho) - 1) > 1e-10
            or np.linalg.eigvalsh(rho).min() < -1e-9
        ):
            failures.append("partial trace")
            break

    for _ in range(1000):
        ts = TrainingSet(rng.normal(size=(2, 2)), [1, -1])
        k = kernel_matrix(ts)
        if np.max(np.abs(kernel_via_discard(build_chi(ts), ts).entries - k / np.trace(k))) > 1e-10:
            failures.append("kernel equivalence")
            break

    model = train_no_offset(REF_TS, 2)
    for _ in range(200):
        x0 = rng.normal(size=2)
        c = rng.uniform(0.01, 100)
        if np.sign(decision_value(model, c * x0)) != np.sign(decision_value(model, x0)):
            failures.append("sign scaling")
            break
    for x0 in (X1, X2, rng.normal(size=2)):
        if len({qsvm_classify(REF_TS, c * x0).label for c in (0.1, 1, 10)}) != 1:
            failures.append("quantum label scaling")

    for _ in range(300):
        bits = rng.random(size=(int(rng.integers(2, 9)), int(rng.integers(2, 9)))) < 0.5
        try:
            r = ft.ratios(ft.InkMask(bits))
        except ft.BlankHalfError:
            continue
        lr = ft.ratios(ft.InkMask(bits[:, ::-1]))
        tb = ft.ratios(ft.InkMask(bits[::-1]))
        if lr.h != r.h or tb.v != r.v or abs(lr.v * r.v - 1) > 1e-15 or abs(tb.h * r.h - 1) > 1e-15:
            failures.append("mirror symmetry")
            break

    check("property suites", not failures, ", ".join(failures) or "all green")


def test_feature_anchor():
    errs = []
    for name, target in zip(ft.STANDARD_GLYPHS, (X1, X2)):
        fv = ft.featurize(ft.read_image(ft.asset_dir() / name), ft.PRESETS[ft.DEFAULT_PRESET])
        errs.append(np.max(np.abs(fv.as_array() - target)))
    check("feature anchor", max(errs) <= 1e-4, f"max error {max(errs):.1e}")
