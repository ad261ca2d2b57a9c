"""
Acceptance suite: one test per release criterion, each printing a
PASS/FAIL line with its key measurements.  Tolerances are fixed here,
not tuned at run time.  The full suite takes a few minutes; the heavy
Monte Carlo criteria are at the end.
"""
import math
import time
from fractions import Fraction

import numpy as np
import pytest

from cycmono import lab, ncms, predict, rmt, spectra
from cycmono import symgroup as sg
from cycmono import weingarten as wg
from cycmono.ncms import MomentFunctional, a, b
from cycmono.predict import BStats, CompactModel


def _report(name: str, ok: bool, detail: str = "") -> None:
    print(f"ACCEPTANCE {name}: {'PASS' if ok else 'FAIL'}  {detail}")
    assert ok, detail


def _hermitian(rng, n):
    z = rng.standard_normal((n, n)) + 1j * rng.standard_normal((n, n))
    return (z + z.conj().T) / 2.0


def test_c01_exact_combinatorics():
    started = time.perf_counter()
    ok = all(
        sg.lem1_lhs(n, m) == math.comb(n // 2, m)
        for n in range(0, 41)
        for m in range(0, n // 2 + 1)
    )
    lem1_time = time.perf_counter() - started

    started = time.perf_counter()
    counts_ok = True
    for n in range(1, 13):
        parts = sg.enumerate_nc121(n)
        for m in range(0, n // 2 + 1):
            group = [p for p in parts if p.pair_count == m]
            if len(group) != math.comb(n, 2 * m):
                counts_ok = False
            for ell in range(0, n - 2 * m + 1):
                got = sum(1 for p in group if p.inner_singleton_count == ell)
                if got != sg.nc121_pair_singleton_count(n, m, ell):
                    counts_ok = False
    nc_time = time.perf_counter() - started
    _report(
        "01 exact combinatorics",
        ok and counts_ok,
        f"binomial identity n<=40 in {lem1_time:.2f}s, partition counts n<=12 in {nc_time:.2f}s",
    )


def test_c02_weingarten_exactness():
    started = time.perf_counter()
    ok = True
    for k in range(1, 5):
        perms = sg.enumerate_permutations(k)
        for n in range(k, 11):
            table = wg.weingarten_table(k, n)
            for sigma in perms:
                total = Fraction(0)
                sigma_inv = sg.inverse(sigma)
                for tau in perms:
                    gram = n ** len(sg.cycles(sg.compose(sigma_inv, tau)))
                    total += gram * table[sg.cycle_type(tau)]
                if total != (1 if sigma == sg.identity(k) else 0):
                    ok = False
    closed = all(
        wg.weingarten_exact(sg.identity(2), n) == Fraction(1, n * n - 1)
        and wg.weingarten_exact((1, 0), n) == Fraction(-1, n * (n * n - 1))
        for n in range(2, 11)
    )
    _report(
        "02 Weingarten exactness",
        ok and closed,
        f"biorthogonality k<=4, n in [k,10] exact in {time.perf_counter() - started:.2f}s",
    )


def test_c03_weingarten_asymptotics():
    started = time.perf_counter()
    ok = True
    worst = 0.0
    for k in range(1, 4):
        for rep in sg.conjugacy_class_representatives(k):
            errs = []
            for n in (8, 16, 32):
                scaled = wg.weingarten_exact(rep, n) * Fraction(n) ** (k + sg.length(rep))
                errs.append(abs(float(scaled - sg.moebius(rep))))
            for e_small, e_big in zip(errs, errs[1:]):
                if e_small == 0.0 and e_big == 0.0:
                    continue
                if e_big == 0.0:
                    continue
                ratio = e_small / e_big
                worst = max(worst, 0.0 if ratio == 0 else 1.0 / ratio)
                if ratio < 3.0:
                    ok = False
    _report(
        "03 Weingarten asymptotics",
        ok,
        f"error shrinks by >=3 per doubling (worst inverse ratio {worst:.3f}) "
        f"in {time.perf_counter() - started:.2f}s",
    )


def test_c04_oracle_triangle():
    started = time.perf_counter()
    rng = np.random.default_rng(7)
    n = 4
    a_mat = rng.standard_normal((n, n)) + 1j * rng.standard_normal((n, n))
    b_mat = rng.standard_normal((n, n)) + 1j * rng.standard_normal((n, n))
    oracle = wg.expected_trace_product(
        wg.TraceWordSpec((1, 0), (a_mat, a_mat), (b_mat, b_mat))
    )
    trials = 100_000
    g = rmt.RngStream(2024).child(4).generator()
    values = np.empty(trials, dtype=complex)
    for t in range(trials):
        u = rmt.sample_haar_unitary(n, g)
        m = a_mat @ u @ b_mat @ u.conj().T
        values[t] = np.trace(m @ m)
    mean = values.mean()
    se = math.sqrt(values.real.var(ddof=1) + values.imag.var(ddof=1)) / math.sqrt(trials)
    dev = abs(mean - oracle) / se
    _report(
        "04 oracle triangle",
        dev <= 4.0,
        f"Monte Carlo vs exact expectation: {dev:.2f} standard errors "
        f"({trials} Haar samples, {time.perf_counter() - started:.1f}s)",
    )


def test_c05_cyclic_monotone_closed_forms():
    started = time.perf_counter()
    rng = np.random.default_rng(8)
    a_mat = _hermitian(rng, 4)
    b_mat = _hermitian(rng, 3)
    omega = MomentFunctional.from_matrices("a", [a_mat])
    tau = MomentFunctional.from_matrices("b", [b_mat])
    tau_b = float(np.trace(b_mat).real) / 3.0
    tau_b2 = float(np.trace(b_mat @ b_mat).real) / 3.0
    p = math.sqrt(tau_b2) + tau_b
    q = -(math.sqrt(tau_b2) - tau_b)
    r = math.sqrt(tau_b2 - tau_b ** 2)

    anti = predict.moment_oracle(
        [(1.0, (a(), b())), (1.0, (b(), a()))], omega, tau, 12, memo={}
    )
    comm = predict.moment_oracle(
        [(1.0j, (a(), b())), (-1.0j, (b(), a()))], omega, tau, 12, memo={}
    )
    ok = True
    worst = 0.0
    for ell in range(1, 13):
        power_trace = float(np.trace(np.linalg.matrix_power(a_mat, ell)).real)
        want_anti = power_trace * (p ** ell + q ** ell)
        rel = abs(anti[ell - 1].real - want_anti) / abs(want_anti)
        worst = max(worst, rel)
        ok &= rel <= 1e-10 and abs(anti[ell - 1].imag) <= 1e-10 * max(1.0, abs(want_anti))
        if ell % 2 == 0:
            want_comm = 2.0 * r ** ell * power_trace
            rel = abs(comm[ell - 1].real - want_comm) / abs(want_comm)
            worst = max(worst, rel)
            ok &= rel <= 1e-10
        else:
            scale_ref = max(1.0, 2.0 * (2.0 * tau_b2) ** (ell / 2.0) * abs(power_trace))
            ok &= abs(comm[ell - 1]) <= 1e-10 * scale_ref

    # non-faithfulness: the square of a b a vanishes exactly when tau(b) = 0
    traceless = MomentFunctional.from_matrices("b", [np.diag([1.0, -1.0]).astype(complex)])
    aba = (a(), b(), a())
    ok &= ncms.cyclic_monotone_moment(aba + aba, omega, traceless) == 0.0
    _report(
        "05 cyclic-monotone closed forms",
        ok,
        f"moments n<=12 worst rel err {worst:.2e} (tol 1e-10), exact zero square "
        f"in {time.perf_counter() - started:.1f}s",
    )


def _moments_match(prediction, poly, omega, tau, l_max=8, rel=1e-8):
    oracle = predict.moment_oracle(poly, omega, tau, l_max, memo={})
    worst = 0.0
    for ell in range(1, l_max + 1):
        got = spectra.moment(prediction, ell)
        want = oracle[ell - 1].real
        scale = max(abs(want), 1e-8)
        worst = max(worst, abs(got - want) / scale)
    return worst <= rel, worst


def test_c06_spectral_predictor_consistency():
    started = time.perf_counter()
    rng = np.random.default_rng(10)
    k = 2
    a_mats = [_hermitian(rng, 5) for _ in range(k)]
    b_gen = [
        rng.standard_normal((3, 3)) + 1j * rng.standard_normal((3, 3)) for _ in range(k)
    ]
    omega = MomentFunctional.from_matrices("a", a_mats)
    model = CompactModel(tuple(a_mats))
    results = {}

    # conjugated sum: b_i a_i b_i*
    tau = MomentFunctional.from_matrices("b", b_gen)
    beta = tuple(complex(np.trace(m)) / 3.0 for m in b_gen)
    beta2 = np.array([[complex(np.trace(x.conj().T @ y)) / 3.0 for y in b_gen] for x in b_gen])
    pred = predict.predict_sum_conj_b(model, BStats(beta=beta, beta2=beta2))
    poly = [(1.0, (b(i), a(i), b(i, star=True))) for i in range(k)]
    results["sum_conj_b"] = _moments_match(pred, poly, omega, tau)

    # sandwiched sum: a_i b_i a_i* with self-adjoint b
    b_h = [_hermitian(rng, 3) for _ in range(k)]
    tau_h = MomentFunctional.from_matrices("b", b_h)
    beta_h = [float(np.trace(m).real) / 3.0 for m in b_h]
    pred = predict.predict_sum_a_b_astar(model, beta_h)
    poly = [(1.0, (a(i), b(i), a(i, star=True))) for i in range(k)]
    results["sum_a_b_astar"] = _moments_match(pred, poly, omega, tau_h)

    # anticommutator and commutator, single generators
    a0 = _hermitian(rng, 6)
    b0 = _hermitian(rng, 3)
    omega0 = MomentFunctional.from_matrices("a", [a0])
    tau0 = MomentFunctional.from_matrices("b", [b0])
    spec_a = spectra.properly_arrange(np.linalg.eigvalsh(a0))
    tb = float(np.trace(b0).real) / 3.0
    tb2 = float(np.trace(b0 @ b0).real) / 3.0
    pred = predict.predict_anticommutator(spec_a, tb, tb2)
    results["anticommutator"] = _moments_match(
        pred, [(1.0, (a(), b())), (1.0, (b(), a()))], omega0, tau0
    )
    pred = predict.predict_commutator(spec_a, tb, tb2)
    results["commutator"] = _moments_match(
        pred, [(1.0j, (a(), b())), (-1.0j, (b(), a()))], omega0, tau0
    )

    # independently rotated sum with scalar b-models
    betas = [0.8 - 0.3j, -0.5 + 0.1j]
    tau_s = MomentFunctional.from_matrices("b", [np.array([[z]]) for z in betas])
    pred = predict.predict_multi_unitary_sum(model, betas)
    poly = [(1.0, (b(i), a(i), b(i, star=True))) for i in range(k)]
    results["multi_unitary_sum"] = _moments_match(pred, poly, omega, tau_s)

    # disjoint union route against the block-diagonal construction
    gamma = [0.7, 1.3]
    via_matrix = predict.predict_sum_conj_b(
        model, BStats(beta=(0.0, 0.0), beta2=np.diag(gamma))
    )
    via_union = predict.predict_multi_unitary_disjoint(
        [spectra.properly_arrange(np.linalg.eigvalsh(m)) for m in a_mats], gamma
    )
    disjoint_ok = spectra.metric_d(via_matrix, via_union, terms=40) < 1e-8
    results["multi_unitary_disjoint"] = (disjoint_ok, 0.0)

    ok = all(flag for flag, _ in results.values())
    worst = max(err for _, err in results.values())
    _report(
        "06 predictor consistency",
        ok,
        f"all predictors match the moment oracle to l<=8 (worst rel {worst:.2e}, "
        f"tol 1e-8) in {time.perf_counter() - started:.1f}s",
    )


def _fit_through_origin(values, weights):
    num = sum(v * w for v, w in zip(values, weights))
    den = sum(w * w for w in weights)
    return num / den


def test_c07_anticommutator_example_reproduction():
    started = time.perf_counter()
    cfg = lab.config_from_json(
        {
            "experiment": "spectrum",
            "model": "anticommutator",
            "generators": {"A": {"kind": "dyadic_diag"}, "B": {"kind": "wishart", "entry_variance": 2.0}},
            "n_list": [300],
            "trials": 10,
            "seed": 42,
        }
    )
    row = lab.run(cfg).per_n[0]
    p = 1.0 + math.sqrt(2.0)
    q = -(math.sqrt(2.0) - 1.0)
    pred_pos = [p * 2.0 ** -i for i in range(1, 5)]
    pred_neg = [q * 2.0 ** -i for i in range(1, 3)]

    rel_errs = [
        abs(row["pos_mean"][i] - pred_pos[i]) / abs(pred_pos[i]) for i in range(4)
    ] + [abs(row["neg_mean"][i] - pred_neg[i]) / abs(pred_neg[i]) for i in range(2)]
    ranks_ok = all(err <= 0.08 for err in rel_errs)

    weights = [2.0 ** -i for i in range(1, 5)]
    p_hat = _fit_through_origin(row["pos_mean"][:4], weights)
    q_hat = _fit_through_origin(row["neg_mean"][:2], weights[:2])
    p_ok = 2.35 <= p_hat <= 2.48
    q_ok = -0.45 <= q_hat <= -0.38

    cfg = lab.config_from_json(
        {
            "experiment": "spectrum",
            "model": "commutator",
            "generators": {"A": {"kind": "dyadic_diag"}, "B": {"kind": "wishart", "entry_variance": 2.0}},
            "n_list": [300],
            "trials": 10,
            "seed": 42,
        }
    )
    row_c = lab.run(cfg).per_n[0]
    r_plus = _fit_through_origin(row_c["pos_mean"][:3], weights[:3])
    r_minus = -_fit_through_origin(row_c["neg_mean"][:3], weights[:3])
    r_hat = 0.5 * (r_plus + r_minus)
    r_ok = 0.95 <= r_hat <= 1.05

    _report(
        "07 desk-scale example reproduction",
        ranks_ok and p_ok and q_ok and r_ok,
        f"top-6 worst rel err {max(rel_errs):.3f} (tol 0.08); "
        f"p_hat={p_hat:.4f} in [2.35,2.48], q_hat={q_hat:.4f} in [-0.45,-0.38], "
        f"r_hat={r_hat:.4f} in [0.95,1.05] ({time.perf_counter() - started:.1f}s)",
    )


def test_c08_rotation_sum_clustering():
    # Top-14 eigenvalues of D + sum_i U_i D U_i* fall in clusters of size
    # k+1 around 2^-j.  Individual cluster members spread by O(n^-1/2)
    # (about 7-11 percent at n=1000 for k >= 2), so the 5 percent check
    # is applied to each cluster mean; cluster separation pins the
    # multiplicity at k+1.
    started = time.perf_counter()
    ok = True
    details = []
    for k in (1, 2, 3):
        cfg = lab.config_from_json(
            {
                "experiment": "spectrum",
                "model": "rotation-sum",
                "generators": {"A": {"kind": "dyadic_diag"}},
                "n_list": [1000],
                "trials": 2,
                "seed": 100 + k,
                "rotations": k,
                "top_m": 14,
            }
        )
        top = lab.run(cfg).per_n[0]["pos_mean"][:14]
        worst = 0.0
        for start in range(0, 14, k + 1):
            cluster = top[start:start + k + 1]
            center = 2.0 ** -(start // (k + 1) + 1)
            rel = abs(np.mean(cluster) - center) / center
            worst = max(worst, rel)
            if rel > 0.05:
                ok = False
        # separation between consecutive clusters pins the multiplicity
        for start in range(k + 1, 14, k + 1):
            if top[start - 1] <= top[start]:
                ok = False
            gap_center = 2.0 ** -(start // (k + 1)) * 0.75
            if not (top[start] < gap_center < top[start - 1]):
                ok = False
        details.append(f"k={k} worst cluster-mean err {worst:.3f}")
    _report(
        "08 rotation-sum clustering",
        ok,
        "; ".join(details) + f" (tol 0.05, n=1000, {time.perf_counter() - started:.1f}s)",
    )


def test_c09_moment_table_internal_consistency():
    started = time.perf_counter()
    cfg = lab.config_from_json(
        {
            "experiment": "moments",
            "model": [["D", "X1", "D", "X2"]],
            "generators": {
                "D": {"kind": "dyadic_diag"},
                "X1": {"kind": "wishart", "entry_variance": 2.0},
                "X2": {"kind": "wishart", "entry_variance": 2.0},
            },
            "n_list": [125, 500],
            "trials": 20,
            "seed": 0,
        }
    )
    rec = lab.run(cfg)
    diff_small = rec.per_n[0]["rows"][0]["abs_diff_of_means"]
    diff_large = rec.per_n[1]["rows"][0]["abs_diff_of_means"]
    _report(
        "09 factorization consistency",
        diff_large <= 0.05 and diff_large < diff_small,
        f"|Tr(D X1 D X2) - Tr(D^2) tr(X1) tr(X2)|: n=125 {diff_small:.4f} -> "
        f"n=500 {diff_large:.4f} (tol 0.05, decreasing) "
        f"({time.perf_counter() - started:.1f}s)",
    )


def test_c10_decay_rates():
    started = time.perf_counter()
    cfg = lab.config_from_json(
        {
            "experiment": "decay",
            "model": ["D", "X@1"],
            "generators": {"D": {"kind": "dyadic_diag"}, "X": {"kind": "wishart", "entry_variance": 2.0}},
            "n_list": [64, 128, 256, 512],
            "trials": 500,
            "seed": 11,
        }
    )
    rec = lab.run(cfg)
    var_slope = rec.fits["variance_slope"]
    fourth_slope = rec.fits["fourth_slope"]
    _report(
        "10 decay rates",
        -1.5 <= var_slope <= -0.5 and fourth_slope <= -1.4,
        f"variance slope {var_slope:.3f} in [-1.5,-0.5], fourth-moment slope "
        f"{fourth_slope:.3f} <= -1.4 ({time.perf_counter() - started:.0f}s)",
    )


def test_c11_independent_rotation_vanishing():
    started = time.perf_counter()
    means = {}
    for n_index, n in enumerate((128, 512)):
        d = rmt.dyadic_diag(n)
        values = []
        for trial in range(20):
            g = rmt.RngStream(77).child(n_index, trial).generator()
            u1 = rmt.sample_haar_unitary(n, g)
            u2 = rmt.sample_haar_unitary(n, g)
            x = rmt.sample_wishart(n, g)
            word = (u1 @ d @ u1.conj().T) @ x @ (u2 @ d @ u2.conj().T) @ x
            values.append(abs(np.trace(word)))
        means[n] = float(np.mean(values))
    _report(
        "11 independent-rotation vanishing",
        means[512] <= 0.05 and means[512] < means[128],
        f"mean |Tr(U1 D U1* X U2 D U2* X)|: n=128 {means[128]:.4f} -> n=512 "
        f"{means[512]:.4f} (tol 0.05, decreasing) ({time.perf_counter() - started:.0f}s)",
    )


def test_c12_positivity_gram_psd():
    started = time.perf_counter()
    rng = np.random.default_rng(21)
    omega = MomentFunctional.from_matrices("a", [_hermitian(rng, 4)])
    tau = MomentFunctional.from_matrices("b", [_hermitian(rng, 3)])
    basis = []
    for length in range(1, 5):
        for mask in range(2 ** length):
            word = tuple(a() if (mask >> i) & 1 else b() for i in range(length))
            if any(letter.family == "a" for letter in word):
                basis.append(word)
    report = ncms.gram_psd_check(omega, tau, basis, tol=1e-10)
    _report(
        "12 positivity",
        report.passed,
        f"Gram over {len(basis)} words of length <= 4: min eigenvalue "
        f"{report.min_eigenvalue:.3e} >= -1e-10 ({time.perf_counter() - started:.1f}s)",
    )
