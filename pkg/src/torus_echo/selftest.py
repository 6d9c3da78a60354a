"""Small-N oracle suite: every fast path checked against a brute-force
construction.  Used by the CLI selftest mode and mirrored in the test suite.
"""

import numpy as np

from .analysis import fit_decay_rate
from .decoherence import (
    apply_decoherence,
    apply_decoherence_direct,
    chord_multiplier,
    depolarizing_kernel,
    gaussian_kernel,
    identity_kernel,
    lorentz_kernel,
    lorentz_kernel_direct,
)
from .dynamics import (
    MapParams,
    apply_propagator,
    build_propagator,
    lyapunov_closed_form,
    lyapunov_numeric,
    propagator_matrix,
)
from .hilbert import (
    chord_to_rho,
    make_space,
    purity,
    rho_to_chord,
    translation_matrix,
)


def _random_density(N, rng):
    m = rng.normal(size=(N, N)) + 1j * rng.normal(size=(N, N))
    rho = m @ m.conj().T
    return rho / np.trace(rho)


def check_translation_algebra(N=6):
    """T(q,p) T(Q,P) T(q,p)^dag = exp(2 pi i (pQ - qP)/N) T(Q,P), all quadruples."""
    space = make_space(N)
    mats = [[translation_matrix(space, q, p) for p in range(N)] for q in range(N)]
    worst = 0.0
    for q in range(N):
        for p in range(N):
            A = mats[q][p]
            for Q in range(N):
                for P in range(N):
                    lhs = A @ mats[Q][P] @ A.conj().T
                    rhs = np.exp(2j * np.pi * (p * Q - q * P) / N) * mats[Q][P]
                    worst = max(worst, float(np.max(np.abs(lhs - rhs))))
    return worst, 1e-10


def check_chord_roundtrip(N=8, seed=3):
    rng = np.random.default_rng(seed)
    rho = _random_density(N, rng)
    back = chord_to_rho(rho_to_chord(rho))
    return float(np.max(np.abs(back - rho))), 1e-12


def check_chord_against_traces(N=8, seed=4):
    rng = np.random.default_rng(seed)
    space = make_space(N)
    rho = _random_density(N, rng)
    chi = rho_to_chord(rho)
    worst = 0.0
    for Q in range(N):
        for P in range(N):
            direct = np.trace(translation_matrix(space, Q, P).conj().T @ rho)
            worst = max(worst, abs(chi[Q, P] - direct))
    return float(worst), 1e-10


def check_parseval_purity(N=8, seed=5):
    rng = np.random.default_rng(seed)
    rho = _random_density(N, rng)
    chi = rho_to_chord(rho)
    return float(abs(purity(rho) - np.sum(np.abs(chi) ** 2) / N)), 1e-10


def check_propagator_matrix(N=8):
    space = make_space(N)
    prop = build_propagator(space, MapParams(2, 2, 0.13))
    U = propagator_matrix(prop)
    worst_unitary = float(np.max(np.abs(U @ U.conj().T - np.eye(N))))
    eye = np.eye(N, dtype=complex)
    cols = np.column_stack([apply_propagator(eye[:, i], prop) for i in range(N)])
    worst = max(float(np.max(np.abs(cols - U))), worst_unitary)
    return worst, 1e-10


def random_symmetric_kernel(N, seed):
    """Random nonnegative weights with c(q,p) = c(-q,-p) and unit sum."""
    from .decoherence import DecoherenceKernel
    rng = np.random.default_rng(seed)
    space = make_space(N)
    raw = rng.random((N, N))
    sym = 0.5 * (raw + np.roll(np.roll(raw[::-1, ::-1], 1, axis=0), 1, axis=1))
    return DecoherenceKernel(space=space, weights=sym / sym.sum(),
                             epsilon=0.0, model_tag="identity")


def check_multiplier_against_double_sum(N=8, seed=6):
    kernel = random_symmetric_kernel(N, seed)
    chat = chord_multiplier(kernel).values
    worst = 0.0
    for Q in range(N):
        for P in range(N):
            phases = np.exp(2j * np.pi * (np.arange(N)[None, :] * Q - np.arange(N)[:, None] * P) / N)
            direct = np.sum(kernel.weights * phases)
            worst = max(worst, abs(chat[Q, P] - direct))
    return float(worst), 1e-12


def check_kraus_equivalence(N=8, seed=7):
    rng = np.random.default_rng(seed)
    space = make_space(N)
    rho = _random_density(N, rng)
    worst = 0.0
    for kernel in (gaussian_kernel(space, 0.5), depolarizing_kernel(space, 0.3),
                   lorentz_kernel(space, 0.5, image_cutoff=30)):
        fast = apply_decoherence(rho, chord_multiplier(kernel))
        direct = apply_decoherence_direct(rho, kernel)
        worst = max(worst, float(np.max(np.abs(fast - direct))))
    return worst, 1e-10


def check_depolarizing_closed_form(N=8, seed=8):
    """D(rho) = (1-w) rho + w I/N with w = eps N^2/(N^2-1)."""
    rng = np.random.default_rng(seed)
    space = make_space(N)
    rho = _random_density(N, rng)
    eps = 0.37
    out = apply_decoherence(rho, chord_multiplier(depolarizing_kernel(space, eps)))
    w = eps * N * N / (N * N - 1.0)
    expected = (1.0 - w) * rho + w * np.eye(N) / N
    return float(np.max(np.abs(out - expected))), 1e-10


def check_lorentz_quadrature(N=16):
    space = make_space(N)
    fast = lorentz_kernel(space, 0.7, image_cutoff=40).weights
    direct = lorentz_kernel_direct(space, 0.7, image_cutoff=40).weights
    return float(np.max(np.abs(fast - direct) / direct)), 1e-9


def check_unitality(N=8):
    space = make_space(N)
    eye = np.eye(N, dtype=complex) / N
    out = apply_decoherence(eye, chord_multiplier(gaussian_kernel(space, 0.5)))
    return float(np.max(np.abs(out - eye))), 1e-12


def check_identity_kernel(N=8, seed=9):
    rng = np.random.default_rng(seed)
    space = make_space(N)
    rho = _random_density(N, rng)
    out = apply_decoherence(rho, chord_multiplier(identity_kernel(space)))
    return float(np.max(np.abs(out - rho))), 1e-12


def check_lyapunov(n_iter=20000):
    num = lyapunov_numeric(MapParams(2, 2, 0.0), n_iter=n_iter, seed=1)
    return float(abs(num - lyapunov_closed_form(2, 2))), 1e-3


def check_rate_fit():
    t = np.arange(60)
    fit = fit_decay_rate(np.exp(-0.5 * t), floor_hint=0.0, transient_skip=0)
    return float(abs(fit.gamma - 0.5)), 1e-9


ALL_CHECKS = [
    ("translation-algebra", check_translation_algebra),
    ("chord-roundtrip", check_chord_roundtrip),
    ("chord-vs-traces", check_chord_against_traces),
    ("parseval-purity", check_parseval_purity),
    ("propagator-vs-matrix", check_propagator_matrix),
    ("multiplier-vs-double-sum", check_multiplier_against_double_sum),
    ("chord-vs-kraus-sum", check_kraus_equivalence),
    ("depolarizing-closed-form", check_depolarizing_closed_form),
    ("lorentz-quadrature", check_lorentz_quadrature),
    ("unitality", check_unitality),
    ("identity-kernel", check_identity_kernel),
    ("lyapunov-numeric-vs-closed", check_lyapunov),
    ("rate-fit-exact-exponential", check_rate_fit),
]


def run_selftest(verbose=True):
    """Run every oracle check; returns True iff all pass."""
    all_ok = True
    for name, fn in ALL_CHECKS:
        err, tol = fn()
        ok = err < tol
        all_ok = all_ok and ok
        if verbose:
            status = "PASS" if ok else "FAIL"
            print(f"[{status}] {name:<28} err={err:.3e}  tol={tol:.0e}")
    return all_ok
