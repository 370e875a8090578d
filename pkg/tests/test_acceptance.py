"""Acceptance criteria, one test each, with the pinned tolerances and time limits."""

import random
import time
from fractions import Fraction
from itertools import combinations

from semicert import univariate as uv
from semicert.certkit import (
    CertificateTerm,
    CertifiedPiece,
    ConstPSD,
    PiecewiseCertificate,
    PolyPSD,
    Square,
    psd_univariate_matrix,
    verify_certificate,
)
from semicert.construct import cover_sphere, sphere_grid, sum_of_squares_power
from semicert.detrepr import quadratic_determinantal_representation, random_psd_polynomial
from semicert.domination import (
    QUADRATIC_BRANCHES,
    certify_quadratic_2x2,
    check_domination,
    orthant_certificate_from_domination,
)
from semicert.gallery import (
    choi_certificate,
    two_piece_certificate,
    m_lambda_symbolic,
    m_zero,
    mlambda_certificate,
    orthant_box_certificate,
    orthant_data,
    rank_one_certificate,
)
from semicert.matpoly import MatrixPolynomial, determinant, smith_normal_form
from semicert.polycore import Polynomial


def test_criterion_01_det_m0(criterion):
    t0 = time.perf_counter()
    x, y, z = (Polynomial.var(i, 3) for i in range(3))
    ok = determinant(m_zero()) == x**4 * y**2 + y**4 * z**2 + z**4 * x**2 - 3 * x**2 * y**2 * z**2
    dt = time.perf_counter() - t0
    criterion(1, ok and dt < 1, "det(M_0) equals the Motzkin-type sextic, exact structural equality", dt, 1)
    assert ok and dt < 1


def test_criterion_02_det_mlambda(criterion):
    t0 = time.perf_counter()
    lam = Polynomial.var(0, 1)
    one = Polynomial.const(1, 1)
    d = determinant(m_lambda_symbolic()).substitute([one, one, one, lam])
    ok = d == lam * (lam + 3) ** 2
    dt = time.perf_counter() - t0
    criterion(2, ok and dt < 1, "det(M_lambda)(1,1,1) == lambda(lambda+3)^2 in Q[lambda], exact", dt, 1)
    assert ok and dt < 1


def test_criterion_03_explicit_certificates(criterion):
    t0 = time.perf_counter()
    certs = {
        "choi": choi_certificate(),
        "example-3.1": two_piece_certificate(),
        "mlambda-1": mlambda_certificate(1),
        "mlambda-4": mlambda_certificate(4),
        "mlambda-1/2": mlambda_certificate(Fraction(1, 2)),
        "orthant-box": orthant_box_certificate(),
    }
    failed = []
    for name, cert in certs.items():
        rep = verify_certificate(cert)
        if not (rep.identity_exact and rep.weights_ok):
            failed.append(name)
    d = orthant_data()
    X = Polynomial.var(0, 1)
    cx = d.C_X.map(lambda p: Polynomial(1, {(e[0],): c for e, c in p.terms.items()}), 1)
    cy = d.C_Y.map(lambda p: Polynomial(1, {(e[1],): c for e, c in p.terms.items()}), 1)
    psd_ok = psd_univariate_matrix(cx) and psd_univariate_matrix(cy) and X.nvars == 1
    dt = time.perf_counter() - t0
    ok = not failed and psd_ok and dt < 10
    criterion(3, ok, f"{len(certs)} explicit certificates, identity exact on every piece "
              f"(failed: {failed or 'none'}); C_X, C_Y psd exactly: {psd_ok}", dt, 10)
    assert ok


def test_criterion_04_cauchy_binet(criterion):
    t0 = time.perf_counter()
    rng = random.Random(4)
    bad = 0
    for _ in range(100):
        s, m = rng.randint(1, 5), rng.randint(1, 3)
        A = MatrixPolynomial([[rng.randint(-5, 5) for _ in range(m)] for _ in range(s)], 0)
        lhs = determinant(A.gram())
        rhs = Polynomial.zero(0)
        for S in combinations(range(s), m):
            dS = determinant(A.submatrix(list(S), list(range(m))))
            rhs = rhs + dS * dS
        bad += lhs != rhs
    dt = time.perf_counter() - t0
    ok = bad == 0 and dt < 5
    criterion(4, ok, f"Cauchy-Binet on 100 random integer matrices up to 5x3: {bad} mismatches", dt, 5)
    assert ok


def _divides(a: Polynomial, b: Polynomial) -> bool:
    if b.is_zero():
        return True
    if a.is_zero():
        return False
    return uv.divmod_poly(b, a)[1].is_zero()


def test_criterion_05_smith(criterion):
    t0 = time.perf_counter()
    rng = random.Random(5)
    bad = 0
    for _ in range(100):
        m = rng.randint(1, 3)
        M = MatrixPolynomial([[Polynomial.from_coeffs([rng.randint(-3, 3) for _ in range(rng.randint(1, 4))])
                               for _ in range(m)] for _ in range(m)], 1)
        s = smith_normal_form(M)
        dE, dF = determinant(s.E), determinant(s.F)
        diag = s.diagonal
        good = (s.product() == M and dE.is_constant() and not dE.is_zero()
                and dF.is_constant() and not dF.is_zero() and s.D.is_diagonal()
                and all(_divides(diag[i], diag[i + 1]) for i in range(m - 1)))
        bad += not good
    dt = time.perf_counter() - t0
    ok = bad == 0 and dt < 30
    criterion(5, ok, f"Smith form on 100 random matrices (m<=3, deg<=3): {bad} failures", dt, 30)
    assert ok


def test_criterion_06_constructor(criterion):
    t0 = time.perf_counter()
    n = 3
    A = m_zero() + MatrixPolynomial.identity(3, n).scale(sum_of_squares_power(n, 1))
    cert = cover_sphere(A, grid=8)
    rep = verify_certificate(cert, extra_points=sphere_grid(n, 32))
    dt = time.perf_counter() - t0
    ok = rep.identity_exact and rep.weights_ok and rep.covering.ok and dt < 120
    criterion(6, ok, f"cover_sphere(M_0 + |x|^2 Id): {len(cert.pieces)} pieces, identities exact "
              f"{rep.identity_exact}, weights {rep.weights_ok}, covering {rep.covering.ok} at 4x resolution",
              dt, 120)
    assert ok


def _random_dominated(rng: random.Random) -> tuple[MatrixPolynomial, tuple]:
    n = rng.randint(1, 2)
    m = rng.randint(1, 3)
    xs = [Polynomial.var(i, n) for i in range(n)]

    def small_poly(min_deg: int) -> Polynomial:
        p = Polynomial.zero(n)
        for _ in range(rng.randint(0, 3)):
            e = tuple(rng.randint(0, 2) for _ in range(n))
            if sum(e) >= min_deg:
                p = p + Polynomial.monomial(e, Fraction(rng.randint(-4, 4), rng.randint(1, 4)))
        return p

    L = [[rng.randint(-2, 2) for _ in range(m)] for _ in range(m)]
    for i in range(m):
        L[i][i] = rng.randint(1, 3)
    C = MatrixPolynomial(L, n).gram()
    lead = Polynomial.const(1, n) if rng.random() < 0.6 else xs[0] ** 2
    rows = [[None] * m for _ in range(m)]
    for i in range(m):
        for j in range(i, m):
            rows[i][j] = rows[j][i] = C[i, j] * lead + small_poly(1) * lead
    A = MatrixPolynomial(rows, n)
    x0 = tuple(Fraction(0) for _ in range(n))
    return A, x0


def test_criterion_07_domination_roundtrip(criterion):
    t0 = time.perf_counter()
    rng = random.Random(7)
    done, bad, tries = 0, 0, 0
    while done < 50 and tries < 2000:
        tries += 1
        A, x0 = _random_dominated(rng)
        w = check_domination(A, x0)
        if not w:
            continue
        signs = tuple(rng.choice([1, -1]) for _ in x0)
        try:
            cert, _ = orthant_certificate_from_domination(A, x0, signs, w)
        except ValueError:
            continue  # s^beta A^(beta) not psd for this orthant
        rep = verify_certificate(cert, samples=200)
        done += 1
        bad += not (rep.identity_exact and rep.weights_ok)
    dt = time.perf_counter() - t0
    ok = done == 50 and bad == 0 and dt < 60
    criterion(7, ok, f"{done} dominated instances, orthant certificates failing the verifier: {bad}", dt, 60)
    assert ok


def _branch_instance(rng: random.Random, branch: str):
    def q(lo=-5, hi=5):
        return Fraction(rng.randint(lo * 4, hi * 4), 4)

    if branch == "c1>0":
        return q(), q(), q(), q(), Fraction(rng.randint(1, 20), 4), q()
    if branch == "c1=0,c2>b1^2":
        b1 = q()
        return q(), q(), b1, q(), Fraction(0), b1 * b1 + Fraction(rng.randint(1, 20), 4)
    if branch == "c2=b1^2,b1=0":
        return q(), q(), Fraction(0), Fraction(0), Fraction(0), Fraction(0)
    b1 = q()
    while b1 == 0:
        b1 = q()
    b2 = q()
    c2 = b1 * b1
    if branch == "a1c2-2b1b2>0":
        return (2 * b1 * b2 + Fraction(rng.randint(1, 20), 4)) / c2, q(), b1, b2, Fraction(0), c2
    return 2 * b1 * b2 / c2, b2 * b2 / (b1 * b1) + Fraction(rng.randint(0, 8), 4), b1, b2, Fraction(0), c2


def test_criterion_08_quadratic_branches(criterion):
    t0 = time.perf_counter()
    rng = random.Random(8)
    bad = []
    for branch in QUADRATIC_BRANCHES:
        for _ in range(20):
            params = _branch_instance(rng, branch)
            res = certify_quadratic_2x2(*params)
            if not res or res.branch != branch:
                bad.append((branch, params))
                continue
            rep = verify_certificate(res.certificate)
            if not (rep.ok and rep.identity_exact):
                bad.append((branch, params))
    rejected = not certify_quadratic_2x2(1, 1, 1, 1, -1, 0) and not certify_quadratic_2x2(0, 0, 0, 0, Fraction(-1, 3), 5)
    last = 0
    for _ in range(20):
        b1 = Fraction(rng.randint(1, 8), 2)
        b2 = Fraction(rng.randint(1, 8), 2)
        a2 = b2 * b2 / (b1 * b1) - Fraction(rng.randint(1, 8), 8)
        last += bool(certify_quadratic_2x2(2 * b1 * b2 / (b1 * b1), a2, b1, b2, 0, b1 * b1))
    dt = time.perf_counter() - t0
    ok = not bad and rejected and last == 0
    criterion(8, ok, f"5 branches x 20 instances, failures {len(bad)}; c1<0 rejected {rejected}; "
              f"a2 b1^2 - b2^2 < 0 accepted {last}/20", dt)
    assert ok, bad[:3]


def test_criterion_09_determinantal(criterion):
    t0 = time.perf_counter()
    rng = random.Random(9)
    worst, bad = 0.0, 0
    for _ in range(50):
        f = random_psd_polynomial(rng, max_degree=10)
        rep = quadratic_determinantal_representation(f)
        worst = max(worst, rep.residual)
        bad += not (rep.ok and rep.matrix.is_diagonal() and rep.residual <= 1e-8)
    exact_nonzero = 0
    for _ in range(20):
        f = random_psd_polynomial(rng, max_degree=10, exact=True)
        rep = quadratic_determinantal_representation(f)
        exact_nonzero += rep.residual != 0 or not rep.ok
    dt = time.perf_counter() - t0
    ok = bad == 0 and exact_nonzero == 0
    criterion(9, ok, f"50 random psd polynomials: worst relative residual {worst:.2e} (tol 1e-8), "
              f"failures {bad}; exact inputs with nonzero residual {exact_nonzero}/20", dt)
    assert ok


# -- criterion 10 ---------------------------------------------------------------------------


def _bump(p: Polynomial, rng: random.Random) -> Polynomial:
    """Change one existing coefficient (or add a constant) by a nonzero rational."""
    items = p.items()
    delta = Fraction(rng.choice([-3, -2, -1, 1, 2, 3]), rng.choice([1, 2, 5]))
    if items:
        exps, c = rng.choice(items)
        while delta == 0 or delta == -2 * c:
            delta += Fraction(1, 3)
        return p + Polynomial.monomial(exps, delta)
    return p + delta


def _mutate(cert: PiecewiseCertificate, rng: random.Random) -> PiecewiseCertificate:
    k = rng.randrange(len(cert.pieces))
    cp = cert.pieces[k]
    j = rng.randrange(len(cp.terms))
    t = cp.terms[j]
    f = t.factor
    target = rng.choice(["weight", "factor"])
    if target == "weight":
        t = CertificateTerm(_bump(t.weight, rng), f, t.proof)
    elif isinstance(f, Square):
        rows = [list(r) for r in f.U.rows]
        i, c = rng.randrange(len(rows)), rng.randrange(len(rows[0]))
        rows[i][c] = _bump(rows[i][c], rng)
        t = CertificateTerm(t.weight, Square(MatrixPolynomial(rows, f.U.nvars)), t.proof)
    elif isinstance(f, ConstPSD):
        Q = [list(r) for r in f.Q]
        nz = [(a, b) for a in range(len(Q)) for b in range(a, len(Q))]
        a, b = rng.choice(nz)
        d = Fraction(rng.choice([-2, -1, 1, 2]), rng.choice([1, 3]))
        Q[a][b] += d
        if a != b:
            Q[b][a] += d
        t = CertificateTerm(t.weight, ConstPSD(Q, f.outer), t.proof)
    else:
        rows = [list(r) for r in f.P.rows]
        a = rng.randrange(len(rows))
        rows[a][a] = _bump(rows[a][a], rng)
        t = CertificateTerm(t.weight, PolyPSD(MatrixPolynomial(rows, f.P.nvars)), t.proof)
    terms = list(cp.terms)
    terms[j] = t
    pieces = list(cert.pieces)
    pieces[k] = CertifiedPiece(cp.piece, tuple(terms))
    return PiecewiseCertificate(cert.target, tuple(pieces), cert.names, cert.domain), k


def test_criterion_10_mutation_soundness(criterion):
    t0 = time.perf_counter()
    rng = random.Random(10)
    sources = [choi_certificate(), two_piece_certificate(), mlambda_certificate(1), mlambda_certificate(4),
               orthant_box_certificate(), rank_one_certificate()]
    false_pass, no_witness = 0, 0
    for i in range(200):
        cert = sources[i % len(sources)]
        mutated, k = _mutate(cert, rng)
        rep = verify_certificate(mutated, samples=20)
        piece = rep.pieces[k]
        if piece.identity_exact:
            false_pass += 1
            continue
        wit = piece.identity_witness
        if wit is None:
            no_witness += 1
            continue
        pt, (a, b), diff = wit
        total = mutated.pieces[k].total(cert.target.size, cert.nvars)
        if diff == 0 or (cert.target[a, b] - total[a, b]).evaluate(pt) == 0:
            no_witness += 1
    dt = time.perf_counter() - t0
    ok = false_pass == 0 and no_witness == 0
    criterion(10, ok, f"200 single-coefficient mutations: false passes {false_pass}, "
              f"missing/invalid witnesses {no_witness}", dt)
    assert ok
