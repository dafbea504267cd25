"""Locally critical cross-polytope packings by constrained optimization.

For a candidate set M of integer coefficient vectors (the ones forced onto
the unit L1 sphere) the solver minimizes det(B)^2 over the n^2 basis entries
subject to ||xB||_1 = 1 on M and ||yB||_1 >= 1 on a finite guard set, with
lazy admissibility: any lattice vector found below norm 1 joins the guard
set and the solve repeats.  The L1 norm is smoothed (sqrt(t^2 + eps^2), eps
annealed) inside an augmented-Lagrangian loop, then polished by freezing the
coordinate signs at the smoothed optimum and running Newton on the now
smooth KKT system.
"""

from __future__ import annotations

import itertools
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field, replace

import numpy as np
import scipy.optimize

from . import geometry
from .errors import Infeasible, NoConvergence
from .lattices import Lattice


# ---------------------------------------------------------------------------
# minimal configurations


@dataclass(frozen=True)
class MinimalConfiguration:
    """Coefficient vectors pinned to the unit sphere (one per +- pair,
    always containing the standard basis vectors)."""

    dim: int
    vectors: tuple[tuple[int, ...], ...]

    def __len__(self):
        return len(self.vectors)


def _canonical(vec) -> tuple[int, ...]:
    v = tuple(int(x) for x in vec)
    lead = next((x for x in v if x), 0)
    return v if lead >= 0 else tuple(-x for x in v)


def _is_primitive(vec) -> bool:
    g = 0
    for x in vec:
        g = math.gcd(g, abs(int(x)))
    return g == 1


def _single_consistent(vec) -> bool:
    # reverse triangle inequality: ||sum x_i b_i|| >= 2 max|x_i| - sum|x_i|
    a = [abs(int(x)) for x in vec]
    return 2 * max(a) - sum(a) <= 1


def _pair_consistent(x, y) -> bool:
    # x +- y = k*w with w primitive forces k*1 <= ||xB|| + ||yB|| = 2
    for sig in (1, -1):
        z = [a + sig * b for a, b in zip(x, y)]
        if any(z):
            g = 0
            for c in z:
                g = math.gcd(g, abs(c))
            if g >= 3:
                return False
    return True


def coefficient_bound(n: int, half_box: bool) -> int:
    if half_box:
        return max(1, math.floor(2 ** ((1 - n) / 2) * math.factorial(n)))
    return math.factorial(n)


def candidate_pool(n: int, coeff_cap: int, half_box: bool = False) -> list[tuple[int, ...]]:
    """Consistent canonical primitive vectors besides the e_i themselves."""
    cap = min(coeff_cap, coefficient_bound(n, half_box))
    pool = []
    for vec in itertools.product(range(-cap, cap + 1), repeat=n):
        if not any(vec):
            continue
        if _canonical(vec) != vec:
            continue
        if sum(abs(x) for x in vec) == 1:
            continue  # standard basis vectors are always included
        if not _is_primitive(vec) or not _single_consistent(vec):
            continue
        pool.append(vec)
    pool.sort(key=lambda v: (sum(abs(x) for x in v), v))
    return pool


def _signed_permutation_key(cfg_vectors, n: int) -> tuple:
    """Canonical form under signed permutations of the coefficient coordinates
    (exact for n <= 4; a permutation-invariant surrogate above)."""
    if n <= 4:
        best = None
        for perm in itertools.permutations(range(n)):
            for signs in itertools.product((1, -1), repeat=n):
                mapped = tuple(sorted(
                    _canonical(tuple(signs[j] * v[perm[j]] for j in range(n)))
                    for v in cfg_vectors))
                if best is None or mapped < best:
                    best = mapped
        return best
    return tuple(sorted(tuple(sorted(abs(x) for x in v)) for v in cfg_vectors))


def enumerate_configurations(n: int, coeff_cap: int, count_target: int,
                             seed: int = 0, half_box: bool = False,
                             extra_sizes: tuple[int, ...] = (0, 1)):
    """Yield consistent configurations, deduplicated under signed
    permutations, smallest coefficient mass first.

    Sizes run over n(n+1)/2 + s for s in extra_sizes.  When the subset space
    outgrows the target count, seeded random sampling takes over.
    """
    es = [tuple(int(i == j) for j in range(n)) for i in range(n)]
    pool = candidate_pool(n, coeff_cap, half_box)
    # drop vectors inconsistent with the mandatory e_i, then tabulate pairs
    pool = [v for v in pool if all(_pair_consistent(v, e) for e in es)]
    npool = len(pool)
    ok = [[_pair_consistent(pool[i], pool[j]) for j in range(npool)]
          for i in range(npool)]
    rng = np.random.default_rng(seed)
    seen = set()
    yielded = 0
    for size_slack in extra_sizes:
        k = n * (n + 1) // 2 - n + size_slack
        if k < 0 or k > npool:
            continue
        total = math.comb(npool, k)
        if total <= max(200000, 50 * count_target):
            combos = itertools.combinations(range(npool), k)
        else:
            def sampler():
                for _ in range(200 * count_target):
                    idx = rng.choice(npool, size=k, replace=False)
                    yield tuple(sorted(int(i) for i in idx))
            combos = sampler()
        for idx in combos:
            if yielded >= count_target:
                return
            if not all(ok[a][b] for a, b in itertools.combinations(idx, 2)):
                continue
            extras = tuple(pool[i] for i in idx)
            key = _signed_permutation_key(tuple(es) + extras, n)
            if key in seen:
                continue
            seen.add(key)
            yielded += 1
            yield MinimalConfiguration(dim=n, vectors=tuple(es) + extras)


# ---------------------------------------------------------------------------
# solving one configuration


@dataclass
class SolveOptions:
    coeff_cap: int = 2
    half_box: bool = False
    init_basis: np.ndarray | None = None
    init_sigma: float = 0.2
    seed: int = 0
    eps_schedule: tuple[float, ...] = (1e-2, 1e-3, 1e-4, 1e-5, 1e-6, 1e-8)
    max_lazy_rounds: int = 30
    multiplier_updates: int = 4
    inner_maxiter: int = 250
    constraint_tol: float = 1e-9
    kkt_tol: float = 1e-8


@dataclass
class CriticalityDiagnostics:
    well_rounded: bool
    kissing_lower_ok: bool
    kissing_upper_ok: bool
    halfnorm_pairs_ok: bool
    perturbation_stable: bool
    kissing: int
    halfnorm_pairs: int
    worst_perturbed_det_drop: float

    def all_ok(self) -> bool:
        return (self.well_rounded and self.kissing_lower_ok and
                self.kissing_upper_ok and self.halfnorm_pairs_ok and
                self.perturbation_stable)

    def as_dict(self) -> dict:
        return self.__dict__.copy()


@dataclass
class PackingSolution:
    basis: np.ndarray
    achieved_det: float
    density: float
    report: geometry.PackingReport
    configuration: MinimalConfiguration
    kkt_residual: float
    fingerprint: tuple = field(default_factory=tuple)

    def lattice(self) -> Lattice:
        return Lattice(self.basis, exact=False)


def _cofactor_grad(b: np.ndarray) -> tuple[float, np.ndarray]:
    """(det, gradient of det^2 = 2 det * cofactor matrix)."""
    det = float(np.linalg.det(b))
    try:
        cof = det * np.linalg.inv(b).T
    except np.linalg.LinAlgError:
        n = len(b)
        cof = np.empty_like(b)
        for i in range(n):
            for j in range(n):
                minor = np.delete(np.delete(b, i, axis=0), j, axis=1)
                cof[i, j] = (-1) ** (i + j) * np.linalg.det(minor)
    return det, 2.0 * det * cof


def _auglag(b0: np.ndarray, x_eq: np.ndarray, x_in: np.ndarray,
            opts: SolveOptions) -> np.ndarray:
    n = b0.shape[0]
    n_eq, n_in = len(x_eq), len(x_in)
    x_all = np.concatenate([x_eq, x_in], axis=0) if n_in else x_eq
    lam_eq = np.zeros(n_eq)
    lam_in = np.zeros(n_in)
    mu = 10.0
    b = b0.copy()
    for eps in opts.eps_schedule:
        for _ in range(opts.multiplier_updates):
            def phi(flat):
                bb = flat.reshape(n, n)
                r = x_all @ bb
                sm = np.sqrt(r * r + eps * eps)
                norms = sm.sum(axis=1)
                c_eq = norms[:n_eq] - 1.0
                g_in = norms[n_eq:] - 1.0
                det, grad_f = _cofactor_grad(bb)
                val = det * det + float(lam_eq @ c_eq) + 0.5 * mu * float(c_eq @ c_eq)
                w = np.concatenate([lam_eq + mu * c_eq, np.zeros(n_in)])
                if n_in:
                    viol = lam_in - mu * g_in
                    act = viol > 0
                    val += float(np.sum(viol[act] ** 2 - lam_in[act] ** 2)) / (2 * mu)
                    w[n_eq:] = np.where(act, -viol, 0.0)
                grad = grad_f + x_all.T @ ((r / sm) * w[:, None])
                return val, grad.ravel()

            res = scipy.optimize.minimize(
                phi, b.ravel(), jac=True, method="L-BFGS-B",
                options={"maxiter": opts.inner_maxiter, "ftol": 1e-14, "gtol": 1e-12})
            b = res.x.reshape(n, n)
            r = x_all @ b
            norms = np.abs(r).sum(axis=1)
            c_eq = norms[:n_eq] - 1.0
            lam_eq = lam_eq + mu * c_eq
            if n_in:
                g_in = norms[n_eq:] - 1.0
                lam_in = np.maximum(0.0, lam_in - mu * g_in)
            worst = max(np.abs(c_eq).max(initial=0.0),
                        -min(0.0, (norms[n_eq:] - 1.0).min(initial=0.0) if n_in else 0.0))
            if worst < 10 * eps * eps + 1e-12:
                break
            mu = min(mu * 4.0, 1e9)
    if np.abs(np.abs(x_eq @ b).sum(axis=1) - 1.0).max() > 1e-4:
        raise Infeasible("equality constraints did not converge")
    return b


def _polish(b: np.ndarray, x_eq: np.ndarray, x_in: np.ndarray,
            opts: SolveOptions, act_tol: float = 1e-5):
    """Freeze coordinate signs, Newton-solve the smooth KKT system."""
    n = b.shape[0]
    rows = [x_eq]
    if len(x_in):
        norms = np.abs(x_in @ b).sum(axis=1)
        rows.append(x_in[norms < 1.0 + act_tol])
    x_act = np.concatenate(rows, axis=0)
    r = x_act @ b
    signs = np.sign(r) * (np.abs(r) > 1e-7)
    a = np.einsum("ki,kj->kij", x_act, signs).reshape(len(x_act), n * n)
    m = len(x_act)
    lam = np.zeros(m)
    flat = b.ravel().copy()
    res_norm = np.inf
    for _ in range(60):
        bb = flat.reshape(n, n)
        det = float(np.linalg.det(bb))
        if abs(det) < 1e-14:
            break
        binv = np.linalg.inv(bb)
        _, grad_f = _cofactor_grad(bb)
        stat = grad_f.ravel() + a.T @ lam
        prim = a @ flat - 1.0
        res_norm = max(np.abs(stat).max(), np.abs(prim).max())
        if res_norm < 1e-12:
            break
        # Hessian of det^2 in closed form from B^{-1}
        h = 2.0 * det * det * (
            2.0 * np.einsum("ji,lk->ijkl", binv, binv)
            - np.einsum("jk,li->ijkl", binv, binv)
        ).reshape(n * n, n * n)
        kkt = np.zeros((n * n + m, n * n + m))
        kkt[: n * n, : n * n] = h + 1e-12 * np.eye(n * n)
        kkt[: n * n, n * n:] = a.T
        kkt[n * n:, : n * n] = a
        rhs = -np.concatenate([stat, prim])
        try:
            step = np.linalg.solve(kkt, rhs)
        except np.linalg.LinAlgError:
            kkt[: n * n, : n * n] += 1e-6 * np.eye(n * n)
            step = np.linalg.lstsq(kkt, rhs, rcond=None)[0]
        scale = 1.0
        for _ in range(30):
            trial = flat + scale * step[: n * n]
            tb = trial.reshape(n, n)
            tdet = float(np.linalg.det(tb))
            if abs(tdet) > 1e-14:
                tlam = lam + scale * step[n * n:]
                _, tg = _cofactor_grad(tb)
                tres = max(np.abs(tg.ravel() + a.T @ tlam).max(),
                           np.abs(a @ trial - 1.0).max())
                if tres < res_norm * (1 - 1e-4 * scale) or tres < 1e-12:
                    flat, lam, res_norm = trial, tlam, tres
                    break
            scale *= 0.5
        else:
            break
    return flat.reshape(n, n), float(res_norm)


def _violations(b: np.ndarray, known: set, tol: float = 1e-9):
    """Coefficient vectors of lattice points with L1 norm below 1 - tol."""
    lat = Lattice(b, exact=False)
    _, coeffs = geometry.enumerate_within_l1(lat, 1.0 - tol,
                                             include_negatives=False)
    fresh = []
    for row in coeffs:
        c = _canonical(row)
        if c not in known:
            fresh.append(c)
    return fresh


def fingerprint(b: np.ndarray, max_norm: float = 1.35,
                bins: int = 5) -> tuple:
    hist = geometry.l1_histogram(Lattice(b, exact=False), max_norm, tol=1e-5)
    return tuple((round(v, 5), c) for v, c in hist[:bins])


def solve_configuration(cfg: MinimalConfiguration,
                        opts: SolveOptions | None = None) -> PackingSolution:
    opts = opts or SolveOptions()
    n = cfg.dim
    rng = np.random.default_rng(opts.seed)
    m_rows = np.array(cfg.vectors, dtype=float)
    m_set = {_canonical(v) for v in cfg.vectors}
    guard = [np.array(v, dtype=float) for v in
             candidate_pool(n, opts.coeff_cap, opts.half_box)
             if _canonical(v) not in m_set]
    s_rows = np.array(guard, dtype=float).reshape(-1, n)

    if opts.init_basis is not None:
        b = np.array(opts.init_basis, dtype=float)
        b = b + opts.init_sigma * rng.standard_normal((n, n))
    else:
        b = np.eye(n) + opts.init_sigma * rng.standard_normal((n, n))
    b /= np.abs(b).sum(axis=1, keepdims=True)  # rows onto the unit L1 sphere

    known = set(m_set)
    known.update(_canonical(v) for v in guard)
    kkt = np.inf
    for _ in range(opts.max_lazy_rounds):
        b = _auglag(b, m_rows, s_rows, opts)
        b, kkt = _polish(b, m_rows, s_rows, opts)
        fresh = _violations(b, known)
        if not fresh:
            break
        for v in fresh:
            known.add(v)
        s_rows = np.concatenate([s_rows, np.array(fresh, dtype=float)], axis=0)
    else:
        raise NoConvergence("lazy admissibility loop did not settle")

    lat = Lattice(b, exact=False)
    mvs = geometry.l1_minimum(lat)
    lam1 = float(mvs.lambda1)
    if lam1 < 0.5:
        raise Infeasible("collapsed lattice")
    b = b / lam1  # certify admissibility exactly at lambda1 = 1
    lat = Lattice(b, exact=False)
    mvs = geometry.l1_minimum(lat)
    report = geometry.packing_report(lat)
    attained = tuple(sorted(_canonical(v) for v in mvs.pair_representatives()))
    det = float(abs(np.linalg.det(b)))
    return PackingSolution(
        basis=b,
        achieved_det=det,
        density=report.density,
        report=report,
        configuration=MinimalConfiguration(dim=n, vectors=attained),
        kkt_residual=kkt,
        fingerprint=fingerprint(b),
    )


# ---------------------------------------------------------------------------
# search driver and criticality verification


@dataclass
class SearchOptions:
    coeff_cap: int = 2
    half_box: bool = False
    count_target: int = 40
    multistarts: int = 3
    seed: int = 0
    threads: int = 1
    keep: int = 10
    extra_sizes: tuple[int, ...] = (0, 1)
    solve: SolveOptions = field(default_factory=SolveOptions)


def search(n: int, opts: SearchOptions | None = None) -> list[PackingSolution]:
    """Enumerate configurations, solve each from several starts, and return
    the surviving solutions ranked by certified density (deduplicated by
    theta-prefix fingerprint; deterministic for a fixed seed)."""
    opts = opts or SearchOptions()
    configs = list(enumerate_configurations(
        n, opts.coeff_cap, opts.count_target, seed=opts.seed,
        half_box=opts.half_box, extra_sizes=opts.extra_sizes))
    tasks = []
    for ci, cfg in enumerate(configs):
        for si in range(opts.multistarts):
            seed = (opts.seed * 1000003 + ci * 1009 + si * 9176) % (2 ** 63)
            tasks.append((ci, si, cfg, replace(
                opts.solve, coeff_cap=opts.coeff_cap, half_box=opts.half_box,
                seed=seed)))

    def run(task):
        ci, si, cfg, sopts = task
        try:
            sol = solve_configuration(cfg, sopts)
        except (Infeasible, NoConvergence):
            return None
        return (ci, si, sol)

    if opts.threads > 1:
        with ThreadPoolExecutor(max_workers=opts.threads) as pool:
            results = list(pool.map(run, tasks))
    else:
        results = [run(t) for t in tasks]

    scored = [(r[2].density, r[2].fingerprint, r[0], r[1], r[2])
              for r in results if r is not None]
    scored.sort(key=lambda t: (-t[0], t[1], t[2], t[3]))
    out: list[PackingSolution] = []
    seen_fp = set()
    for _, fp, _, _, sol in scored:
        if fp in seen_fp:
            continue
        seen_fp.add(fp)
        out.append(sol)
        if len(out) >= opts.keep:
            break
    return out


def verify_local_criticality(sol: PackingSolution, trials: int = 20,
                             magnitude: float = 1e-4, seed: int = 7,
                             det_slack: float = 1e-8) -> CriticalityDiagnostics:
    """Necessary conditions for local criticality plus random feasible
    perturbation probing (diagnostics, not a certificate)."""
    n = sol.basis.shape[0]
    lat = sol.lattice()
    mvs = geometry.l1_minimum(lat)
    kappa = mvs.kissing
    pairs = geometry.halfnorm_pair_count(lat, mvs)
    base_det = float(abs(np.linalg.det(sol.basis)))
    rng = np.random.default_rng(seed)
    worst_drop = 0.0
    for _ in range(trials):
        pert = sol.basis + magnitude * rng.standard_normal((n, n))
        plat = Lattice(pert, exact=False)
        lam1 = float(geometry.l1_minimum(plat).lambda1)
        adm_det = float(abs(np.linalg.det(pert))) / lam1 ** n
        worst_drop = max(worst_drop, base_det - adm_det)
    return CriticalityDiagnostics(
        well_rounded=geometry._coeff_rank(mvs.coeffs) == n,
        kissing_lower_ok=kappa >= n * (n + 1),
        kissing_upper_ok=kappa <= 3 ** n - 1,
        halfnorm_pairs_ok=pairs >= n * (n - 1) // 2,
        perturbation_stable=worst_drop <= det_slack,
        kissing=kappa,
        halfnorm_pairs=pairs,
        worst_perturbed_det_drop=worst_drop,
    )
