"""Random instance generation and the seeded verification sweep."""

from __future__ import annotations

import json
import math
import warnings
from concurrent.futures import ThreadPoolExecutor
from dataclasses import asdict, dataclass, field, fields
from pathlib import Path

import numpy as np

from .bounds import (
    BoundReport,
    Verdict,
    bound_chain_verify,
    corollary1_verify,
    corollary2_verify,
    robust_bound_verify,
    theorem1_verify,
    theorem3_verify,
    verify_io_representation,
)
from .fundamental import counterexample_run, image_equality_check, rank_condition_check
from .linalg import inv_sqrt_psd, lambda_max, singular_values
from .lti import (
    LtiSystem,
    annihilating_polynomial,
    controllability_matrix,
    is_controllable,
    is_output_reachable,
    markov_parameters,
    simulate,
)
from .pe import PeCertificate, kpe_check, pe_gram, pe_order_check
from .structmat import (
    RankDeficiencyWarning,
    build_M,
    build_M_kron_d,
    build_M_kron_Dbar,
    build_Z,
)

ALL_CHECKS = (
    "lemma1",
    "eq7",
    "thm1",
    "cor1",
    "eq13",
    "eq14",
    "cor2",
    "thm3",
    "prop1",
    "robust",
    "counterexample",
)
DEFAULT_CHECKS = ("thm1", "cor1", "eq13", "eq14", "cor2", "thm3", "prop1")


class GenerationError(RuntimeError):
    """No system satisfying the requested predicates was found."""


@dataclass(frozen=True)
class RandomModelSpec:
    n: int
    m: int
    p: int
    spectral_radius_cap: float = 0.95
    ctrb_floor: float = 1e-3
    require_output_reachable: bool = True
    zero_feedthrough_prob: float = 0.25
    max_attempts: int = 100


def generate_system(spec: RandomModelSpec, seed) -> LtiSystem:
    """Gaussian ``(A, B, C, D)`` with ``A`` rescaled below the spectral-radius cap.

    Samples are rejected until ``sigma_min`` of the controllability matrix
    reaches ``ctrb_floor`` (and, if required, the system is output reachable).
    ``seed`` may be an int, a ``SeedSequence`` or a ``Generator``.
    """
    rng = seed if isinstance(seed, np.random.Generator) else np.random.default_rng(seed)
    n, m, p = spec.n, spec.m, spec.p
    for _ in range(spec.max_attempts):
        A = rng.standard_normal((n, n))
        if n:
            rho = float(np.max(np.abs(np.linalg.eigvals(A))))
            if rho > 0:
                A *= spec.spectral_radius_cap * rng.uniform(0.5, 1.0) / rho
        B = rng.standard_normal((n, m))
        C = rng.standard_normal((p, n))
        if rng.uniform() < spec.zero_feedthrough_prob:
            D = np.zeros((p, m))
        else:
            D = rng.standard_normal((p, m))
        sys = LtiSystem(A, B, C, D)
        if n:
            smin = singular_values(controllability_matrix(sys))[n - 1]
            if not smin >= spec.ctrb_floor or not is_controllable(sys):
                continue
        if spec.require_output_reachable and not is_output_reachable(sys):
            continue
        return sys
    raise GenerationError(f"no admissible system after {spec.max_attempts} attempts: {spec}")


def generate_pe_input(m: int, N: int, order: int, K_floor=None, seed=None) -> tuple[np.ndarray, PeCertificate]:
    """Gaussian input rescaled so its order-``order`` Gram dominates ``K_floor``.

    The scale is the smallest one achieving dominance (up to a ``1e-9``
    relative guard). A zero or missing ``K_floor`` leaves the raw draw.
    """
    if N < (m + 1) * order - 1:
        raise ValueError(f"N={N} too short for order {order} with m={m}; need {(m + 1) * order - 1}")
    rng = seed if isinstance(seed, np.random.Generator) else np.random.default_rng(seed)
    u = rng.standard_normal((N, m))
    size = m * order
    K = np.zeros((size, size)) if K_floor is None else np.atleast_2d(np.asarray(K_floor, float))
    if K.shape != (size, size):
        raise ValueError(f"K_floor must be {(size, size)}, got {K.shape}")
    if np.any(K):
        W = inv_sqrt_psd(pe_gram(u, order))
        need = lambda_max(W @ K @ W)
        if need > 0:
            u = u * (math.sqrt(need) * (1 + 1e-9))
    return u, kpe_check(u, order, K)


@dataclass
class SweepConfig:
    seed: int = 0
    trials: int = 200
    n_range: tuple[int, int] = (1, 5)
    m_range: tuple[int, int] = (1, 3)
    p_range: tuple[int, int] = (1, 3)
    N: int | None = None
    L: int = 2
    rank_rtol: float = 1e-10
    psd_rtol: float = 1e-9
    which: tuple[str, ...] = DEFAULT_CHECKS
    workers: int = 1
    spectral_radius_cap: float = 0.95
    ctrb_floor: float = 1e-3
    robust_eps: float = 1e-2

    def __post_init__(self):
        self.n_range = tuple(self.n_range)
        self.m_range = tuple(self.m_range)
        self.p_range = tuple(self.p_range)
        self.which = tuple(self.which)
        self.validate()

    def validate(self) -> None:
        if self.trials < 1:
            raise ValueError("trials must be at least 1")
        for name in ("n_range", "m_range", "p_range"):
            lo, hi = getattr(self, name)
            if lo > hi:
                raise ValueError(f"{name} is empty: {lo} > {hi}")
        if self.n_range[0] < 0 or self.m_range[0] < 1 or self.p_range[0] < 1:
            raise ValueError("dimension ranges must satisfy n >= 0, m >= 1, p >= 1")
        if self.L < 1:
            raise ValueError("L must be positive")
        if self.N is not None and self.N < self.L + self.n_range[1]:
            raise ValueError(f"N={self.N} must be at least L + n_max = {self.L + self.n_range[1]}")
        unknown = set(self.which) - set(ALL_CHECKS)
        if unknown:
            raise ValueError(f"unknown checks: {sorted(unknown)}")
        if not self.which:
            raise ValueError("nothing to verify")
        if self.workers < 1:
            raise ValueError("workers must be at least 1")

    @classmethod
    def from_dict(cls, doc: dict) -> "SweepConfig":
        known = {f.name for f in fields(cls)}
        extra = set(doc) - known
        if extra:
            raise ValueError(f"unknown config keys: {sorted(extra)}")
        return cls(**doc)

    @classmethod
    def from_file(cls, path) -> "SweepConfig":
        try:
            doc = json.loads(Path(path).read_text())
        except json.JSONDecodeError as exc:
            raise ValueError(f"{path}: {exc}") from None
        return cls.from_dict(doc)

    def to_dict(self) -> dict:
        doc = asdict(self)
        for k in ("n_range", "m_range", "p_range", "which"):
            doc[k] = list(doc[k])
        return doc


@dataclass
class SweepResult:
    config: SweepConfig
    trials: list[list[BoundReport]] = field(default_factory=list)

    @property
    def reports(self) -> list[BoundReport]:
        return [r for trial in self.trials for r in trial]

    def summary(self) -> dict:
        counts = {v.value: 0 for v in Verdict}
        by_name: dict[str, dict[str, int]] = {}
        for rep in self.reports:
            counts[rep.verdict.value] += 1
            slot = by_name.setdefault(rep.name, {v.value: 0 for v in Verdict})
            slot[rep.verdict.value] += 1
        return {
            "seed": self.config.seed,
            "trials": len(self.trials),
            **counts,
            "by_name": {k: by_name[k] for k in sorted(by_name)},
        }

    @property
    def exit_code(self) -> int:
        return 0 if self.summary()["fails"] == 0 else 1


def _simple_report(name, ok, margin, tol, ctx, steps=None, reason="") -> BoundReport:
    return BoundReport(
        name=name,
        verdict=Verdict.HOLDS if ok else Verdict.FAILS,
        margin=float(margin),
        tol=float(tol),
        steps=steps or {},
        context=ctx,
        reason=reason,
    )


def counterexample_report() -> BoundReport:
    ce = counterexample_run()
    return _simple_report(
        "counterexample",
        ce.falsified,
        margin=-ce.Mu_rest_max,
        tol=1e-12,
        ctx={"dims": [2, 1, 2], "seed": None},
        steps={"mu_gram_rank": ce.mu_gram_rank, "min_output_rank": min(p["rank"] for p in ce.probes)},
        reason=ce.verdict,
    )


def run_trial(config: SweepConfig, index: int, seed_seq: np.random.SeedSequence) -> list[BoundReport]:
    rng = np.random.default_rng(seed_seq)
    seed = int(seed_seq.generate_state(1, np.uint64)[0])
    n = int(rng.integers(config.n_range[0], config.n_range[1] + 1))
    m = int(rng.integers(config.m_range[0], config.m_range[1] + 1))
    p = int(rng.integers(config.p_range[0], config.p_range[1] + 1))
    p = min(p, m * (n + 1))
    L = config.L
    spec = RandomModelSpec(n, m, p, config.spectral_radius_cap, config.ctrb_floor)
    sys = generate_system(spec, rng)
    N = config.N or 20 * (L + n)
    u = rng.standard_normal((N, m))
    x0 = rng.standard_normal(n)
    kw = dict(rank_rtol=config.rank_rtol, psd_rtol=config.psd_rtol, seed=seed)
    ctx = {"dims": [n, m, p], "seed": seed, "N": N, "trial": index}
    out: list[BoundReport] = []
    for name in config.which:
        if name == "counterexample":
            continue
        if name == "lemma1":
            _, y = simulate(sys, x0, u)
            res = verify_io_representation(sys, x0, u)
            tol = 1e-8 * (1 + float(np.max(np.abs(y))))
            out.append(_simple_report(name, res <= tol, -res, tol, dict(ctx)))
        elif name == "eq7":
            d, G = annihilating_polynomial(sys), markov_parameters(sys)
            M0 = build_M(sys)
            scale = max(1.0, float(np.max(np.abs(M0))))
            err = max(
                float(np.max(np.abs(build_M_kron_d(d, G) - M0))),
                float(np.max(np.abs(build_M_kron_Dbar(d, G) - M0))),
            ) / scale
            out.append(_simple_report(name, err <= 1e-10, -err, 1e-10, dict(ctx)))
        elif name == "thm1":
            out.append(theorem1_verify(sys, x0, u, **kw))
        elif name == "cor1":
            out.append(corollary1_verify(sys, x0, u, **kw))
        elif name in ("eq13", "eq14"):
            out.append(bound_chain_verify(sys, x0, u, name, **kw))
        elif name == "cor2":
            out.append(corollary2_verify(sys, x0, u, **kw))
        elif name == "thm3":
            out.append(theorem3_verify(sys, x0, u, L, **kw))
        elif name == "prop1":
            out.append(_prop1_report(sys, x0, u, L, config, dict(ctx)))
        elif name == "robust":
            out.append(_robust_report(sys, x0, u, L, config, rng, kw))
    for rep in out:
        rep.context.setdefault("seed", seed)
        rep.context.setdefault("trial", index)
    return out


def _prop1_report(sys, x0, u, L, config, ctx) -> BoundReport:
    """Rank condition implies image equality; PE input on a controllable
    system implies the rank condition."""
    x, _ = simulate(sys, x0, u)
    rank_ok, smin = rank_condition_check(x, u, L, config.rank_rtol)
    image_ok = image_equality_check(sys, x0, u, L, config.rank_rtol)
    pe_ok = pe_order_check(u, L + sys.n, config.rank_rtol)
    ctrb = is_controllable(sys, config.rank_rtol)
    ok = (not rank_ok or image_ok) and (not (pe_ok and ctrb) or (rank_ok and image_ok))
    ctx.update(rank_condition=rank_ok, image_equality=image_ok, input_pe=pe_ok, L=L)
    return _simple_report("prop1", ok, smin, 0.0, ctx)


def _robust_report(sys, x0, u, L, config, rng, kw) -> BoundReport:
    eps = config.robust_eps
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", RankDeficiencyWarning)
        Z = build_Z(sys, L)
    E = rng.standard_normal(Z.shape)
    E *= (eps / 2) / singular_values(E)[0]
    return robust_bound_verify(sys, x0, u, L, None, Z + E, eps, **kw)


def run_sweep(config: SweepConfig) -> SweepResult:
    """Run every trial; reports are ordered by trial index regardless of
    completion order."""
    result = SweepResult(config)
    only_counterexample = set(config.which) == {"counterexample"}
    if only_counterexample:
        result.trials.append([counterexample_report()])
        return result
    children = np.random.SeedSequence(config.seed).spawn(config.trials)
    jobs = list(enumerate(children))
    if config.workers > 1:
        with ThreadPoolExecutor(config.workers) as pool:
            trials = list(pool.map(lambda job: run_trial(config, *job), jobs))
    else:
        trials = [run_trial(config, i, s) for i, s in jobs]
    if "counterexample" in config.which:
        trials.append([counterexample_report()])
    result.trials = trials
    return result
