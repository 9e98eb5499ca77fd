"""Run manifest checks and randomized property suites, producing reports."""
from __future__ import annotations

import json
import os
import random
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Callable, Iterable, Optional

from .brackets import (
    BracketContext,
    EXPLICIT_SEMI_MAX,
    BracketValueNotHamiltonian,
    D2_ham_associate,
    D2_semi_associate,
    Dk_ham_associate,
    Dk_semi_associate,
    UnsolvedArgument,
    bracket,
    jacobiator,
    sh_jacobi_check,
)
from .calculus import DiffForm, MultiVec, contraction, exterior_derivative, render_tensor
from .fixtures import HamiltonianGenerator, random_kernel_element, random_tensor, space as fixture_space
from .graded import Permutation, koszul_sign
from .identities import (
    contraction_composition,
    dd_zero,
    multi_rules,
    schouten_antisymmetry,
    schouten_jacobi,
    schouten_leibniz,
)
from .manifest import Check, Manifest
from .solver import (
    HamiltonianForm,
    NPlecticError,
    NPlecticSpace,
    Status,
    is_ham_associate,
    is_semi_associate,
    kernel_basis,
    module_action,
    validate_nplectic,
)

PASS, FAIL, UNSOLVABLE = "PASS", "FAIL", "UNSOLVABLE"

STATUS_TEXT = {
    Status.HAMILTONIAN: "Hamiltonian",
    Status.SEMI: "semi-Hamiltonian only",
    Status.NEITHER: "not semi-Hamiltonian",
}


@dataclass
class Record:
    id: str
    status: str
    payload: dict[str, str] = field(default_factory=dict)
    witness: Optional[str] = None

    def to_json(self) -> str:
        return json.dumps(
            {"id": self.id, "status": self.status, "payload": self.payload, "witness": self.witness},
            sort_keys=True,
        )


@dataclass
class Report:
    records: list[Record] = field(default_factory=list)

    def counts(self) -> dict[str, int]:
        out = {PASS: 0, FAIL: 0, UNSOLVABLE: 0}
        for r in self.records:
            out[r.status] += 1
        return out

    @property
    def ok(self) -> bool:
        return all(r.status == PASS for r in self.records)

    @property
    def exit_code(self) -> int:
        return 0 if self.ok else 1

    def summary(self) -> str:
        c = self.counts()
        return f"{len(self.records)} checks: {c[PASS]} PASS, {c[FAIL]} FAIL, {c[UNSOLVABLE]} UNSOLVABLE"

    def render(self) -> str:
        lines = []
        for r in self.records:
            lines.append(f"{r.status:<10} {r.id}")
            for key, value in r.payload.items():
                lines.append(f"    {key}: {value}")
            if r.witness:
                lines.append(f"    witness: {r.witness}")
        lines.append(self.summary())
        return "\n".join(lines) + "\n"

    def render_json(self) -> str:
        lines = [r.to_json() for r in self.records]
        c = self.counts()
        lines.append(json.dumps(
            {"id": "summary", "status": PASS if self.ok else FAIL,
             "payload": {k: str(v) for k, v in c.items()}, "witness": None},
            sort_keys=True,
        ))
        return "\n".join(lines) + "\n"


def thread_count(default: Optional[int] = None) -> int:
    """Worker count, capped by the ``NPLECTIC_THREADS`` environment variable."""
    raw = os.environ.get("NPLECTIC_THREADS")
    cap = None
    if raw:
        try:
            cap = max(1, int(raw))
        except ValueError:
            cap = None
    n = default or min(4, os.cpu_count() or 1)
    return min(n, cap) if cap else n


def _run_ordered(jobs: list[Callable[[], Record]], threads: Optional[int]) -> list[Record]:
    workers = thread_count(threads)
    if workers <= 1 or len(jobs) <= 1:
        return [job() for job in jobs]
    with ThreadPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(lambda job: job(), jobs))


def _text(t) -> str:
    return "none" if t is None else render_tensor(t)


def _describe(hf: HamiltonianForm) -> dict[str, str]:
    out = {"form": _text(hf.f), "status": STATUS_TEXT[hf.status]}
    if hf.degree is not None:
        out["symmetric degree"] = str(hf.degree)
    out["X"] = _text(hf.semi_associate)
    out["Y"] = _text(hf.ham_associate)
    return out


# -- manifest checks ------------------------------------------------------------------------


class _Runner:
    def __init__(self, manifest: Manifest, space: NPlecticSpace):
        self.m = manifest
        self.space = space
        self.ctx = BracketContext(space)

    def classify(self, c: Check) -> Record:
        hf = self.ctx.lift(self.m.forms[c.args[0]])
        payload = _describe(hf)
        witness = None
        if hf.semi_witness is not None:
            witness = hf.semi_witness.describe()
        elif hf.ham_witness is not None:
            witness = hf.ham_witness.describe()
        return Record("", PASS, payload, witness)

    def fundamental(self, c: Check) -> Record:
        x = self.m.fields[c.args[0]]
        f = self.m.forms[c.args[1]]
        n = self.space.n
        r, s = f.tensor_degree(), x.tensor_degree()
        payload = {"field": _text(x), "form": _text(f)}
        if r is None or s is None:
            return Record("", FAIL, payload, "field and form must be homogeneous")
        if s == n - r:
            payload["equation"] = "i_X omega = -df"
            ok = is_semi_associate(self.space, f, x)
        elif s == n + 1 - r:
            payload["equation"] = "i_Y omega = -f"
            ok = is_ham_associate(self.space, f, x)
        else:
            return Record("", FAIL, payload, f"field degree {s} fits neither pairing for a {r}-form")
        if ok:
            return Record("", PASS, payload)
        rhs = -exterior_derivative(f) if s == n - r else -f
        residual = contraction(x, self.space.omega) - rhs
        return Record("", FAIL, payload, f"left side minus right side = {_text(residual)}")

    def bracket(self, c: Check) -> Record:
        k, names = c.args
        ctx = BracketContext(self.space)  # own log, so concurrent checks stay separate
        value = bracket(ctx, [self.m.forms[a] for a in names])
        payload = _describe(value)
        failed = ctx.formula_log
        if failed:
            return Record("", FAIL, payload, "; ".join(failed))
        return Record("", PASS, payload)

    def jacobi(self, c: Check) -> Record:
        k, names = c.args
        hs = [self.ctx.lift(self.m.forms[a]) for a in names]
        if k == 3 and not all(h.is_hamiltonian for h in hs):
            rep = jacobiator(self.ctx, *hs)
            payload = {
                "jacobi sum": _text(rep.lhs_total),
                "lie-derivative side": _text(rep.rhs_total),
                "sides agree": str(rep.identity_holds),
                "closed": str(rep.anomaly_closed),
            }
            if not rep.identity_holds:
                return Record("", FAIL, payload, "Jacobi sum differs from the Lie-derivative expression")
            if not rep.anomaly_hamiltonian:
                return Record("", FAIL, payload, "Jacobiator not Hamiltonian: " + rep.anomaly_witness)
            return Record("", PASS, payload)
        for name, h in zip(names, hs):
            if not h.is_hamiltonian:
                return Record("", UNSOLVABLE, {}, f"{name} is {STATUS_TEXT[h.status]}")
        rep = sh_jacobi_check(self.ctx, hs)
        payload = {"sum": _text(rep.lhs_total), "terms": str(len(rep.per_term))}
        problems = []
        if not rep.is_zero:
            problems.append("strong homotopy Jacobi sum is nonzero")
        if k == 3:
            jac = jacobiator(self.ctx, *hs)
            payload["jacobiator"] = _text(jac.lhs_total)
            if not jac.identity_holds:
                problems.append("Jacobi sum differs from the Lie-derivative expression")
            if not (jac.anomaly_closed and jac.anomaly_associate_ok):
                problems.append("Jacobiator associate check failed")
        return Record("", FAIL if problems else PASS, payload, "; ".join(problems) or None)

    def kernel(self, c: Check) -> Record:
        k = c.args[0]
        basis = kernel_basis(self.space, k)
        payload = {"dimension": str(len(basis))}
        for i, xi in enumerate(basis, start=1):
            payload[f"xi{i}"] = _text(xi)
        return Record("", PASS, payload)

    def module(self, c: Check) -> Record:
        g = self.m.forms[c.args[0]].coefficient(())
        hf = self.ctx.lift(self.m.forms[c.args[1]])
        if not hf.is_hamiltonian:
            return Record("", UNSOLVABLE, {}, f"{c.args[1]} is {STATUS_TEXT[hf.status]}")
        act = module_action(self.space, g, hf)
        payload = _describe(act.result)
        payload["semi-associate sign"] = {1: "+e(g)", -1: "-e(g)", 0: "solver"}[act.semi_sign]
        if not act.result.is_hamiltonian:
            return Record("", FAIL, payload, "product is not Hamiltonian")
        return Record("", PASS, payload)

    def execute(self, index: int, c: Check) -> Record:
        handler = getattr(self, c.kind)
        try:
            rec = handler(c)
        except (UnsolvedArgument, BracketValueNotHamiltonian) as e:
            rec = Record("", UNSOLVABLE, {}, str(e))
        except (NPlecticError, ValueError) as e:
            rec = Record("", FAIL, {}, f"{type(e).__name__}: {e}")
        rec.id = f"{index:02d} {c.render()}"
        return rec


def _nplectic_record(m: Manifest) -> tuple[Record, Optional[NPlecticSpace]]:
    rec = Record("", PASS, {"dimension": str(m.dim), "plectic degree": str(m.plectic_degree)})
    if m.omega is None:
        rec.status, rec.witness = FAIL, "no omega given"
        return rec, None
    rec.payload["omega"] = _text(m.omega)
    try:
        sp = validate_nplectic(m.dim, m.plectic_degree, m.omega)
    except NPlecticError as e:
        rec.status = FAIL
        witness = getattr(e, "witness", None) or getattr(e, "kernel_vector", None)
        rec.witness = f"{type(e).__name__}: {e}" + (f" ({_text(witness)})" if witness is not None else "")
        return rec, None
    rec.payload["certificate"] = (
        "closed; contraction on vector fields is injective"
        + (" (exact rank)" if sp.certified else " (sampled points)")
    )
    return rec, sp


def run(manifest: Manifest, threads: Optional[int] = None) -> Report:
    """Execute the manifest's checks; records are ordered by directive index."""
    cert, sp = _nplectic_record(manifest)
    checks = list(manifest.checks)
    if not any(c.kind == "nplectic" for c in checks):
        checks.insert(0, Check("nplectic"))
    runner = _Runner(manifest, sp) if sp is not None else None

    def job_for(i: int, c: Check) -> Callable[[], Record]:
        if c.kind == "nplectic":
            def job() -> Record:
                return Record(f"{i:02d} nplectic", cert.status, dict(cert.payload), cert.witness)
        elif sp is None:
            def job() -> Record:
                return Record(f"{i:02d} {c.render()}", UNSOLVABLE, {}, "no valid n-plectic structure")
        else:
            def job() -> Record:
                return runner.execute(i, c)
        return job

    jobs = [job_for(i, c) for i, c in enumerate(checks, start=1)]
    return Report(_run_ordered(jobs, threads))


# -- randomized suites -------------------------------------------------------------------------


def _rng(seed: int, *labels) -> random.Random:
    return random.Random(":".join(str(x) for x in (seed,) + labels))


def _generator(sp: NPlecticSpace, seed: int, *labels) -> HamiltonianGenerator:
    gen = HamiltonianGenerator(sp, seed=0)
    gen.rng = _rng(seed, *labels)
    return gen


def _suite_sh_jacobi(sp: NPlecticSpace, seed: int, dim: int, count: int, label: str) -> Record:
    gen = _generator(sp, seed, label, "sh-jacobi", dim)
    nontrivial = 0
    for t in range(count):
        ctx = BracketContext(sp)
        rep = sh_jacobi_check(ctx, gen.tuple(dim))
        if not rep.is_zero:
            return Record("", FAIL, {"tuple": str(t)}, f"nonzero sum {_text(rep.lhs_total)}")
        if ctx.formula_log:
            return Record("", FAIL, {"tuple": str(t)}, "; ".join(ctx.formula_log))
        nontrivial += any(not v.is_zero() for v in rep.per_term.values())
    return Record("", PASS, {
        "tuples": str(count),
        "tuples with a nonzero term": str(nontrivial),
        "discard rate": f"{gen.discarded}/{gen.drawn}",
    })


def _suite_symmetry(sp: NPlecticSpace, seed: int, dim: int, count: int, label: str) -> Record:
    gen = _generator(sp, seed, label, "symmetry", dim)
    rng = _rng(seed, label, "symmetry-perm", dim)
    for t in range(count):
        ctx = BracketContext(sp)
        hs = gen.tuple(dim)
        images = list(range(1, dim + 1))
        rng.shuffle(images)
        s = Permutation(tuple(images))
        value = bracket(ctx, hs)
        permuted = bracket(ctx, list(s.apply(hs)))
        degs = [h.degree for h in hs]
        if value.f != permuted.f.scale(koszul_sign(s, degs)):
            return Record("", FAIL, {"tuple": str(t), "permutation": str(s.images)}, "graded symmetry violated")
        if value.f and value.f.tensor_degree() != sp.n - (sum(degs) - 1):
            return Record("", FAIL, {"tuple": str(t)}, "bracket value has the wrong degree")
    return Record("", PASS, {"tuples": str(count)})


def perturbed(sp: NPlecticSpace, hf: HamiltonianForm, rng: random.Random) -> HamiltonianForm:
    """The same form with its semi-associate shifted by a random kernel element."""
    x = hf.semi_associate
    k = x.tensor_degree() if x else sp.n - hf.f.tensor_degree()
    basis = kernel_basis(sp, k)
    if not basis:
        return hf
    shifted = x + random_kernel_element(rng, basis)
    return HamiltonianForm(hf.f, hf.plectic_degree, shifted, hf.ham_associate)


def _suite_well_defined(sp: NPlecticSpace, seed: int, dim: int, count: int, label: str) -> Record:
    gen = _generator(sp, seed, label, "kernel", dim)
    rng = _rng(seed, label, "kernel-shift", dim)
    shifted_any = 0
    for t in range(count):
        hs = gen.tuple(dim)
        value = bracket(BracketContext(sp), hs).f
        moved = [perturbed(sp, h, rng) for h in hs]
        shifted_any += any(a.semi_associate != b.semi_associate for a, b in zip(hs, moved))
        if bracket(BracketContext(sp), moved).f != value:
            return Record("", FAIL, {"tuple": str(t)}, "value changed under a kernel shift")
    return Record("", PASS, {"tuples": str(count), "tuples with a nontrivial shift": str(shifted_any)})


def _suite_jacobiator(sp: NPlecticSpace, seed: int, count: int, label: str) -> Record:
    gen = _generator(sp, seed, label, "jacobiator")
    for t in range(count):
        rep = jacobiator(BracketContext(sp), *gen.tuple(3))
        if not rep.identity_holds:
            return Record("", FAIL, {"tuple": str(t)}, "Jacobi sum differs from the Lie-derivative expression")
        if not (rep.anomaly_closed and rep.anomaly_associate_ok):
            return Record("", FAIL, {"tuple": str(t)}, "Jacobiator closedness or associate failed")
    return Record("", PASS, {"triples": str(count)})


def _explicit_associates(ctx: BracketContext, hs: list[HamiltonianForm]) -> dict[str, tuple[MultiVec, bool]]:
    """Explicit associates of ``D_k(hs)`` keyed by name, with the equation they solve."""
    k = len(hs)
    if k == 2:
        return {"X_D2": (D2_semi_associate(ctx, *hs), False), "Y_D2": (D2_ham_associate(ctx, *hs), True)}
    out = {f"Y_D{k}": (Dk_ham_associate(ctx, hs), True)}
    if k <= EXPLICIT_SEMI_MAX:
        out[f"X_D{k}"] = (Dk_semi_associate(ctx, hs), False)
    return out


def _suite_associates(sp: NPlecticSpace, seed: int, dim: int, count: int, label: str) -> Record:
    gen = _generator(sp, seed, label, "associates", dim)
    for t in range(count):
        ctx = BracketContext(sp)
        hs = gen.tuple(dim)
        value = bracket(ctx, hs)
        for name, (field_, second) in _explicit_associates(ctx, hs).items():
            solved = value.ham_associate if second else value.semi_associate
            check = is_ham_associate if second else is_semi_associate
            if not check(sp, value.f, field_):
                return Record("", FAIL, {"tuple": str(t)}, f"{name} fails substitution")
            if solved is None or not contraction(field_ - solved, sp.omega).is_zero():
                return Record("", FAIL, {"tuple": str(t)}, f"{name} differs from the solved field off the kernel")
    return Record("", PASS, {"tuples": str(count)})


def random_calculus_instance(rng: random.Random, dim: int, max_degree: int = 4):
    """Nonzero homogeneous ``X, Y, Z`` and ``alpha`` of tensor degree <= ``max_degree``."""
    top = min(max_degree, dim)

    def draw(cls, lo):
        while True:
            t = random_tensor(rng, cls, dim, rng.randint(lo, top), 2, 3)
            if t:
                return t

    return draw(MultiVec, 1), draw(MultiVec, 1), draw(MultiVec, 1), draw(DiffForm, 0)


def _suite_calculus(sp: NPlecticSpace, seed: int, count: int, label: str) -> Record:
    rng = _rng(seed, label, "calculus")
    for t in range(count):
        x, y, z, alpha = random_calculus_instance(rng, sp.dim)
        checks = dict(multi_rules(x, y, alpha))
        checks["Schouten antisymmetry"] = schouten_antisymmetry(x, y)
        checks["Schouten Leibniz"] = schouten_leibniz(x, y, z)
        checks["Schouten Jacobi"] = schouten_jacobi(x, y, z)
        vectors = [random_tensor(rng, MultiVec, sp.dim, 1, 2, 2) for _ in range(rng.randint(1, min(4, sp.dim)))]
        if all(vectors):
            checks["contraction composition"] = contraction_composition(vectors, alpha)
        checks["d d = 0"] = dd_zero(alpha)
        failed = [name for name, ok in checks.items() if not ok]
        if failed:
            return Record("", FAIL, {"instance": str(t)}, ", ".join(failed))
    return Record("", PASS, {"instances": str(count)})


def random_suite(space_id: str, seed: int = 0, dims: Iterable[int] = (1, 2, 3, 4, 5), count: int = 50,
                 threads: Optional[int] = None) -> Report:
    """Seeded property suites on a fixture space."""
    if count <= 0:
        return Report()
    sp = fixture_space(space_id)
    dims = sorted(set(dims))
    plan: list[tuple[str, Callable[[], Record]]] = []
    for d in dims:
        plan.append((f"sh-jacobi dim {d}", lambda d=d: _suite_sh_jacobi(sp, seed, d, count, space_id)))
    for d in dims:
        if d >= 2:
            plan.append((f"graded symmetry D{d}", lambda d=d: _suite_symmetry(sp, seed, d, count, space_id)))
    for d in dims:
        if d >= 2:
            plan.append((f"kernel shift D{d}", lambda d=d: _suite_well_defined(sp, seed, d, count, space_id)))
    for d in dims:
        if d >= 2:
            plan.append((f"explicit associates D{d}", lambda d=d: _suite_associates(sp, seed, d, count, space_id)))
    if 3 in dims:
        plan.append(("jacobiator identity", lambda: _suite_jacobiator(sp, seed, count, space_id)))
    plan.append(("calculus identities", lambda: _suite_calculus(sp, seed, count, space_id)))

    def wrap(i: int, name: str, fn: Callable[[], Record]) -> Callable[[], Record]:
        def job() -> Record:
            try:
                rec = fn()
            except (NPlecticError, ValueError) as e:
                rec = Record("", FAIL, {}, f"{type(e).__name__}: {e}")
            rec.id = f"{i:02d} {space_id} {name}"
            return rec
        return job

    jobs = [wrap(i, name, fn) for i, (name, fn) in enumerate(plan, start=1)]
    return Report(_run_ordered(jobs, threads))
