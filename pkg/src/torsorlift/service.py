"""Service layer: one handler per command, plus the HTTP app around them.

Each handler consumes a validated request model and produces a RunReport.
Reports are deterministic: any sampling derives its seed from the digest of
the canonical input JSON, and timings live outside the reproducible body.
The command line client calls these handlers in process; the HTTP service
exposes each at POST /v1/<command>.
"""

import hashlib
import json
import random
import time
from typing import Any, Dict, List, Optional

from fastapi import FastAPI
from fastapi.responses import JSONResponse
from pydantic import BaseModel, Field

from . import descent
from .documents import (
    CocycleDoc,
    CoverDoc,
    ExtensionDoc,
    InputError,
    LieDoc,
    TrivializationDoc,
    cocycle_to_doc,
    element_to_doc,
    parse_element,
)
from .lie import TensorLie, assemble_tilde, format_element
from .linfty import generalized_jacobi_check, mc_defect, morphism_check, package_lie
from .polyforms import PolyForm, all_faces, dupont_homotopy, integrate_to_cochain, whitney_form
from .scalars import format_scalar
from .simplicial import default_arity_bound, simplex_package
from .transfer import check_contraction, kuranishi_forward, kuranishi_inverse


class Check(BaseModel):
    name: str
    ok: bool
    detail: str = ""


class RunReport(BaseModel):
    command: str
    inputs_digest: str
    verdict: str
    checks: List[Check] = Field(default_factory=list)
    data: Dict[str, Any] = Field(default_factory=dict)
    timing_ms: Optional[int] = None

    def summary(self):
        lines = ["%s: %s" % (self.command, self.verdict)]
        for c in self.checks:
            lines.append("  [%s] %s%s" % ("ok" if c.ok else "FAIL", c.name,
                                          (" - " + c.detail) if c.detail else ""))
        return "\n".join(lines)


def _digest(payload):
    body = json.dumps(payload, sort_keys=True, separators=(",", ":"), default=str)
    return hashlib.sha256(body.encode()).hexdigest()[:16]


def _seed(digest):
    return int(digest[:12], 16)


def _finish(command, digest, checks, data=None, t0=None, verdict=None):
    if verdict is None:
        verdict = "pass" if all(c.ok for c in checks) else "fail"
    report = RunReport(command=command, inputs_digest=digest, verdict=verdict,
                       checks=checks, data=data or {})
    if t0 is not None:
        report.timing_ms = int((time.time() - t0) * 1000)
    return report


# ----------------------------------------------------------------------
# request models


class CheckLieRequest(BaseModel):
    lie: LieDoc


class CheckExtensionRequest(BaseModel):
    extension: ExtensionDoc


class BchRequest(BaseModel):
    lie: LieDoc
    a: Any
    b: Any


class DupontRequest(BaseModel):
    n: int = Field(ge=1, le=3)
    probe_degree: int = Field(default=3, ge=1, le=4)


class TransferRequest(BaseModel):
    lie: LieDoc
    simplex: int = Field(default=1, ge=1, le=3)
    arity: int = Field(default=3, ge=1, le=4)


class KuranishiRequest(BaseModel):
    lie: LieDoc
    simplex: int = Field(default=1, ge=1, le=2)
    samples: int = Field(default=5, ge=1, le=50)


class CechRequest(BaseModel):
    cover: CoverDoc
    lie: LieDoc
    jacobi_arity: int = Field(default=3, ge=1, le=4)


class McCheckRequest(BaseModel):
    cover: CoverDoc
    lie: LieDoc
    cocycle: CocycleDoc


class CocycleVerifyRequest(BaseModel):
    cover: CoverDoc
    lie: LieDoc
    cocycle: CocycleDoc


class TrivializeRequest(BaseModel):
    cover: CoverDoc
    lie: LieDoc
    cocycle: CocycleDoc
    trivialization: TrivializationDoc


class LiftSolveRequest(BaseModel):
    cover: CoverDoc
    extension: ExtensionDoc
    cocycle: CocycleDoc


class LiftVerifyRequest(BaseModel):
    cover: CoverDoc
    extension: ExtensionDoc
    cocycle: CocycleDoc
    lift: CocycleDoc


class EquivVerifyRequest(BaseModel):
    cover: CoverDoc
    extension: ExtensionDoc
    cocycle: CocycleDoc
    lift: CocycleDoc
    lift2: CocycleDoc
    trivialization: TrivializationDoc


class BijectionTestRequest(BaseModel):
    cover: CoverDoc
    extension: ExtensionDoc
    samples: int = Field(default=5, ge=1, le=50)


# ----------------------------------------------------------------------
# handlers


def run_check_lie(req: CheckLieRequest) -> RunReport:
    t0 = time.time()
    digest = _digest(req.model_dump(by_alias=True))
    lie = req.lie.to_lie()
    report = lie.jacobi_report()
    checks = [Check(name="lie-axioms", ok=report == [],
                    detail="; ".join("%s at %s" % r for r in report[:5]))]
    computed = lie.computed_class()
    ok = computed is not None and computed <= lie.declared_class
    detail = "computed class %s, declared %d" % (computed, lie.declared_class)
    checks.append(Check(name="nilpotency", ok=ok, detail=detail))
    return _finish("check-lie", digest, checks, {"computed_class": computed}, t0)


def run_check_extension(req: CheckExtensionRequest) -> RunReport:
    t0 = time.time()
    digest = _digest(req.model_dump(by_alias=True))
    ext = req.extension.to_extension()
    bad = ext.validate()
    checks = [Check(name="cocycle-identities", ok=bad == [],
                    detail="; ".join("%s at %s" % b for b in bad[:5]))]
    assembled = None
    if not bad:
        try:
            tilde = assemble_tilde(ext)
            assembled = tilde.declared_class
            checks.append(Check(name="assembled-nilpotent", ok=True,
                                detail="class %d" % tilde.declared_class))
        except ValueError as exc:
            checks.append(Check(name="assembled-nilpotent", ok=False, detail=str(exc)))
    return _finish("check-extension", digest, checks, {"assembled_class": assembled}, t0)


def run_bch(req: BchRequest) -> RunReport:
    t0 = time.time()
    digest = _digest(req.model_dump(by_alias=True))
    lie = req.lie.to_lie()
    bad = lie.jacobi_report()
    if bad or lie.computed_class() is None:
        raise InputError("algebra fails the Lie axioms or nilpotency")
    from .lie import TRIVIAL_COEFFICIENTS

    a = parse_element(req.a, lie, TRIVIAL_COEFFICIENTS)
    b = parse_element(req.b, lie, TRIVIAL_COEFFICIENTS)
    T = TensorLie(lie)
    out = T.bch(a, b)
    pretty = format_element({g: c for (g, _), c in out.items()})
    checks = [Check(name="series-terminated", ok=True)]
    return _finish("bch", digest, checks,
                   {"result": element_to_doc(out), "pretty": pretty}, t0)


def run_dupont_selftest(req: DupontRequest) -> RunReport:
    t0 = time.time()
    digest = _digest(req.model_dump())
    n = req.n
    import itertools as it

    probes = []
    for total in range(req.probe_degree + 1):
        for exps in it.product(range(total + 1), repeat=n):
            if sum(exps) != total:
                continue
            for k in range(n + 1):
                for word in it.combinations(range(1, n + 1), k):
                    probes.append(PolyForm.monomial(n, exps, word))

    def EI(form):
        total = PolyForm.zero(n)
        for face in all_faces(n):
            v = form.integrate_over_face(face)
            if v:
                total = total + whitney_form(n, face).scale(v)
        return total

    K = dupont_homotopy
    fails = {"homotopy": 0, "K-squared": 0, "K-after-inclusion": 0,
             "integral-after-K": 0, "retraction": 0}
    for p in probes:
        if K(p.de_rham()) + K(p).de_rham() != EI(p) - p:
            fails["homotopy"] += 1
        if not K(K(p)).is_zero():
            fails["K-squared"] += 1
        if integrate_to_cochain(K(p)):
            fails["integral-after-K"] += 1
    for face in all_faces(n):
        w = whitney_form(n, face)
        if not K(w).is_zero():
            fails["K-after-inclusion"] += 1
        if integrate_to_cochain(w) != {tuple(face): 1}:
            fails["retraction"] += 1
    checks = [Check(name=name, ok=count == 0, detail="" if not count else "%d probes fail" % count)
              for name, count in fails.items()]
    return _finish("dupont-selftest", digest, checks, {"probes": len(probes)}, t0)


def _structure_for(lie_doc, check=True):
    lie = lie_doc.to_lie()
    if check:
        bad = lie.jacobi_report()
        if bad or lie.computed_class() is None:
            raise InputError("algebra fails the Lie axioms or nilpotency")
    return package_lie(lie)


def run_transfer(req: TransferRequest) -> RunReport:
    t0 = time.time()
    digest = _digest(req.model_dump(by_alias=True))
    L = _structure_for(req.lie)
    bound = max(req.arity, default_arity_bound(L))
    pkg = simplex_package(L, req.simplex, bound)
    checks = [Check(name="contraction-identities", ok=check_contraction(pkg.C) == [])]
    rep = generalized_jacobi_check(pkg.structure_W(), req.arity)
    checks.append(Check(name="induced-jacobi", ok=rep == [],
                        detail="" if not rep else "%d words fail" % len(rep)))
    repf = morphism_check(pkg.morphism_f(), min(3, req.arity))
    checks.append(Check(name="inclusion-morphism", ok=repf == [],
                        detail="" if not repf else "%d words fail" % len(repf)))
    data = {"structure": pkg.structure_W().serialize()}
    return _finish("transfer", digest, checks, data, t0)


def run_kuranishi(req: KuranishiRequest) -> RunReport:
    t0 = time.time()
    digest = _digest(req.model_dump(by_alias=True))
    L = _structure_for(req.lie)
    bound = default_arity_bound(L)
    pkg = simplex_package(L, req.simplex, bound)
    rng = random.Random(_seed(digest))
    from .simplicial import horn_package

    failures = 0
    for _ in range(req.samples):
        a = {k: rng.randint(-2, 2) for k in L.space.basis if rng.random() < 0.8}
        a = {k: v for k, v in a.items() if v}
        datum = {((1,), k): v for k, v in a.items()}
        hp = horn_package(L, req.simplex, 0, bound)
        try:
            y = kuranishi_inverse(hp, {}, datum, check=False)
            x = kuranishi_inverse(pkg, y, None)
            y2, k2 = kuranishi_forward(pkg, x)
            if y2 != y or not pkg.V.is_zero(k2):
                failures += 1
        except AssertionError:
            failures += 1
    checks = [Check(name="round-trips", ok=failures == 0,
                    detail="%d/%d samples" % (req.samples - failures, req.samples))]
    return _finish("kuranishi", digest, checks, {"samples": req.samples}, t0)


def run_cech(req: CechRequest) -> RunReport:
    t0 = time.time()
    digest = _digest(req.model_dump(by_alias=True))
    nerve = req.cover.to_nerve()
    lie = req.lie.to_lie()
    descent.build_semicosimplicial(nerve, lie)
    st = descent.cech_structure(nerve, lie)
    rep = generalized_jacobi_check(st, req.jacobi_arity)
    checks = [
        Check(name="semicosimplicial-identities", ok=True),
        Check(name="jacobi", ok=rep == [], detail="" if not rep else "%d words fail" % len(rep)),
    ]
    data = {"dimension": st.space.dim, "max_arity": st.max_arity,
            "faces": len(nerve.faces)}
    return _finish("cech", digest, checks, data, t0)


def run_cocycle_verify(req: CocycleVerifyRequest) -> RunReport:
    t0 = time.time()
    digest = _digest(req.model_dump(by_alias=True))
    nerve = req.cover.to_nerve()
    lie = req.lie.to_lie()
    phi = req.cocycle.to_cocycle(nerve, lie)
    bad = descent.verify_group_cocycle(nerve, lie, phi)
    checks = [Check(name="group-cocycle", ok=bad == [],
                    detail="; ".join("triangle %s" % (t,) for _, t in bad[:6]))]
    return _finish("cocycle-verify", digest, checks, {"triangles": len(nerve.triangles())}, t0)


def run_mc_check(req: McCheckRequest) -> RunReport:
    t0 = time.time()
    digest = _digest(req.model_dump(by_alias=True))
    nerve = req.cover.to_nerve()
    lie = req.lie.to_lie()
    phi = req.cocycle.to_cocycle(nerve, lie)
    st = descent.cech_structure(nerve, lie)
    defect = mc_defect(st, phi.as_cech())
    group_bad = descent.verify_group_cocycle(nerve, lie, phi)
    checks = [
        Check(name="maurer-cartan", ok=not defect,
              detail="" if not defect else "%d nonzero components" % len(defect)),
        Check(name="dictionary-agreement", ok=(not defect) == (group_bad == []),
              detail="group and Maurer-Cartan verdicts must coincide"),
    ]
    return _finish("mc-check", digest, checks, {}, t0)


def run_trivialize(req: TrivializeRequest) -> RunReport:
    t0 = time.time()
    digest = _digest(req.model_dump(by_alias=True))
    nerve = req.cover.to_nerve()
    lie = req.lie.to_lie()
    phi = req.cocycle.to_cocycle(nerve, lie)
    sigma = req.trivialization.to_sigma(nerve, lie)
    try:
        out = descent.apply_trivialization(nerve, lie, phi, sigma)
    except ValueError as exc:
        raise InputError(str(exc))
    checks = [Check(name="output-certified", ok=True)]
    return _finish("trivialize", digest, checks, {"cocycle": cocycle_to_doc(out, nerve)}, t0)


def run_lift_solve(req: LiftSolveRequest) -> RunReport:
    t0 = time.time()
    digest = _digest(req.model_dump(by_alias=True))
    nerve = req.cover.to_nerve()
    ext = req.extension.to_extension()
    phi = req.cocycle.to_cocycle(nerve, ext.g)
    bad = descent.verify_group_cocycle(nerve, ext.g, phi)
    if bad:
        raise InputError("cocycle fails certification: %s" % bad[:3])
    res = descent.solve_lift(nerve, ext, phi)
    if res.ok:
        checks = [Check(name="lift-found", ok=True),
                  Check(name="lift-certified", ok=True)]
        data = {"lift": cocycle_to_doc(res.lift, nerve)}
        return _finish("lift-solve", digest, checks, data, t0)
    checks = [Check(name="lift-found", ok=False,
                    detail="first unsolvable level %d" % res.level)]
    data = {
        "obstruction_level": res.level,
        "obstruction": {
            " ".join(str(v) for v in face): {str(key): format_scalar(c)}
            for (face, key), c in sorted(res.obstruction.items(), key=str)
        },
    }
    return _finish("lift-solve", digest, checks, data, t0, verdict="obstruction")


def run_lift_verify(req: LiftVerifyRequest) -> RunReport:
    t0 = time.time()
    digest = _digest(req.model_dump(by_alias=True))
    nerve = req.cover.to_nerve()
    ext = req.extension.to_extension()
    phi = req.cocycle.to_cocycle(nerve, ext.g)
    psi = req.lift.to_lift(nerve, ext.h)
    bad = descent.verify_group_cocycle(nerve, ext.g, phi)
    if bad:
        raise InputError("cocycle fails certification: %s" % bad[:3])
    report = descent.verify_twisted_cocycle(nerve, ext, phi, psi, check=False)
    checks = [Check(name="twisted-cocycle", ok=report == [],
                    detail="; ".join("triangle %s" % (t,) for _, t in report[:6]))]
    return _finish("lift-verify", digest, checks, {}, t0)


def run_equiv_verify(req: EquivVerifyRequest) -> RunReport:
    t0 = time.time()
    digest = _digest(req.model_dump(by_alias=True))
    nerve = req.cover.to_nerve()
    ext = req.extension.to_extension()
    phi = req.cocycle.to_cocycle(nerve, ext.g)
    psi = req.lift.to_lift(nerve, ext.h)
    psi2 = req.lift2.to_lift(nerve, ext.h)
    sigma = req.trivialization.to_sigma(nerve, ext.h)
    try:
        ok = descent.verify_twisted_equiv(nerve, ext, phi, psi, psi2, sigma)
    except ValueError as exc:
        raise InputError(str(exc))
    checks = [Check(name="twisted-equivalence", ok=ok)]
    return _finish("equiv-verify", digest, checks, {}, t0)


def run_bijection_test(req: BijectionTestRequest) -> RunReport:
    t0 = time.time()
    digest = _digest(req.model_dump(by_alias=True))
    nerve = req.cover.to_nerve()
    ext = req.extension.to_extension()
    rng = random.Random(_seed(digest))
    failures = 0
    setup = None
    for _ in range(req.samples):
        phi, psi = descent.random_certified_pair(nerve, ext, rng)
        setup = descent.curved_structure_on_h(nerve, ext, phi)
        try:
            alpha = descent.lift_bijection(setup, psi, "forward")
            back = descent.lift_bijection(setup, alpha, "backward")
            if back.edges != psi.edges:
                failures += 1
        except (ValueError, AssertionError):
            failures += 1
    checks = [Check(name="round-trips", ok=failures == 0,
                    detail="%d/%d samples" % (req.samples - failures, req.samples))]
    return _finish("bijection-test", digest, checks, {"samples": req.samples}, t0)


HANDLERS = {
    "check-lie": (CheckLieRequest, run_check_lie),
    "check-extension": (CheckExtensionRequest, run_check_extension),
    "bch": (BchRequest, run_bch),
    "dupont-selftest": (DupontRequest, run_dupont_selftest),
    "transfer": (TransferRequest, run_transfer),
    "kuranishi": (KuranishiRequest, run_kuranishi),
    "cech": (CechRequest, run_cech),
    "mc-check": (McCheckRequest, run_mc_check),
    "cocycle-verify": (CocycleVerifyRequest, run_cocycle_verify),
    "trivialize": (TrivializeRequest, run_trivialize),
    "lift-solve": (LiftSolveRequest, run_lift_solve),
    "lift-verify": (LiftVerifyRequest, run_lift_verify),
    "equiv-verify": (EquivVerifyRequest, run_equiv_verify),
    "bijection-test": (BijectionTestRequest, run_bijection_test),
}


def execute(command, payload):
    """Run one command on a raw JSON payload (the in-process entry point)."""
    if command not in HANDLERS:
        raise InputError("unknown command %r" % (command,))
    model, handler = HANDLERS[command]
    try:
        request = model.model_validate(payload)
    except Exception as exc:
        raise InputError(str(exc))
    return handler(request)


def create_app():
    app = FastAPI(title="torsorlift", version="0.1.0",
                  description="Exact homotopy transfer and torsor lift verdicts")

    for command, (model, handler) in HANDLERS.items():
        def make_endpoint(handler=handler, model=model):
            def endpoint(request: model):  # type: ignore[valid-type]
                try:
                    return handler(request)
                except InputError as exc:
                    return JSONResponse(status_code=422, content={
                        "command": "error", "verdict": "error", "detail": str(exc)})

            return endpoint

        app.add_api_route("/v1/%s" % command, make_endpoint(), methods=["POST"],
                          response_model=RunReport, name=command)

    @app.get("/v1/commands")
    def commands():
        return sorted(HANDLERS)

    return app


app = create_app()
