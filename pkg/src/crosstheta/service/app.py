"""FastAPI service exposing the library operations.

Run with `crosstheta serve` or `uvicorn crosstheta.service.app:app`.
Domain errors map to 422 (bad mathematical input) or 409 (dual-route
identity mismatch)."""

from __future__ import annotations

from fastapi import FastAPI, HTTPException

from .. import __version__, bounds, geometry, packing, simulation, theta
from ..errors import CrossthetaError, IdentityMismatch
from . import schemas

app = FastAPI(title="crosstheta", version=__version__)


def _domain(exc: CrossthetaError) -> HTTPException:
    code = 409 if isinstance(exc, IdentityMismatch) else 422
    return HTTPException(status_code=code, detail=f"{type(exc).__name__}: {exc}")


@app.get("/health")
def health() -> dict:
    return {"status": "ok", "version": __version__}


@app.post("/theta", response_model=schemas.ThetaResponse)
def theta_endpoint(req: schemas.ThetaRequest) -> schemas.ThetaResponse:
    try:
        lat = req.lattice.to_lattice()
        tr = theta.theta_l1_lattice(lat)
        series = tr.series_q(req.order)
    except CrossthetaError as exc:
        raise _domain(exc) from exc
    terms = [schemas.ThetaTerm(exponent=str(e), coefficient=str(int(c)))
             for e, c in series.q_terms()]
    return schemas.ThetaResponse(
        scale=tr.scale, terms=terms,
        rational_form=tr.as_string() if req.rational else None)


@app.post("/svp", response_model=schemas.SvpResponse)
def svp_endpoint(req: schemas.SvpRequest) -> schemas.SvpResponse:
    if req.norm != "l1":
        raise HTTPException(status_code=422, detail="only --norm l1 is supported")
    try:
        lat = req.lattice.to_lattice()
        report = geometry.packing_report(lat)
        exact = None
        if lat.exact:
            exact = str(geometry.l1_minimum(lat).lambda1)
    except CrossthetaError as exc:
        raise _domain(exc) from exc
    return schemas.SvpResponse(lambda1_exact=exact, **report.as_dict())


@app.post("/bounds", response_model=schemas.BoundsResponse)
def bounds_endpoint(req: schemas.BoundsRequest) -> schemas.BoundsResponse:
    try:
        lat_b = req.lattice_b.to_lattice()
        lat_e = req.lattice_e.to_lattice()
        rows = bounds.bound_curves(lat_b, lat_e, req.gamma_db,
                                   check=req.check_identities)
    except CrossthetaError as exc:
        raise _domain(exc) from exc
    return schemas.BoundsResponse(rows=[schemas.BoundsRow(**r) for r in rows])


@app.post("/pack", response_model=schemas.PackResponse)
def pack_endpoint(req: schemas.PackRequest) -> schemas.PackResponse:
    opts = packing.SearchOptions(
        coeff_cap=req.coeff_cap, half_box=req.half_box,
        count_target=req.count_target, multistarts=req.multistarts,
        seed=req.seed, threads=req.threads, keep=req.keep)
    try:
        sols = packing.search(req.dim, opts)
    except CrossthetaError as exc:
        raise _domain(exc) from exc
    out = []
    for sol in sols:
        diag = packing.verify_local_criticality(sol)
        out.append(schemas.PackSolutionModel(
            basis=[[float(x) for x in row] for row in sol.basis],
            determinant=sol.achieved_det,
            density=sol.density,
            lambda1=sol.report.lambda1,
            kissing=sol.report.kissing,
            kkt_residual=sol.kkt_residual,
            configuration=[list(v) for v in sol.configuration.vectors],
            diagnostics=schemas.PackDiagnostics(**diag.as_dict()),
        ))
    return schemas.PackResponse(dim=req.dim, solutions=out)


@app.post("/simulate", response_model=schemas.SimulateResponse)
def simulate_endpoint(req: schemas.SimulateRequest) -> schemas.SimulateResponse:
    cfg = simulation.SimConfig(snr_db_grid=tuple(req.snr_db),
                               num_rounds=req.rounds, seed=req.seed,
                               snr_definition=req.snr_definition)
    try:
        lat_b = req.lattice_b.to_lattice()
        lat_e = req.lattice_e.to_lattice()
        code = simulation.build_coset_code(lat_b, lat_e, req.pam)
        result = simulation.simulate(code, cfg, who=req.who, threads=req.threads)
    except CrossthetaError as exc:
        raise _domain(exc) from exc
    return schemas.SimulateResponse(
        who=result.who, n_cosets=result.n_cosets, snr_db=result.snr_db,
        estimates=result.estimates, ci_halfwidths=result.ci_halfwidths)
