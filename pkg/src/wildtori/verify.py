"""Independent re-verification of serialised records."""
from __future__ import annotations

from dataclasses import dataclass, field

from mpmath import mpf

from . import numeric as nm
from .geometry import BuildPlan, Embedding
from .io import embedding_from_json, params_from_json
from .predicates import self_intersects
from .sommerville import cell_volume
from .surface import SurfaceError, are_isomorphic, report, surface_from_json, validate_surface
from .torus import (
    InvalidCertificate,
    T1Certificate,
    T2Certificate,
    _plane,
    build_identified_torus,
    build_mirror_torus,
    certificate_embedding,
    check_T1,
    check_T2,
    has_reflection_symmetry,
)
from .wild import WildColouring, verify_colouring


@dataclass
class VerificationReport:
    kind: str
    passed: list[str] = field(default_factory=list)
    failed: list[str] = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return not self.failed

    def check(self, name: str, cond: bool, detail: str = "") -> bool:
        if cond:
            self.passed.append(name)
        else:
            self.failed.append(f"{name}: {detail}" if detail else name)
        return cond

    def lines(self) -> list[str]:
        out = [f"PASS {n}" for n in self.passed]
        out += [f"FAIL {n}" for n in self.failed]
        return out


def _embedding_checks(rep: VerificationReport, d: dict) -> Embedding | None:
    try:
        validate_surface(surface_from_json(d["surface"]).faces)
    except (SurfaceError, KeyError, TypeError) as exc:
        rep.check("surface", False, str(exc))
        return None
    rep.check("surface", True)
    try:
        emb = embedding_from_json(d)
    except (KeyError, ValueError, TypeError) as exc:
        rep.check("decode", False, str(exc))
        return None
    rep.check("wild colouring", verify_colouring(emb.surface, emb.colouring))
    err = emb.max_length_error()
    rep.check("edge lengths", err <= nm.EPS_LEN, f"max error {nm.fmt(err, 5)}")
    rep.check("strong flag", bool(d.get("strong")) == emb.strong, f"recorded {d.get('strong')}, found {emb.strong}")
    return emb


def _certificate(d: dict):
    S = surface_from_json(d["sphere"])
    col = WildColouring.from_json({"edge_colours": d["edge_colours"]})
    p = params_from_json(d["params"])
    f_v, f_w = tuple(d["f_v"]), tuple(d["f_w"])
    if d["property"] == "T1":
        plan = BuildPlan.from_surface(S, col)
        coords = plan.evaluate(p)
        return T1Certificate(S, col, d["v"], d["w"], f_v, f_w, p, mpf(d["residual"]), _plane(coords, f_v))
    matching = {int(a): int(b) for a, b in d["matching"]}
    return T2Certificate(S, col, d["v"], d["w"], f_v, f_w, matching, p, mpf(d["residual"]))


def _torus_checks(rep: VerificationReport, d: dict, emb: Embedding) -> None:
    chi = report(emb.surface).euler_characteristic
    rep.check("euler characteristic", chi == 0, f"chi = {chi}")
    rep.check("face count", d.get("faces") == emb.surface.num_faces)
    si = self_intersects(emb)
    rep.check("self-intersection flag", si == bool(d["self_intersecting"]), f"found {si}")
    sym = has_reflection_symmetry(emb)
    rep.check("reflection symmetry flag", sym == bool(d["reflection_symmetric"]), f"found {sym}")
    cert_d = (d.get("provenance") or {}).get("certificate")
    if not cert_d:
        return
    cert = _certificate(cert_d)
    sphere_emb = certificate_embedding(cert)
    if isinstance(cert, T1Certificate):
        ok, diag = check_T1(cert.sphere, cert.v, cert.w, cert.f_v, cert.f_w, sphere_emb)
        rep.check("T1 recomputed", ok, str(diag))
        build = build_mirror_torus
    else:
        rep.check("T2 recomputed", check_T2(cert.sphere, cert.f_v, cert.f_w, cert.matching, sphere_emb))
        build = build_identified_torus
    try:
        rebuilt = build(cert, sphere_emb)
    except InvalidCertificate as exc:
        rep.check("torus rebuilt from certificate", False, str(exc))
        return
    rep.check("torus rebuilt from certificate", are_isomorphic(rebuilt.torus, emb.surface))


def verify_record(d: dict) -> VerificationReport:
    """Re-check a record dictionary from scratch; nothing recorded is trusted."""
    kind = d.get("kind", "embedding")
    rep = VerificationReport(kind)
    if kind == "tiling":
        return _verify_tiling(rep, d)
    emb = _embedding_checks(rep, d)
    if emb is None:
        return rep
    if kind == "torus":
        _torus_checks(rep, d, emb)
    elif kind in ("glued", "sommerville"):
        r = report(emb.surface)
        rep.check("euler characteristic", r.euler_characteristic == d["euler_characteristic"],
                  f"found {r.euler_characteristic}")
        rep.check("genus", r.genus == d["genus"], f"found {r.genus}")
        si = self_intersects(emb)
        rep.check("self-intersection flag", si == bool(d["self_intersecting"]), f"found {si}")
    return rep


def _verify_tiling(rep: VerificationReport, d: dict) -> VerificationReport:
    cells = [tuple(tuple(p) for p in c) for c in d["cells"]]
    rep.check("cell volumes", all(abs(cell_volume(c) - 2 / 3) < 1e-12 for c in cells))
    bad = 0
    for i, j, z in d["adjacency"]:
        if len(set(cells[i]) & set(cells[j])) != z:
            bad += 1
    rep.check("adjacency colours", bad == 0, f"{bad} wrong")
    return rep
