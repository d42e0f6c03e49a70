"""Census drivers: mirror doubling and identification over all proper spheres."""
from __future__ import annotations

from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field

from . import numeric as nm
from .cluster import enumerate_proper_spheres
from .geometry import BuildPlan
from .torus import (
    InvalidCertificate,
    TorusRecord,
    build_identified_torus,
    build_mirror_torus,
    census_dedup,
    end_faces,
    solve_T1_parameters,
    solve_T2_parameters,
)
from .wild import compute_wild_colouring


class CensusError(ValueError):
    pass


def tetrahedra_for_faces(n: int) -> int:
    """Number of chained tetrahedra whose sphere has n faces."""
    if n % 2 or n < 4:
        raise CensusError(f"a proper sphere has an even number >= 4 of faces, got {n}")
    return (n - 2) // 2


@dataclass
class Rejection:
    sphere: str
    f_v: tuple
    f_w: tuple
    reason: str


@dataclass
class MirrorCensus:
    n: int
    spheres: int
    certificates: int
    self_intersecting: list[TorusRecord] = field(default_factory=list)
    non_self_intersecting: list[TorusRecord] = field(default_factory=list)
    rejected: list[Rejection] = field(default_factory=list)

    @property
    def torus_faces(self) -> int:
        return 2 * self.n - 4

    @property
    def records(self) -> list[TorusRecord]:
        return self.self_intersecting + self.non_self_intersecting

    def summary_line(self) -> str:
        return (
            f"{self.torus_faces}-face tori: selfInt={len(self.self_intersecting)} "
            f"nonSelfInt={len(self.non_self_intersecting)}"
        )


@dataclass
class IdentifyCensus:
    n: int
    spheres: int
    certificates: int
    self_int_mirror: list[TorusRecord] = field(default_factory=list)
    self_int_no_mirror: list[TorusRecord] = field(default_factory=list)
    non_self_int_mirror: list[TorusRecord] = field(default_factory=list)
    non_self_int_no_mirror: list[TorusRecord] = field(default_factory=list)
    rejected: list[Rejection] = field(default_factory=list)

    @property
    def torus_faces(self) -> int:
        return self.n - 2

    @property
    def records(self) -> list[TorusRecord]:
        return self.self_int_mirror + self.self_int_no_mirror + self.non_self_int_mirror + self.non_self_int_no_mirror

    def summary_line(self) -> str:
        return (
            f"{self.torus_faces}-face tori: selfIntMirror={len(self.self_int_mirror)} "
            f"selfInt={len(self.self_int_no_mirror)} nonSelfIntMirror={len(self.non_self_int_mirror)} "
            f"nonSelfInt={len(self.non_self_int_no_mirror)}"
        )


def _sphere_tasks(n: int):
    k = tetrahedra_for_faces(n)
    return [(sp.surface, sp.label) for sp in enumerate_proper_spheres(k)]


def _work(args):
    mode, S, label, density, digits = args
    nm.set_precision(digits)
    colouring = compute_wild_colouring(S)
    plan = BuildPlan.from_surface(S, colouring)
    _, _, Fv, Fw = end_faces(S)
    records, rejected, ncert = [], [], 0
    for f_v in Fv:
        for f_w in Fw:
            if mode == "mirror":
                certs = solve_T1_parameters(S, f_v, f_w, colouring, plan, density)
                build = build_mirror_torus
            else:
                certs = solve_T2_parameters(S, f_v, f_w, colouring, plan, density)
                build = build_identified_torus
            ncert += len(certs)
            for cert in certs:
                try:
                    rec = build(cert)
                except InvalidCertificate as exc:
                    rejected.append(Rejection(label.hex(), f_v, f_w, str(exc)))
                    continue
                records.append(rec)
    return records, rejected, ncert


def _run(mode: str, n: int, density: str, jobs: int, progress=None):
    tasks = [(mode, S, label, density, nm.precision()) for S, label in _sphere_tasks(n)]
    results = []
    if jobs > 1:
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            for i, res in enumerate(pool.map(_work, tasks)):
                results.append(res)
                if progress:
                    progress(i + 1, len(tasks))
    else:
        for i, t in enumerate(tasks):
            results.append(_work(t))
            if progress:
                progress(i + 1, len(tasks))
    records = [r for res in results for r in res[0]]
    rejected = [r for res in results for r in res[1]]
    ncert = sum(res[2] for res in results)
    return len(tasks), census_dedup(records), rejected, ncert


def _order(records):
    return sorted(records, key=lambda r: (r.source_label, tuple(float(t) for t in r.lengths.normalised())))


def run_algorithm1(n: int, density: str = "default", jobs: int = 1, progress=None) -> MirrorCensus:
    """Mirror-doubled tori with 2n - 4 faces from proper spheres with n faces."""
    if n < 8:
        raise CensusError("mirror doubling needs spheres with at least 8 faces")
    spheres, recs, rejected, ncert = _run("mirror", n, density, jobs, progress)
    out = MirrorCensus(n, spheres, ncert, rejected=rejected)
    for r in _order(recs):
        (out.self_intersecting if r.self_intersecting else out.non_self_intersecting).append(r)
    return out


def run_algorithm2(n: int, density: str = "default", jobs: int = 1, progress=None) -> IdentifyCensus:
    """Identified tori with n - 2 faces from proper spheres with n faces."""
    if n < 6:
        raise CensusError("identification needs spheres with at least 6 faces")
    spheres, recs, rejected, ncert = _run("identify", n, density, jobs, progress)
    out = IdentifyCensus(n, spheres, ncert, rejected=rejected)
    for r in _order(recs):
        if r.self_intersecting:
            (out.self_int_mirror if r.reflection_symmetric else out.self_int_no_mirror).append(r)
        else:
            (out.non_self_int_mirror if r.reflection_symmetric else out.non_self_int_no_mirror).append(r)
    return out


def mirror_table(rows: list[MirrorCensus]) -> str:
    """Fixed-width table: torus face count against the two classes."""
    head = ["n", *[str(r.torus_faces) for r in rows]]
    a = ["|A_n|", *[str(len(r.self_intersecting)) for r in rows]]
    b = ["|B_n|", *[str(len(r.non_self_intersecting)) for r in rows]]
    w = max(len(x) for x in head + a + b) + 2
    return "\n".join("".join(x.rjust(w) for x in line) for line in (head, a, b)) + "\n"


def totals_table(mirror_rows: list[MirrorCensus], identify_rows: list[IdentifyCensus]) -> str:
    """Fixed-width totals by reflection symmetry and self-intersection."""
    ms = sum(len(r.self_intersecting) for r in mirror_rows)
    mn = sum(len(r.non_self_intersecting) for r in mirror_rows)
    ims = sum(len(r.self_int_mirror) for r in identify_rows)
    imn = sum(len(r.non_self_int_mirror) for r in identify_rows)
    ns = sum(len(r.self_int_no_mirror) for r in identify_rows)
    nn = sum(len(r.non_self_int_no_mirror) for r in identify_rows)
    lines = [
        f"{'':<26}{'with self-inters.':>20}{'without self-inters.':>22}",
        f"{'with reflection sym.':<26}{ms + ims:>20}{mn + imn:>22}",
        f"{'without reflection sym.':<26}{ns:>20}{nn:>22}",
    ]
    return "\n".join(lines) + "\n"
