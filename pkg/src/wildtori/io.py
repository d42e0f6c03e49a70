"""Serialisation: JSON records, OBJ meshes, HTML views and run manifests.

Numbers are written as decimal strings at the working precision so that a
write/read cycle is exact; every JSON document is emitted with sorted keys.
"""
from __future__ import annotations

import hashlib
import json
import platform
import time
from dataclasses import asdict, dataclass, field
from pathlib import Path

from mpmath import mp, mpf

from . import __version__
from . import numeric as nm
from .geometry import Embedding, Params
from .lengths import LengthTriple
from .surface import SimplicialSurface, surface_from_json
from .wild import WildColouring


def dumps(data) -> str:
    return json.dumps(data, sort_keys=True, indent=1) + "\n"


def write_json(path, data) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(dumps(data))
    return path


def read_json(path):
    return json.loads(Path(path).read_text())


def _num(x) -> str:
    return nm.fmt(x)


def params_to_json(p: Params | None):
    if p is None:
        return None
    return {"x": "inf" if p.x == mp.inf else _num(p.x), "h": _num(p.h)}


def params_from_json(d) -> Params | None:
    if not d:
        return None
    return Params(mp.inf if d["x"] == "inf" else mpf(d["x"]), mpf(d["h"]))


def embedding_to_json(emb: Embedding) -> dict:
    return {
        "kind": "embedding",
        "lengths": [_num(t) for t in emb.lengths],
        "params": params_to_json(emb.params),
        "coords": {str(v): [_num(c) for c in emb.coords[v]] for v in sorted(emb.coords)},
        "surface": emb.surface.to_json(),
        "edge_colours": emb.colouring.to_json()["edge_colours"],
        "strong": bool(emb.strong),
    }


def embedding_from_json(d: dict) -> Embedding:
    S = surface_from_json(d["surface"])
    col = WildColouring.from_json({"edge_colours": d["edge_colours"]})
    coords = {int(k): tuple(mpf(c) for c in v) for k, v in d["coords"].items()}
    lengths = LengthTriple(*(mpf(t) for t in d["lengths"]))
    p = params_from_json(d.get("params"))
    emb = Embedding(S, col, coords, lengths, p, False, bool(p and p.degenerate_flat))
    return emb.with_strong_flag()


def surface_line(S: SimplicialSurface, label: bytes | None = None) -> str:
    d = S.to_json()
    if label is not None:
        d["label"] = label.hex()
    return json.dumps(d, sort_keys=True)


def read_surface_lines(path) -> list[SimplicialSurface]:
    out = []
    for line in Path(path).read_text().splitlines():
        if line.strip():
            out.append(surface_from_json(json.loads(line)))
    return out


# ---------------------------------------------------------------------------
# torus records


def _certificate_json(cert) -> dict | None:
    if cert is None:
        return None
    d = {
        "sphere": cert.sphere.to_json(),
        "edge_colours": cert.colouring.to_json()["edge_colours"],
        "v": cert.v,
        "w": cert.w,
        "f_v": list(cert.f_v),
        "f_w": list(cert.f_w),
        "params": params_to_json(cert.params),
        "residual": nm.fmt(cert.residual, 10),
    }
    if hasattr(cert, "matching"):
        d["property"] = "T2"
        d["matching"] = [[int(a), int(b)] for a, b in sorted(cert.matching.items())]
    else:
        d["property"] = "T1"
    return d


def record_to_json(rec) -> dict:
    """Census record for a TorusRecord."""
    emb = rec.embedding
    out = embedding_to_json(emb)
    out.update(
        {
            "kind": "torus",
            "faces": rec.torus.num_faces,
            "self_intersecting": bool(rec.self_intersecting),
            "reflection_symmetric": bool(rec.reflection_symmetric),
            "provenance": {
                "construction": rec.construction,
                "source_label": rec.source_label.hex() if rec.source_label else "",
                "certificate": _certificate_json(rec.certificate),
            },
        }
    )
    return out


def glued_to_json(rec) -> dict:
    out = embedding_to_json(rec.embedding)
    out.update(
        {
            "kind": "glued",
            "faces": rec.surface.num_faces,
            "euler_characteristic": rec.euler_characteristic,
            "genus": rec.genus,
            "self_intersecting": bool(rec.self_intersecting),
        }
    )
    return out


def sommerville_to_json(rec) -> dict:
    out = embedding_to_json(rec.embedding)
    out.update(
        {
            "kind": "sommerville",
            "faces": rec.surface.num_faces,
            "cycle": list(rec.cycle),
            "euler_characteristic": rec.euler_characteristic,
            "genus": rec.genus,
            "self_intersecting": bool(rec.self_intersecting),
        }
    )
    return out


def tiling_to_json(g) -> dict:
    return {
        "kind": "tiling",
        "radius": g.radius,
        "cells": [[list(p) for p in c] for c in g.cells],
        "adjacency": [[i, j, z] for (i, j), z in sorted(g.adjacency.items())],
    }


# ---------------------------------------------------------------------------
# meshes


def write_obj(emb: Embedding, path) -> Path:
    """Wavefront OBJ with 17 significant digits and 1-based faces."""
    verts = sorted(emb.surface.vertices)
    index = {v: i + 1 for i, v in enumerate(verts)}
    lines = [f"# {emb.surface.num_faces} faces"]
    for v in verts:
        lines.append("v " + " ".join(f"{float(c):.17g}" for c in emb.coords[v]))
    for f in emb.surface.faces:
        lines.append("f " + " ".join(str(index[u]) for u in f))
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text("\n".join(lines) + "\n")
    return path


def read_obj(path) -> tuple[list[tuple[float, float, float]], list[tuple[int, int, int]]]:
    """Vertices and 0-based faces of an OBJ file."""
    verts, faces = [], []
    for line in Path(path).read_text().splitlines():
        parts = line.split()
        if not parts:
            continue
        if parts[0] == "v":
            verts.append(tuple(float(t) for t in parts[1:4]))
        elif parts[0] == "f":
            faces.append(tuple(int(t.split("/")[0]) - 1 for t in parts[1:4]))
    return verts, faces


_HTML = """<!DOCTYPE html>
<html><head><meta charset="utf-8"><title>{title}</title>
<style>body{{margin:0;font-family:sans-serif}}canvas{{display:block}}#info{{position:absolute;top:8px;left:8px}}</style>
</head><body><div id="info">{title}<br>drag to rotate</div><canvas id="c"></canvas>
<script>
const V={verts};const F={faces};const C={colours};
const cv=document.getElementById('c');const g=cv.getContext('2d');
let ax=0.5,ay=0.6,drag=null;
function fit(){{cv.width=innerWidth;cv.height=innerHeight;draw();}}
let cx=0,cy=0,cz=0,r=0;V.forEach(p=>{{cx+=p[0];cy+=p[1];cz+=p[2];}});cx/=V.length;cy/=V.length;cz/=V.length;
V.forEach(p=>{{r=Math.max(r,Math.hypot(p[0]-cx,p[1]-cy,p[2]-cz));}});
function rot(p){{let x=p[0]-cx,y=p[1]-cy,z=p[2]-cz;
let c=Math.cos(ay),s=Math.sin(ay);[x,z]=[c*x+s*z,-s*x+c*z];
c=Math.cos(ax);s=Math.sin(ax);[y,z]=[c*y-s*z,s*y+c*z];return [x,y,z];}}
function draw(){{const P=V.map(rot);const k=0.42*Math.min(cv.width,cv.height)/r;
g.clearRect(0,0,cv.width,cv.height);
const order=F.map((f,i)=>[i,(P[f[0]][2]+P[f[1]][2]+P[f[2]][2])/3]).sort((a,b)=>a[1]-b[1]);
for(const [i] of order){{const f=F[i];g.beginPath();
f.forEach((v,j)=>{{const q=P[v];const X=cv.width/2+k*q[0],Y=cv.height/2-k*q[1];j?g.lineTo(X,Y):g.moveTo(X,Y);}});
g.closePath();g.fillStyle=C[i];g.fill();g.strokeStyle='#222';g.lineWidth=0.6;g.stroke();}}}}
cv.onmousedown=e=>drag=[e.clientX,e.clientY];onmouseup=()=>drag=null;
onmousemove=e=>{{if(!drag)return;ay+=(e.clientX-drag[0])/150;ax+=(e.clientY-drag[1])/150;drag=[e.clientX,e.clientY];draw();}};
onresize=fit;fit();
</script></body></html>
"""


def write_html(emb: Embedding, path, title: str = "polyhedron") -> Path:
    """Single-file HTML view of an embedded surface."""
    verts = sorted(emb.surface.vertices)
    index = {v: i for i, v in enumerate(verts)}
    pts = [[round(float(c), 12) for c in emb.coords[v]] for v in verts]
    faces = [[index[u] for u in f] for f in emb.surface.faces]
    palette = ["#e8a0a0", "#a0c8e8", "#b8e0a8", "#e8d8a0"]
    colours = [palette[i % len(palette)] for i in range(len(faces))]
    html = _HTML.format(title=title, verts=json.dumps(pts), faces=json.dumps(faces), colours=json.dumps(colours))
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(html)
    return path


# ---------------------------------------------------------------------------
# manifests


def sha256_of(path) -> str:
    return hashlib.sha256(Path(path).read_bytes()).hexdigest()


@dataclass
class RunManifest:
    command: str
    parameters: dict
    tool_version: str = __version__
    precision_digits: int = field(default_factory=nm.precision)
    tolerances: dict = field(
        default_factory=lambda: {
            "eps_len": nm.EPS_LEN,
            "eps_sep": nm.EPS_SEP,
            "eps_area": nm.EPS_AREA,
            "eps_ang": nm.EPS_ANG,
            "eps_res": nm.EPS_RES,
        }
    )
    wall_time_s: float = 0.0
    python: str = field(default_factory=platform.python_version)
    outputs: dict = field(default_factory=dict)

    def add_output(self, path, root=None) -> None:
        path = Path(path)
        key = str(path.relative_to(root)) if root else str(path)
        self.outputs[key] = sha256_of(path)

    def write(self, path) -> Path:
        return write_json(path, asdict(self))


class Timer:
    def __enter__(self):
        self.start = time.perf_counter()
        return self

    def __exit__(self, *exc):
        self.elapsed = time.perf_counter() - self.start
        return False
