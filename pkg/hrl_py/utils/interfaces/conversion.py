"""
Reading and writing the files the experiments consume and produce:
chart atlases (JSON), result tables (CSV) and reports (JSON).

Atlas format::

    {
      "n": 3,
      "charts": [
        {"anchor": [...], "normal": [...], "alpha": 1.0, "C2": 2.0, "radius": 0.3,
         "phi": "sphere" | "paraboloid" | {"terms": [[[2, 0], 1.0], ...]},
         "sphere_radius": 1.0, "a": 1.0}
      ],
      "delta": 0.2, "rho": 0.6, "lipschitz_G": 1.0
    }

An optional "surface" entry ({"type": "sphere", "radius": R} or
{"type": "quadric", "matrix": [[...]], "center": [...]}) lets charts be built
at any boundary point; optional "alpha" and "C2" set the atlas-wide values.
"""

import csv
import json
import os

import numpy as np

from hrl_py.framework.errors import ConfigurationError
from hrl_py.representations.charts import DomainSpec, FunctionChart, QuadricSurface
from hrl_py.utils.misc import json_safe

HRL_VERSION = "0.1.0"

_BUILTIN_PHI = ("sphere", "paraboloid")


def _chart_from_entry(entry, n):
    try:
        anchor = np.asarray(entry["anchor"], dtype=float)
        normal = np.asarray(entry["normal"], dtype=float)
        radius = float(entry["radius"])
        phi = entry["phi"]
    except KeyError as e:
        raise ConfigurationError("Chart entry is missing the key %s" % e)
    if len(anchor) != n or len(normal) != n:
        raise ConfigurationError("Chart anchor and normal must have %d entries" % n)
    alpha = float(entry.get("alpha", 1.0))
    c2 = entry.get("C2")
    if phi == "sphere":
        return FunctionChart.sphere(
            anchor, normal, radius, sphere_radius=float(entry.get("sphere_radius", 1.0)), alpha=alpha, c2=c2
        )
    if phi == "paraboloid":
        return FunctionChart.paraboloid(anchor, normal, radius, a=float(entry.get("a", 1.0)), alpha=alpha, c2=c2)
    if isinstance(phi, dict) and "terms" in phi:
        if c2 is None:
            raise ConfigurationError("Polynomial charts need an explicit C2")
        return FunctionChart.polynomial(anchor, normal, radius, phi["terms"], alpha, float(c2))
    raise ConfigurationError("Unknown chart function %r; use %s or polynomial terms" % (phi, _BUILTIN_PHI))


def _surface_from_entry(entry, n):
    kind = entry.get("type")
    if kind == "sphere":
        return QuadricSurface.sphere(n, float(entry.get("radius", 1.0)), entry.get("center"))
    if kind == "quadric":
        return QuadricSurface(entry["matrix"], entry.get("center"), name=entry.get("name", "quadric"))
    raise ConfigurationError("Unknown surface type %r" % kind)


def atlas_from_dict(data):
    """Builds a DomainSpec from a parsed atlas.

    Raises:
        ConfigurationError: for any malformed entry.
    """
    if not isinstance(data, dict):
        raise ConfigurationError("Atlas must be a JSON object, got %s" % type(data).__name__)
    if "n" not in data:
        raise ConfigurationError("Atlas has no dimension 'n'")
    try:
        return _parse_atlas(data)
    except ConfigurationError:
        raise
    except KeyError as e:
        raise ConfigurationError("Atlas entry is missing the key %s" % e)
    except (AttributeError, TypeError, ValueError) as e:
        raise ConfigurationError("Malformed atlas: %s" % e)


def _parse_atlas(data):
    n = int(data["n"])
    charts = [_chart_from_entry(entry, n) for entry in data.get("charts", [])]
    surface = _surface_from_entry(data["surface"], n) if "surface" in data else None
    if surface is None and not charts:
        raise ConfigurationError("Atlas has neither charts nor a surface")
    return DomainSpec(
        n,
        surface=surface,
        charts=charts,
        delta=float(data.get("delta", 0.2)),
        rho=data.get("rho"),
        lipschitz_G=data.get("lipschitz_G"),
        alpha=float(data.get("alpha", 1.0)),
        c2=data.get("C2"),
        chart_radius=float(data.get("chart_radius", 0.3)),
        name=data.get("name", "atlas"),
    )


def load_atlas(path):
    if not os.path.exists(path):
        raise ConfigurationError("Atlas file %s does not exist" % path)
    with open(path) as f:
        try:
            data = json.load(f)
        except json.JSONDecodeError as e:
            raise ConfigurationError("Atlas file %s is not valid JSON: %s" % (path, e))
    return atlas_from_dict(data)


def atlas_to_dict(domain):
    """Inverse of :func:`atlas_from_dict` for atlases of builtin or polynomial charts."""
    charts = []
    for chart in domain.charts:
        params = getattr(chart, "params", None)
        if params is None:
            raise ConfigurationError("Chart %s cannot be written to an atlas file" % chart.name)
        entry = {
            "anchor": list(chart.anchor),
            # the chart rotation sends the normal to e_n
            "normal": list(chart.iso.rotation[-1]),
            "alpha": chart.alpha,
            "C2": chart.c2,
            "radius": chart.radius,
        }
        entry.update(params)
        charts.append(entry)
    data = {
        "n": domain.n,
        "charts": charts,
        "delta": domain.delta,
        "rho": domain.rho,
        "lipschitz_G": domain.lipschitz_G,
        "alpha": domain.alpha,
        "C2": domain.c2,
        "name": domain.name,
    }
    if isinstance(domain.surface, QuadricSurface):
        data["surface"] = {
            "type": "quadric",
            "matrix": domain.surface.matrix.tolist(),
            "center": list(domain.surface.center),
            "name": domain.surface.name,
        }
    elif domain.surface is not None:
        raise ConfigurationError("Only quadric surfaces can be written to an atlas file")
    return json_safe(data)


def save_atlas(domain, path):
    with open(path, "w") as f:
        json.dump(atlas_to_dict(domain), f, indent=2, sort_keys=True)
        f.write("\n")


def _cell(value):
    if isinstance(value, (bool, np.bool_)):
        return "1" if value else "0"
    if isinstance(value, (float, np.floating)):
        return repr(float(value))
    if isinstance(value, (int, np.integer)):
        return str(int(value))
    return str(value)


def write_csv(out, header, rows):
    """Writes a table to a path or an open stream; floats use the shortest round-trip repr."""
    if isinstance(out, (str, os.PathLike)):
        with open(out, "w", newline="") as f:
            return write_csv(f, header, rows)
    writer = csv.writer(out, lineterminator="\n")
    writer.writerow(header)
    for row in rows:
        writer.writerow([_cell(v) for v in row])


def report_document(command, body):
    """Body wrapped with the versioned header."""
    return json_safe({"hrl_version": HRL_VERSION, "command": command, "result": body})


def dumps_report(command, body):
    return json.dumps(report_document(command, body), indent=2, sort_keys=True) + "\n"


def write_json(path, command, body):
    with open(path, "w") as f:
        f.write(dumps_report(command, body))
