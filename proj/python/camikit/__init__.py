"""Python access to the camikit kernel, formats and services."""

import json as _json

from . import _core
from ._core import Error, window_level

__all__ = ["Kernel", "Error", "validate_protocol", "validate_manifest",
           "generate_skeleton", "estimate_elasticity", "window_level"]


def _int_ids(c):
    # the wire format carries ids as strings; Python callers get ints
    c["id"] = int(c["id"])
    if c["parent"] is not None:
        c["parent"] = int(c["parent"])
    c["children"] = [int(x) for x in c["children"]]
    if c.get("provenance"):
        c["provenance"]["inputs"] = [int(x) for x in c["provenance"]["inputs"]]
    return c


class Kernel:
    """Component store plus action registry; built-in extensions by default."""

    def __init__(self, builtin=True):
        self._k = _core.Kernel(builtin)

    def actions(self, kind=None):
        return _json.loads(self._k.actions(kind))

    def describe_action(self, name):
        return _json.loads(self._k.describe_action(name))

    def open(self, path):
        return self._k.open(str(path))

    def save(self, component_id, path):
        self._k.save(component_id, str(path))

    def add_volume(self, name, array, spacing=(1, 1, 1), origin=(0, 0, 0)):
        return self._k.add_volume(name, array, list(spacing), list(origin))

    def add_mesh(self, name, vertices, triangles):
        return self._k.add_mesh(name, vertices, triangles)

    def apply(self, action, targets, **params):
        if isinstance(targets, int):
            targets = [targets]
        return self._k.apply(action, list(targets), _json.dumps(params))

    def tree(self):
        return [_int_ids(c) for c in _json.loads(self._k.tree())]

    def component(self, component_id):
        return _int_ids(_json.loads(self._k.component(component_id)))

    def __contains__(self, component_id):
        return self._k.contains(component_id)

    def close(self, component_id):
        return self._k.close(component_id)

    def volume(self, component_id):
        return self._k.volume(component_id)

    def mesh(self, component_id):
        return self._k.mesh(component_id)

    def report(self, component_id):
        return _json.loads(self._k.report(component_id))

    def run_pipeline(self, pipeline, bindings=None):
        text = pipeline if isinstance(pipeline, str) else _json.dumps(pipeline)
        return _json.loads(self._k.run_pipeline(text, bindings or {}))

    def run_protocol(self, xml, context=None, script=(), max_steps=100):
        return _json.loads(self._k.run_protocol(xml, context or {}, list(script), max_steps))

    def serve(self, host="127.0.0.1", port=0):
        return self._k.serve(host, port)

    def shutdown(self):
        self._k.shutdown()


def validate_protocol(xml):
    return _json.loads(_core.validate_protocol(xml))


def validate_manifest(text):
    return _core.validate_manifest(text)


def generate_skeleton(kind, name, directory, prefix="org.example"):
    return [str(p) for p in _core.generate_skeleton(kind, name, str(directory), prefix)]


def estimate_elasticity(pressures, heights, E_values, aperture_mm=1.0, phi=1.0):
    """Returns (E, residual) against a library built from E_values."""
    return _core.estimate_elasticity(list(pressures), list(heights), list(E_values),
                                     aperture_mm, phi)
