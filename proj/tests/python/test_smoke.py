import json
import pathlib
import urllib.request

import numpy as np
import pytest

import camikit

DATA = pathlib.Path(__file__).resolve().parent.parent / "data"


def sphere(n=12, r=4.0):
    c = (n - 1) / 2
    k, j, i = np.mgrid[0:n, 0:n, 0:n]
    # positive inside, so the padded border stays outside the surface
    return (r - np.sqrt((i - c) ** 2 + (j - c) ** 2 + (k - c) ** 2)).astype(np.float32)


def test_actions_listed():
    k = camikit.Kernel()
    names = [a["name"] for a in k.actions()]
    assert names == sorted(names)
    assert "threshold" in names
    assert all("image" in a["applies_to"] for a in k.actions("image"))


def test_volume_round_trip_and_threshold():
    k = camikit.Kernel()
    v = np.arange(4 * 3 * 2, dtype=np.uint8).reshape(2, 3, 4)
    vid = k.add_volume("ramp", v, spacing=(0.5, 1, 2))
    assert np.array_equal(k.volume(vid), v)
    [mask] = k.apply("threshold", vid, low=5, high=10)
    expected = ((v >= 5) & (v <= 10)).astype(np.uint8)
    assert np.array_equal(k.volume(mask) != 0, expected != 0)
    assert k.component(mask)["parent"] == vid


def test_isosurface_is_closed():
    k = camikit.Kernel()
    vid = k.add_volume("sphere", sphere())
    [mid] = k.apply("isosurface", vid, isovalue=0.0)
    verts, tris = k.mesh(mid)
    assert verts.shape[1] == 3 and tris.shape[1] == 3
    edges = {}
    for a, b, c in tris:
        for e in ((a, b), (b, c), (c, a)):
            key = tuple(sorted(map(int, e)))
            edges[key] = edges.get(key, 0) + 1
    assert set(edges.values()) == {2}
    [rep] = k.apply("euler_characteristic", mid)
    assert k.report(rep)["euler_characteristic"] == 2


def test_errors_are_typed():
    k = camikit.Kernel()
    vid = k.add_volume("v", np.zeros((2, 2, 2), np.uint8))
    with pytest.raises(camikit.Error) as err:
        k.apply("threshold", vid, low=1)
    assert err.value.code
    with pytest.raises(camikit.Error):
        k.open(DATA / "does_not_exist.mha")


def test_file_round_trip(tmp_path):
    k = camikit.Kernel()
    cube = k.open(DATA / "cube.off")
    out = tmp_path / "cube.obj"
    k.save(cube, out)
    again = k.open(out)
    a, b = k.mesh(cube), k.mesh(again)
    assert np.array_equal(a[0], b[0]) and np.array_equal(a[1], b[1])
    removed = k.close(cube)
    assert removed == [cube]
    assert cube not in k


def test_pipeline_and_protocol():
    k = camikit.Kernel()
    vid = k.add_volume("input", sphere())
    report = k.run_pipeline(
        {"name": "p", "steps": [
            {"action": "box_smooth", "inputs": ["input"], "params": {"radius": 1}, "outputs": ["s"]},
            {"action": "isosurface", "inputs": ["s"], "params": {"isovalue": 0}, "outputs": ["m"]}]},
        {"input": vid})
    assert [s["status"] for s in report["steps"]] == ["ok", "ok"]

    xml = (DATA / "segmentation.protocol.xml").read_text()
    assert camikit.validate_protocol(xml) == []
    ramp = np.fromfunction(lambda k_, j, i: 20 * (i + j + k_), (6, 6, 6)).astype(np.uint8)
    h = k.run_protocol(xml, {"input": k.add_volume("r", ramp)}, ["segment", "reconstruct"])
    assert h["status"] == "completed"
    assert h["final"]


def test_wizard_skeleton_validates(tmp_path):
    files = camikit.generate_skeleton("action", "Blur3d", tmp_path, "org.demo")
    assert len(files) == 3
    assert camikit.validate_manifest(pathlib.Path(files[0]).read_text()) == []
    assert camikit.validate_manifest("{}") != []


def test_elasticity_recovers_grid_value():
    p = [1e3, 2e3, 4e3]
    grid = [5e3, 10e3, 20e3]
    heights = [x / 10e3 for x in p]
    E, residual = camikit.estimate_elasticity(p, heights, grid)
    assert E == 10e3 and residual == 0


def test_http_service():
    k = camikit.Kernel()
    vid = k.add_volume("v", sphere())
    port = k.serve()
    try:
        with urllib.request.urlopen(f"http://127.0.0.1:{port}/api/components") as r:
            listed = json.loads(r.read())
        assert [c["id"] for c in listed] == [str(vid)]
        assert [c["id"] for c in k.tree()] == [vid]
        url = f"http://127.0.0.1:{port}/api/components/{vid}/slice?axis=axial&index=5"
        with urllib.request.urlopen(url) as r:
            assert r.headers["Content-Type"] == "image/png"
            assert r.read()[:8] == b"\x89PNG\r\n\x1a\n"
    finally:
        k.shutdown()
