import math

import numpy as np
import pytest

import valab


def test_version():
    assert valab.__version__


def test_cube_intrinsic_volumes():
    cube = valab.Polytope.cube(3)
    assert cube.vertices.shape == (8, 3)
    assert cube.num_facets == 6
    assert valab.phi(valab.constant_kernel(3, 1), cube)["value"] == pytest.approx(3.0, abs=1e-9)
    assert valab.phi(valab.constant_kernel(3, 2), cube)["value"] == pytest.approx(3.0, abs=1e-9)


def test_hull_from_numpy():
    pts = np.random.default_rng(0).normal(size=(30, 3))
    p = valab.Polytope.from_vertices(pts)
    assert p.affine_dim == 3
    assert p.vertices.shape[0] <= 30
    assert valab.hausdorff_distance(p, p) == pytest.approx(0.0, abs=1e-12)


def test_faces_of_simplex():
    rows = valab.faces(valab.Polytope.simplex(3), 2)
    assert len(rows) == 4
    assert all(r["measure"] == pytest.approx(0.5) for r in rows)


def test_kernel_specs_and_klain():
    f = valab.kernel({"kind": "lemma18"})
    assert (f.n, f.k) == (3, 1)
    assert valab.phi(f, valab.Polytope.simplex(3))["value"] == pytest.approx(1 / (2 * math.pi), abs=1e-9)
    e = np.array([[0.6], [0.0], [0.8]])
    assert valab.klain_function(f, e) == pytest.approx(0.0, abs=1e-9)
    g = valab.separable_kernel(3, 1, 5)
    assert valab.klain_function(g, e) == pytest.approx(valab.smap(g, e), abs=1e-6)


def test_probe_and_cosine():
    rep = valab.probe(valab.constant_kernel(3, 1), {"family": "bulge"}, members=[4, 8, 16, 32])
    assert rep["verdict"] == "converges-to-value"
    table = valab.cosine_multipliers(4)
    assert table[0]["multiplier"] == pytest.approx(0.5, abs=1e-9)


def test_errors_map_to_python_exceptions():
    with pytest.raises(ValueError):
        valab.phi(valab.constant_kernel(4, 1), valab.Polytope.cube(3))
    with pytest.raises(valab.ValidationError):
        valab.kernel({"kind": "no-such-kernel"})
