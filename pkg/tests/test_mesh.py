"""Meshes, nodal fields, evaluation, refinement, and file round trips."""

import json
import math
from fractions import Fraction

import numpy as np
import pytest

from semfourier.gll import gll_rule, legendre_coeffs, legendre_eval
from semfourier.mesh import (
    Element,
    Mesh,
    NodalField,
    element_from_pi,
    element_indicator,
    eval_field,
    eval_field_many,
    gll_node_positions,
    load_mesh,
    map_to_physical,
    map_to_reference,
    mesh_from_dict,
    mesh_to_dict,
    nodal_to_modal,
    read_field,
    read_field_json,
    refine,
    refine_by_indicator,
    sample_field,
    save_mesh,
    uniform_mesh,
    write_field,
    write_field_json,
)


def test_uniform_mesh_1d_geometry():
    mesh = uniform_mesh(1, 4, 3)
    assert mesh.K == 4 and mesh.d == 1 and mesh.P == 3
    centers = [e.a[0] for e in mesh.elements]
    np.testing.assert_allclose(
        centers, [-3 * math.pi / 4, -math.pi / 4, math.pi / 4, 3 * math.pi / 4]
    )
    assert all(e.h_pi == (Fraction(1, 4),) for e in mesh.elements)
    assert mesh.rational


def test_uniform_mesh_2d_ordering_axis1_fastest():
    mesh = uniform_mesh(2, 2, 1)
    got = [tuple(e.a_pi) for e in mesh.elements]
    h = Fraction(1, 2)
    assert got == [
        (-h, -h), (h, -h), (-h, h), (h, h),
    ]


def test_mesh_rejects_bad_partitions():
    h = Fraction(1, 2)
    a = element_from_pi([-h], [h])
    b = element_from_pi([h], [h])
    Mesh(1, 2, [a, b])  # valid two-element split
    with pytest.raises(ValueError, match="overlap"):
        Mesh(1, 2, [a, element_from_pi([Fraction(1, 4)], [h])])
    with pytest.raises(ValueError, match="close the domain"):
        Mesh(1, 2, [a, element_from_pi([Fraction(3, 4)], [Fraction(1, 4)])])
    with pytest.raises(ValueError, match="outside"):
        Mesh(1, 2, [a, element_from_pi([Fraction(3, 4)], [h])])
    with pytest.raises(ValueError):
        Mesh(1, 0, [a, b])
    with pytest.raises(ValueError):
        Mesh(4, 2, [])


def test_float_mesh_validation_paths():
    # same checks without rational tags run in floating point
    a = Element(np.array([-math.pi / 2]), np.array([math.pi / 2]))
    b = Element(np.array([math.pi / 2]), np.array([math.pi / 2]))
    mesh = Mesh(1, 2, [a, b])
    assert not mesh.rational
    with pytest.raises(ValueError, match="overlap"):
        Mesh(1, 2, [a, Element(np.array([0.0]), np.array([math.pi / 2]))])
    with pytest.raises(ValueError):
        Element(np.array([0.0]), np.array([0.0]))


def test_map_round_trip():
    e = element_from_pi([Fraction(1, 4), Fraction(-1, 2)], [Fraction(1, 4), Fraction(1, 2)])
    rng = np.random.default_rng(7)
    for _ in range(10):
        xi = rng.uniform(-1, 1, 2)
        x = map_to_physical(e, xi)
        np.testing.assert_allclose(map_to_reference(e, x), xi, atol=1e-14)
    with pytest.raises(ValueError):
        map_to_reference(e, e.a + 3 * np.abs(e.hdiag))
    with pytest.raises(ValueError):
        map_to_physical(e, np.array([1.5, 0.0]))


def test_node_positions_storage_order():
    # flat node index runs axis 1 fastest
    mesh = uniform_mesh(2, 2, 2)
    rule = gll_rule(2)
    pos = gll_node_positions(mesh, rule)
    assert pos.shape == (4, 9, 2)
    e = mesh.elements[0]
    assert pos[0, 1, 0] != pos[0, 0, 0]          # axis 1 moved
    assert pos[0, 1, 1] == pos[0, 0, 1]          # axis 2 did not
    np.testing.assert_allclose(pos[0, 0], e.a - np.abs(e.hdiag))
    np.testing.assert_allclose(pos[0, -1], e.a + np.abs(e.hdiag))


def test_sample_and_eval_reproduce_polynomials():
    mesh = uniform_mesh(2, 2, 4)
    rule = gll_rule(4)

    def f(X):
        return (X[:, 0] / math.pi) ** 4 - 2.0 * (X[:, 1] / math.pi) ** 3 * (
            X[:, 0] / math.pi
        )

    field = sample_field(mesh, rule, f)
    rng = np.random.default_rng(11)
    X = rng.uniform(-math.pi, math.pi, (50, 2))
    np.testing.assert_allclose(eval_field_many(field, X)[:, 0], f(X), atol=1e-13)
    x0 = np.array([0.3, -1.2])
    assert eval_field(field, x0)[0] == pytest.approx(f(x0[None])[0], abs=1e-13)


def test_eval_outside_domain_raises():
    mesh = uniform_mesh(1, 2, 2)
    field = sample_field(mesh, gll_rule(2), lambda X: X[:, 0])
    with pytest.raises(ValueError, match="outside"):
        eval_field_many(field, np.array([[3.5]]))


def test_eval_on_shared_face_is_single_valued():
    mesh = uniform_mesh(1, 4, 3)
    field = sample_field(mesh, gll_rule(3), lambda X: np.sin(X[:, 0]))
    # x = -pi/2 lies on the face between elements 0 and 1
    v = eval_field(field, np.array([-math.pi / 2]))
    assert v[0] == pytest.approx(math.sin(-math.pi / 2), abs=1e-3)


def test_sampler_shape_and_finiteness_checks():
    mesh = uniform_mesh(1, 2, 2)
    rule = gll_rule(2)
    with pytest.raises(ValueError, match="non-finite"):
        sample_field(mesh, rule, lambda X: np.full(X.shape[0], np.nan))
    with pytest.raises(ValueError, match="wrong number"):
        sample_field(mesh, rule, lambda X: X[:2, 0])
    with pytest.raises(ValueError):
        NodalField(mesh, np.zeros((2, 4, 1)))  # nodes_per_element is 3


def test_nodal_to_modal_picks_out_legendre_degrees():
    # single element covering [-pi, pi]: L_3(x/pi) has modal vector e_3
    mesh = uniform_mesh(1, 1, 5)
    rule = gll_rule(5)
    table = legendre_coeffs(rule)
    field = sample_field(mesh, rule, lambda X: legendre_eval(3, X[:, 0] / math.pi))
    modal = nodal_to_modal(table, field.values[0], 1)
    expect = np.zeros((6, 1))
    expect[3, 0] = 1.0
    np.testing.assert_allclose(modal, expect, atol=1e-13)


def test_indicator_flags_unresolved_elements_only():
    mesh = uniform_mesh(1, 4, 6)
    rule = gll_rule(6)

    def f(X):
        x = X[:, 0]
        return np.where(x > math.pi / 2, np.tanh(40.0 * (x - 2.2)), 0.01 * x)

    field = sample_field(mesh, rule, f)
    ind = element_indicator(field)
    # the kink lives in the last element; the linear pieces are resolved
    assert np.argmax(ind) == 3
    assert ind[3] > 1e3 * np.max(ind[:2])


def test_refine_splits_flagged_elements():
    mesh = uniform_mesh(2, 2, 3)
    out = refine(mesh, [1])
    assert out.K == 4 - 1 + 4
    assert out.rational
    parent = mesh.elements[1]
    children = out.elements[1:5]
    lo_p, hi_p = parent.bounds()
    for c in children:
        assert c.h_pi == tuple(h / 2 for h in parent.h_pi)
        lo, hi = c.bounds()
        assert np.all(lo >= lo_p - 1e-15) and np.all(hi <= hi_p + 1e-15)
    # child order: axis 1 fastest (-,-), (+,-), (-,+), (+,+)
    offs = [np.sign(c.a - parent.a) for c in children]
    assert [tuple(o) for o in offs] == [(-1, -1), (1, -1), (-1, 1), (1, 1)]


def test_refine_mask_and_empty_flags():
    mesh = uniform_mesh(1, 4, 2)
    mask = np.zeros(4, dtype=bool)
    mask[2] = True
    assert refine(mesh, mask).K == 5
    assert refine(mesh, []).K == 4
    with pytest.raises(ValueError):
        refine(mesh, np.zeros(3, dtype=bool))


def test_refine_float_elements():
    a = Element(np.array([-math.pi / 2]), np.array([math.pi / 2]))
    b = Element(np.array([math.pi / 2]), np.array([math.pi / 2]))
    out = refine(Mesh(1, 2, [a, b]), [0])
    assert out.K == 3 and not out.rational


def test_refine_by_indicator_round_trip():
    mesh = uniform_mesh(1, 4, 5)
    rule = gll_rule(5)
    f = lambda X: np.exp(np.sin(3.0 * X[:, 0]))
    field = sample_field(mesh, rule, f)
    refined, flags, indicators = refine_by_indicator(mesh, field, 1e-3)
    assert indicators.shape == (4,)
    assert refined.K == 4 + np.count_nonzero(flags)
    # a huge tolerance refines nothing and returns the same mesh object
    same, flags2, _ = refine_by_indicator(mesh, field, 1e9)
    assert same is mesh and not np.any(flags2)


def test_mesh_json_round_trip_keeps_exact_geometry():
    mesh = refine(uniform_mesh(2, 2, 4), [0, 3])
    data = mesh_to_dict(mesh)
    back = mesh_from_dict(json.loads(json.dumps(data)))
    assert back == mesh
    assert back.rational
    assert all(
        e1.a_pi == e2.a_pi and e1.h_pi == e2.h_pi
        for e1, e2 in zip(back.elements, mesh.elements)
    )


def test_mesh_file_round_trip(tmp_path):
    mesh = uniform_mesh(2, 3, 2)
    path = tmp_path / "mesh.json"
    save_mesh(mesh, path)
    assert load_mesh(path) == mesh
    # float-only meshes survive too, without the exact tags
    fl = Mesh(1, 2, [
        Element(np.array([-math.pi / 2]), np.array([math.pi / 2])),
        Element(np.array([math.pi / 2]), np.array([math.pi / 2])),
    ])
    save_mesh(fl, path)
    back = load_mesh(path)
    assert back == fl and not back.rational


def test_mesh_dict_rejects_offdiagonal_maps():
    mesh = uniform_mesh(2, 1, 1)
    data = mesh_to_dict(mesh)
    data["elements"][0]["h"][0][1] = 0.25
    del data["elements"][0]["a_over_pi"]
    del data["elements"][0]["h_over_pi"]
    with pytest.raises(ValueError, match="diagonal"):
        mesh_from_dict(data)


def test_field_binary_round_trip_is_exact(tmp_path):
    mesh = uniform_mesh(2, 2, 3)
    rng = np.random.default_rng(3)
    field = NodalField(mesh, rng.standard_normal((4, 16, 2)))
    path = tmp_path / "f.bin"
    write_field(field, path)
    back = read_field(path, mesh)
    assert np.array_equal(back.values, field.values)


def test_field_binary_header_checks(tmp_path):
    mesh = uniform_mesh(1, 2, 2)
    field = NodalField(mesh, np.ones((2, 3, 1)))
    path = tmp_path / "f.bin"
    write_field(field, path)
    with pytest.raises(ValueError, match="does not match"):
        read_field(path, uniform_mesh(1, 3, 2))
    raw = path.read_bytes()
    path.write_bytes(raw[:-8])
    with pytest.raises(ValueError, match="truncated"):
        read_field(path, mesh)
    path.write_bytes(b"JUNK" + raw[4:])
    with pytest.raises(ValueError, match="not a field file"):
        read_field(path, mesh)


def test_field_json_round_trip(tmp_path):
    mesh = uniform_mesh(1, 2, 2)
    rng = np.random.default_rng(5)
    field = NodalField(mesh, rng.uniform(-1, 1, (2, 3, 2)))
    path = tmp_path / "f.json"
    write_field_json(field, path)
    back = read_field_json(path, mesh)
    assert np.array_equal(back.values, field.values)
    with pytest.raises(ValueError, match="does not match"):
        read_field_json(path, uniform_mesh(1, 4, 2))
