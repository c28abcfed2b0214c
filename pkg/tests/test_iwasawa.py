import numpy as np
import pytest

from grouplab.catalog import build_catalog, peter_weyl_basis
from grouplab.groups import circle_group
from grouplab.hilbert import L2Function, unit_weights
from grouplab.iwasawa import (
    check_K_semicomplete,
    lift_family,
    make_iwasawa_model,
    max_reproduction_residual,
    reproduction_residual,
)
from grouplab.semicomplete import OmissionSpec, build_riemann_lebesgue_family


@pytest.fixture(scope="module")
def gauss_model():
    return make_iwasawa_model(
        "circle:64", (-2.0, 2.0), (-2.0, 2.0), 32, 32, profile="gauss:sigma=0.7"
    )


@pytest.fixture(scope="module")
def k_catalog(gauss_model):
    return build_catalog(gauss_model.K, truncation=3)


def test_uniform_profile_on_unit_box_exact():
    model = make_iwasawa_model(
        "circle:16", (-0.5, 0.5), (-0.5, 0.5), 8, 8, profile="uniform"
    )
    assert np.all(model.profile == 0.0)
    assert model.condition_i_residual() == 0.0
    assert model.condition_ii_residual() < 1e-15
    assert abs(model.an_weights.sum() - 1.0) < 1e-12


def test_gauss_profile_renormalized(gauss_model):
    assert gauss_model.condition_i_residual() == 0.0
    assert gauss_model.condition_ii_residual() < 1e-10
    # oracle: recompute the normalization constant by brute-force sum
    mass = sum(
        w * np.exp(2.0 * float(f.real))
        for w, f in zip(gauss_model.an_weights, gauss_model.profile)
    )
    assert abs(mass - 1.0) < 1e-10


def test_range_excluding_identity_rejected():
    with pytest.raises(ValueError):
        make_iwasawa_model("circle:16", (0.5, 1.5), (-1.0, 1.0), 8, 8)
    with pytest.raises(ValueError):
        make_iwasawa_model("circle:16", (-1.0, 1.0), (-2.0, -1.0), 8, 8)


def test_degenerate_range_rejected():
    with pytest.raises(ValueError):
        make_iwasawa_model("circle:16", (1.0, 1.0), (-1.0, 1.0), 8, 8)
    with pytest.raises(ValueError):
        make_iwasawa_model("circle:16", (-1.0, 1.0), (-1.0, 1.0), 0, 8)


def test_non_circle_k_rejected():
    with pytest.raises(ValueError):
        make_iwasawa_model("sym:3", (-1.0, 1.0), (-1.0, 1.0), 8, 8)


def test_profile_table_roundtrip(tmp_path):
    table = np.linspace(-1.0, 0.5, 24).reshape(4, 6)
    path = tmp_path / "profile.txt"
    np.savetxt(path, table)
    model = make_iwasawa_model(
        "circle:16", (-1.0, 1.0), (-1.5, 1.5), 4, 6, profile=f"table:{path}"
    )
    assert model.condition_i_residual() == 0.0
    assert model.condition_ii_residual() < 1e-12


def test_bad_profiles_rejected(tmp_path):
    with pytest.raises(ValueError):
        make_iwasawa_model("circle:16", (-1, 1), (-1, 1), 4, 4, profile="banana")
    with pytest.raises(ValueError):
        make_iwasawa_model("circle:16", (-1, 1), (-1, 1), 4, 4, profile="gauss:sigma=0")
    path = tmp_path / "short.txt"
    np.savetxt(path, np.zeros((2, 2)))
    with pytest.raises(ValueError):
        make_iwasawa_model("circle:16", (-1, 1), (-1, 1), 4, 4, profile=f"table:{path}")


def test_lift_constant_family_uniform_profile():
    model = make_iwasawa_model(
        "circle:16", (-0.5, 0.5), (-0.5, 0.5), 8, 8, profile="uniform"
    )
    cat = build_catalog(model.K, truncation=0)
    xi = peter_weyl_basis(cat)   # just the constant character
    lifted = lift_family(model, xi)
    assert np.max(np.abs(lifted.members - 1.0)) < 1e-12
    g = lifted.gram_matrix()
    assert abs(g[0, 0] - 1.0) < 1e-12


def test_lift_gram_matches_source(gauss_model, k_catalog):
    xi = peter_weyl_basis(k_catalog)
    assert xi.n_members == 7
    lifted = lift_family(gauss_model, xi)
    residual = np.max(np.abs(lifted.gram_matrix() - xi.gram_matrix()))
    assert residual < 1e-9
    assert np.max(np.abs(np.diag(lifted.gram_matrix()) - 1.0)) < 1e-9


def test_lift_restriction_is_bitwise_source(gauss_model, k_catalog):
    xi = peter_weyl_basis(k_catalog)
    lifted = lift_family(gauss_model, xi)
    restricted = lifted.restrict_to_k()
    assert np.array_equal(restricted.members, xi.members)
    assert restricted.blocks == xi.blocks


def test_lift_of_omission_family_restricts_exactly(gauss_model, k_catalog):
    omit = OmissionSpec(omitted=("m:3", "m:-3"))
    xi = build_riemann_lebesgue_family(k_catalog, omit)
    lifted = lift_family(gauss_model, xi)
    restricted = lifted.restrict_to_k()
    assert np.array_equal(restricted.members, xi.members)


def test_lift_family_group_mismatch(gauss_model):
    cat = build_catalog(circle_group(32), truncation=2)
    xi = peter_weyl_basis(cat)
    with pytest.raises(ValueError):
        lift_family(gauss_model, xi)


def test_check_k_semicomplete_full_family(gauss_model, k_catalog):
    from grouplab.hilbert import random_function

    xi = peter_weyl_basis(k_catalog)
    lifted = lift_family(gauss_model, xi)
    testset = [random_function(gauss_model.K, s) for s in range(5)]
    report = check_K_semicomplete(lifted, k_catalog, unit_weights(1), testset)
    assert report.max_defect < 1e-10


def test_check_k_semicomplete_omitted_character(gauss_model, k_catalog):
    omit = OmissionSpec(omitted=("m:3",))
    xi = build_riemann_lebesgue_family(k_catalog, omit)
    lifted = lift_family(gauss_model, xi)
    f = L2Function(gauss_model.K, np.exp(3j * gauss_model.K.thetas))
    report = check_K_semicomplete(lifted, k_catalog, unit_weights(1), [f])
    assert abs(report.max_defect - 1.0) < 1e-9


def test_check_k_semicomplete_retained_span(gauss_model, k_catalog):
    omit = OmissionSpec(omitted=("m:3",))
    xi = build_riemann_lebesgue_family(k_catalog, omit)
    lifted = lift_family(gauss_model, xi)
    testset = [xi.member_flat(k) for k in range(xi.n_members)]
    report = check_K_semicomplete(lifted, k_catalog, unit_weights(1), testset)
    assert report.max_defect < 1e-9


def test_reproduction_residual_uniform_profile_zero():
    model = make_iwasawa_model(
        "circle:16", (-0.5, 0.5), (-0.5, 0.5), 8, 8, profile="uniform"
    )
    assert max_reproduction_residual(model) < 1e-12


def test_reproduction_residual_gauss_profile(gauss_model):
    # at the identity node the residual vanishes; far from it, it does not
    assert reproduction_residual(gauss_model) < 1e-9
    assert max_reproduction_residual(gauss_model) > 1e-2
    with pytest.raises(IndexError):
        reproduction_residual(gauss_model, an_index=10**9)


def test_lifted_family_csv_export(gauss_model, k_catalog, tmp_path):
    from grouplab.config import lifted_family_to_csv

    xi = peter_weyl_basis(k_catalog)
    lifted = lift_family(gauss_model, xi)
    path = tmp_path / "lifted.csv"
    lifted_family_to_csv(lifted, path)
    lines = path.read_text().strip().split("\n")
    assert lines[0] == "member,node,re,im"
    n_nodes = gauss_model.K.n_nodes * gauss_model.n_an
    assert len(lines) == 1 + xi.n_members * n_nodes
    first = lines[1].split(",")
    assert first[0] == "member:m:0[0][0]"
    got = complex(float(first[2]), float(first[3]))
    assert abs(got - lifted.members[0, 0]) < 1e-15
