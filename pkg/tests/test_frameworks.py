import numpy as np
import pytest

import oracles
from qhist.dynamics import Schedule, TimeGrid
from qhist.frameworks import (
    IncompatibleFrameworks,
    IncompatibleProperties,
    Proposition,
    conjunction,
    query,
    refine,
)
from qhist.histories import (
    QueryOnInconsistentFamily,
    check_consistency,
    collapse_family,
    family_from_event_table,
)
from qhist.linalg import (
    EPS_CONS,
    as_projector,
    identity_projector,
    projector_onto,
    tensor,
)
from qhist.scenario import build_scenario, builtin_scenario
from qhist.spin import Direction, X, Y, Z, basis_for, spin_projector

GRID2 = TimeGrid((0.0, 1.0))
GRID3 = TimeGrid((0.0, 1.0, 2.0))
FREE2 = Schedule.free(2)


def frame_family(direction, grid=GRID2, labels=None):
    b = basis_for(direction)
    labels = labels or ("p", "m")
    return collapse_family(oracles.ZP, grid, FREE2, [b.plus, b.minus], labels)


def prop(direction, sign, time_index, label=""):
    return Proposition(spin_projector(direction, sign, label), time_index)


def test_query_within_framework():
    result = query(frame_family(X), prop(X, +1, 1, "x+"))
    assert result.meaningful
    assert result.probability == pytest.approx(0.5, abs=EPS_CONS)


def test_query_incompatible_axis_is_meaningless():
    result = query(frame_family(X), prop(Y, +1, 1, "y+"))
    assert not result.meaningful
    assert "commute" in result.reason


def test_query_x_property_in_z_framework():
    result = query(frame_family(Z), prop(X, +1, 1, "x+"))
    assert not result.meaningful
    assert "commute" in result.reason


def test_query_identity_is_certain():
    fam = frame_family(X, GRID3)
    for k in (1, 2):
        result = query(fam, Proposition(identity_projector(2), k))
        assert result.probability == pytest.approx(1.0, abs=EPS_CONS)


def test_query_identity_on_support_limited_family():
    built = build_scenario(builtin_scenario("eq27-split"))
    fam = built.family("eq27")
    result = query(fam, Proposition(identity_projector(4), 1))
    assert result.probability == pytest.approx(1.0, abs=EPS_CONS)


def test_query_branch_projector_on_two_spin_family():
    built = build_scenario(builtin_scenario("eq27-split"))
    fam = built.family("eq27")
    branch = as_projector(
        tensor(oracles.proj(oracles.ZP), oracles.proj(oracles.ZM)), "zA+zB-"
    )
    result = query(fam, Proposition(branch, 1))
    assert result.probability == pytest.approx(0.5, abs=EPS_CONS)


def test_query_union_of_events():
    # [x+] at the final time of the coarse x framework on a 3-time grid
    fam = frame_family(X, GRID3, ("x2+", "x2-"))
    result = query(fam, prop(X, +1, 2, "x+"))
    assert result.probability == pytest.approx(0.5, abs=EPS_CONS)
    # the psi event at t1 absorbs the initial state fully
    result = query(fam, Proposition(projector_onto(oracles.ZP, "z+"), 1))
    assert result.probability == pytest.approx(1.0, abs=EPS_CONS)


def test_query_splitting_projector_is_meaningless():
    # a rank-1 projector that commutes with I but covers neither branch fully
    fam = frame_family(Z, GRID3, ("z2+", "z2-"))
    tilted = spin_projector(Direction(0.3, 0.0), +1, "tilted")
    result = query(fam, Proposition(tilted, 1))
    assert not result.meaningful


def test_query_on_inconsistent_family_raises():
    rows = [
        [("x1+", projector_onto(oracles.XP, "x1+")), ("z2+", projector_onto(oracles.ZP, "z2+"))],
        [("x1+", projector_onto(oracles.XP, "x1+")), ("z2-", projector_onto(oracles.ZM, "z2-"))],
        [("x1-", projector_onto(oracles.XM, "x1-")), ("z2+", projector_onto(oracles.ZP, "z2+"))],
        [("x1-", projector_onto(oracles.XM, "x1-")), ("z2-", projector_onto(oracles.ZM, "z2-"))],
    ]
    fam = family_from_event_table(oracles.ZP, GRID3, FREE2, rows)
    with pytest.raises(QueryOnInconsistentFamily):
        query(fam, prop(X, +1, 1))


def test_query_validates_time_and_dim():
    fam = frame_family(X)
    with pytest.raises(ValueError, match="time index"):
        query(fam, prop(X, +1, 5))
    with pytest.raises(ValueError, match="dimension"):
        query(fam, Proposition(identity_projector(4), 1))


def test_conjunction_of_incompatible_properties_fails():
    with pytest.raises(IncompatibleProperties, match="commute"):
        conjunction(prop(X, +1, 1, "x+"), prop(Y, +1, 1, "y+"))


def test_conjunction_idempotent():
    p = prop(Z, +1, 1, "z+")
    joint = conjunction(p, p)
    assert np.allclose(joint.projector.matrix, p.projector.matrix)
    assert joint.projector.label == "z+"


def test_conjunction_disjoint_subsystems():
    pa = Proposition(
        as_projector(tensor(oracles.proj(oracles.ZP), oracles.I2), "zA+"), 1
    )
    pb = Proposition(
        as_projector(tensor(oracles.I2, oracles.proj(oracles.XP)), "xB+"), 1
    )
    joint = conjunction(pa, pb)
    expected = tensor(oracles.proj(oracles.ZP), oracles.proj(oracles.XP))
    assert np.allclose(joint.projector.matrix, expected)
    assert joint.projector.label == "zA+&xB+"


def test_conjunction_needs_matching_times():
    with pytest.raises(ValueError, match="same time"):
        conjunction(prop(Z, +1, 1), prop(Z, +1, 2))


def test_refine_with_itself_is_identity():
    fam = frame_family(X, labels=("x1+", "x1-"))
    refined = refine(fam, fam)
    assert [h.labels for h in refined.histories] == [h.labels for h in fam.histories]


def test_refine_incompatible_axes():
    with pytest.raises(IncompatibleFrameworks) as err:
        refine(frame_family(X), frame_family(Y))
    assert err.value.reason == "non-commuting"


def test_refine_split_family_against_rotated_copy(rng):
    built = build_scenario(builtin_scenario("eq27-split"))
    z_split = built.family("eq27")
    for _ in range(5):
        theta, phi = oracles.random_direction(rng)
        if min(theta, np.pi - theta) < 0.2:
            theta = 1.0  # keep clearly away from +/-z
        w = Direction(theta, phi)
        b = basis_for(w)
        rows = []
        for sa, sb, va, vb in (
            ("+", "-", b.plus, b.minus),
            ("-", "+", b.minus, b.plus),
        ):
            mat1 = as_projector(
                tensor(oracles.proj(va), oracles.proj(vb)), f"w{sa}{sb}1"
            )
            mat2 = as_projector(
                tensor(oracles.proj(va), oracles.proj(vb)), f"w{sa}{sb}2"
            )
            rows.append([(f"w{sa}{sb}1", mat1), (f"w{sa}{sb}2", mat2)])
        w_split = family_from_event_table(
            built.initial_state, built.grid, built.schedule, rows
        )
        with pytest.raises(IncompatibleFrameworks) as err:
            refine(z_split, w_split)
        assert err.value.reason == "non-commuting"


def test_refine_symmetric_when_it_succeeds():
    # z framework refined with its own coarse-graining, both ways around
    fine = frame_family(Z, labels=("z1+", "z1-"))
    coarse = family_from_event_table(
        oracles.ZP, GRID2, FREE2, [[("1", identity_projector(2))]]
    )
    a = refine(fine, coarse)
    b = refine(coarse, fine)
    assert sorted(h.labels for h in a.histories) == sorted(h.labels for h in b.histories)
    ra, rb = check_consistency(a), check_consistency(b)
    assert sorted(ra.probabilities) == pytest.approx(sorted(rb.probabilities))


def test_refine_preserves_query_answers():
    fine = frame_family(Z, labels=("z1+", "z1-"))
    coarse = family_from_event_table(
        oracles.ZP, GRID2, FREE2, [[("1", identity_projector(2))]]
    )
    refined = refine(fine, coarse)
    p = prop(Z, +1, 1, "z+")
    assert query(refined, p).probability == pytest.approx(
        query(fine, p).probability, abs=EPS_CONS
    )


def test_refine_precondition_mismatches():
    fam = frame_family(X)
    other_grid = frame_family(X, GRID3)
    with pytest.raises(ValueError, match="grid"):
        refine(fam, other_grid)
    other_state = collapse_family(
        oracles.XP, GRID2, FREE2, [basis_for(X).plus, basis_for(X).minus]
    )
    with pytest.raises(ValueError, match="initial state"):
        refine(fam, other_state)
