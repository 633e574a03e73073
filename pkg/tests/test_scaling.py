import numpy as np
import pytest
from hypothesis import given, strategies as st

from fodm import AttributeSpec, ValidationError, apply_alpha_cut, bind_labels, build_context
from fodm.fcm import MembershipMatrix, cluster_attribute, read_memberships_csv
from fodm.scaling import context_to_csv, read_context_csv

from conftest import OBJECTS, TABLE2, TABLE5

NA = np.nan


@pytest.fixture
def table2():
    return read_memberships_csv(TABLE2.read_text())


def block(matrix, cols):
    return MembershipMatrix(matrix.object_ids, tuple(matrix.cluster_ids[c] for c in cols), matrix.mu[:, cols])


def same_cells(a, b):
    return np.array_equal(np.isnan(a), np.isnan(b)) and np.array_equal(np.nan_to_num(a), np.nan_to_num(b))


def test_salary_cut_matches_table3(table2):
    cut = apply_alpha_cut(block(table2, [0, 1, 2]), 0.3)
    assert same_cells(cut.mu, TABLE5[:, :3])
    assert cut.get("t1", "C1") is None
    assert cut.get("t2", "C1") == 0.3
    assert cut.get("t1", "C3") == 0.4


def test_age_cut_matches_table3(table2):
    cut = apply_alpha_cut(block(table2, [3, 4]), 0.5)
    assert same_cells(cut.mu, TABLE5[:, 3:])
    assert cut.get("t2", "C4") is None
    assert cut.get("t3", "C5") is None
    assert cut.get("t5", "C5") is None


def test_zero_alpha_keeps_positive_cells(table2):
    cut = apply_alpha_cut(table2, 0.0)
    assert same_cells(cut.mu, table2.mu)


def matrices():
    return st.integers(1, 6).flatmap(
        lambda n: st.integers(1, 4).flatmap(
            lambda k: st.lists(
                st.one_of(st.just(NA), st.floats(0, 1)), min_size=n * k, max_size=n * k
            ).map(lambda v: MembershipMatrix(tuple(f"o{i}" for i in range(n)),
                                             tuple(f"C{j}" for j in range(k)),
                                             np.array(v).reshape(n, k)))
        )
    )


@given(matrices(), st.floats(0, 1), st.floats(0, 1))
def test_alpha_monotone_and_idempotent(matrix, a1, a2):
    lo, hi = sorted((a1, a2))
    kept_lo = ~np.isnan(apply_alpha_cut(matrix, lo).mu)
    kept_hi = ~np.isnan(apply_alpha_cut(matrix, hi).mu)
    assert not np.any(kept_hi & ~kept_lo)
    once = apply_alpha_cut(matrix, hi)
    assert same_cells(apply_alpha_cut(once, hi).mu, once.mu)
    present = once.mu[~np.isnan(once.mu)]
    assert np.all(present >= hi) and np.all(present > 0)


def test_alpha_out_of_range(table2):
    with pytest.raises(ValidationError):
        apply_alpha_cut(table2, 1.2)


def test_bind_labels_salary_and_age():
    salary = cluster_attribute([800, 600, 400, 900, 1000, 500],
                               AttributeSpec("SALARY", 3, 0.3, ("Low", "Medium", "High"), display="Salary"),
                               cluster_ids=("C1", "C2", "C3"))
    spec = AttributeSpec("SALARY", 3, 0.3, ("Low", "Medium", "High"), display="Salary")
    names = [(b.cluster_id, b.display_name) for b in bind_labels(salary, spec)]
    assert names == [("C1", "Salary(Low)"), ("C2", "Salary(Medium)"), ("C3", "Salary(High)")]

    age_spec = AttributeSpec("AGE", 2, 0.5, ("Young", "Adult"), display="Age")
    age = cluster_attribute([30, 35, 26, 40, 27, 30], age_spec, cluster_ids=("C4", "C5"))
    names = [(b.cluster_id, b.display_name) for b in bind_labels(age, age_spec)]
    assert names == [("C4", "Age(Young)"), ("C5", "Age(Adult)")]
    # ascending centers carry ascending labels
    assert age.centers[0] < age.centers[1]


def test_bind_labels_arity_mismatch():
    model = cluster_attribute([1, 2, 3, 10], AttributeSpec("x", 2, 0.1, ("a", "b")))
    with pytest.raises(ValidationError, match="labels"):
        bind_labels(model, AttributeSpec("x", 3, 0.1, ("a", "b", "c")))


def test_context_is_table5(example_result):
    ctx = example_result.context
    assert ctx.object_ids == OBJECTS
    assert [s.display_name for s in ctx.scale_attributes] == [
        "Salary(Low)", "Salary(Medium)", "Salary(High)", "Age(Young)", "Age(Adult)"]
    assert ctx.cluster_ids == ("C1", "C2", "C3", "C4", "C5")
    assert same_cells(ctx.cells, TABLE5)


def test_single_attribute_context(table2, table5):
    cut = apply_alpha_cut(block(table2, [3, 4]), 0.5)
    ctx = build_context([cut], [table5.scale_attributes[3:]])
    assert same_cells(ctx.cells, table5.subcontext("Age").cells)


def test_disjoint_objects_rejected(table2, table5):
    a = block(table2, [3, 4])
    b = MembershipMatrix(tuple(o + "x" for o in a.object_ids), ("C1", "C2", "C3"), table2.mu[:, :3])
    with pytest.raises(ValidationError, match="object"):
        build_context([a, b], [table5.scale_attributes[3:], table5.scale_attributes[:3]])


def test_context_csv_roundtrip(table5):
    text = context_to_csv(table5)
    assert text.splitlines()[0] == "object,Salary(Low),Salary(Medium),Salary(High),Age(Young),Age(Adult)"
    assert text.splitlines()[1] == "t1,,0.5,0.4,0.5,0.5"
    back = read_context_csv(text)
    assert back.scale_attributes == table5.scale_attributes
    assert back.object_ids == table5.object_ids
    assert same_cells(back.cells, table5.cells)


def test_context_rejects_zero_cell():
    from fodm.scaling import FuzzyFormalContext, ScaleAttribute

    with pytest.raises(ValidationError):
        FuzzyFormalContext(("a",), (ScaleAttribute("A", "x", "C1"),), [[0.0]])
