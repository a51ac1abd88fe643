import pytest
from hypothesis import given, strategies as st

from rulehide.dataset import (
    AttributeSchema,
    Dataset,
    DatasetError,
    Instance,
    Label,
    Provenance,
    add_partial_instances,
    class_counts,
    load_csv,
    swap_class,
    write_csv,
)


def make_dataset(rows, names=("x", "y")):
    schema = AttributeSchema(tuple(names))
    return Dataset(
        schema,
        tuple(Instance(tuple(values), Label(label)) for *values, label in rows),
    )


class TestLoadCsv:
    def test_single_row(self):
        ds = load_csv(b"x,y,class\n1,0,p\n")
        assert ds.schema.names == ("x", "y")
        assert len(ds) == 1
        assert ds.instances[0].values == (1, 0)
        assert ds.instances[0].label is Label.P
        assert ds.instances[0].provenance is Provenance.ORIGINAL

    def test_empty_body(self):
        ds = load_csv("x,y,class\n")
        assert len(ds) == 0
        assert ds.schema.names == ("x", "y")

    def test_non_binary_cell(self):
        with pytest.raises(DatasetError, match="non-binary value at line 2"):
            load_csv("x,y,class\n1,2,p\n")

    def test_unknown_class_token(self):
        with pytest.raises(DatasetError, match="unknown class token at line 3"):
            load_csv("x,y,class\n1,0,p\n0,0,q\n")

    def test_ragged_row(self):
        with pytest.raises(DatasetError, match="ragged row at line 2"):
            load_csv("x,y,class\n1,0\n")

    def test_malformed_header(self):
        with pytest.raises(DatasetError, match="line 1"):
            load_csv("x,y\n1,0\n")
        with pytest.raises(DatasetError, match="line 1"):
            load_csv("x,x,class\n1,0,p\n")

    def test_provenance_column_ignored_on_load(self):
        ds = load_csv("x,class,_prov\n1,p,synth\n")
        assert ds.instances[0].provenance is Provenance.ORIGINAL


class TestWriteCsv:
    def test_single_instance(self):
        ds = make_dataset([(1, 0, "p")])
        assert write_csv(ds) == "x,y,class\n1,0,p\n"

    def test_partial_requires_flag(self):
        ds = add_partial_instances(make_dataset([]), 1, 0, {"x": 1})
        with pytest.raises(DatasetError, match="unspecified"):
            write_csv(ds)
        assert write_csv(ds, allow_partial=True) == "x,y,class\n1,?,p\n"

    def test_provenance_column(self):
        ds = swap_class(make_dataset([(1, 0, "p")]), [0])
        out = write_csv(ds, include_provenance=True)
        assert out == "x,y,class,_prov\n1,0,n,swap\n"


@given(
    st.lists(
        st.tuples(st.integers(0, 1), st.integers(0, 1), st.sampled_from(["p", "n"])),
        max_size=40,
    )
)
def test_round_trip_identity(rows):
    ds = make_dataset(rows)
    back = load_csv(write_csv(ds))
    assert back.schema.names == ds.schema.names
    assert [i.values for i in back.instances] == [i.values for i in ds.instances]
    assert [i.label for i in back.instances] == [i.label for i in ds.instances]


class TestSwapClass:
    def test_flips_and_records(self):
        ds = make_dataset([(1, 0, "p"), (0, 1, "n")])
        out = swap_class(ds, [0, 1])
        assert out.instances[0].label is Label.N
        assert out.instances[0].pre_swap_label is Label.P
        assert out.instances[0].provenance is Provenance.SWAPPED
        assert out.instances[1].label is Label.P

    def test_empty_selection_is_identity(self):
        ds = make_dataset([(1, 0, "p")])
        assert swap_class(ds, []) == ds

    def test_out_of_range(self):
        with pytest.raises(DatasetError, match="out of range"):
            swap_class(make_dataset([(1, 0, "p")]), [5])

    def test_preserves_total_count(self):
        ds = make_dataset([(1, 0, "p"), (0, 1, "n"), (1, 1, "p")])
        out = swap_class(ds, [0, 1])
        p, n = class_counts(out)
        assert p + n == 3
        # selected one P and one N: counts move by (-1+1, +1-1)
        assert (p, n) == (2, 1)

    def test_paper_subset_counts(self):
        # swapping 9 of 58 positives in a 58p/37n population leaves 49p/46n
        ds = make_dataset([(1, 0, "p")] * 58 + [(1, 0, "n")] * 37)
        out = swap_class(ds, range(9))
        assert class_counts(out) == (49, 46)

    def test_paper_negative_swap(self):
        # swapping 5 negatives in a 120p/50n population leaves 125p/45n
        ds = make_dataset([(0, 0, "p")] * 120 + [(0, 0, "n")] * 50)
        out = swap_class(ds, range(120, 125))
        assert class_counts(out) == (125, 45)


class TestAddPartialInstances:
    def test_paper_batch(self):
        ds = make_dataset([(1, 1, "p")])
        out = add_partial_instances(ds, 67, 28, {"x": 1})
        assert len(out) == 96
        assert class_counts(out) == (68, 28)
        batch = out.instances[1:]
        assert all(i.values == (1, None) for i in batch)
        assert all(i.provenance is Provenance.SYNTHETIC for i in batch)

    def test_zero_is_identity(self):
        ds = make_dataset([(1, 1, "p")])
        assert add_partial_instances(ds, 0, 0) == ds

    def test_negative_only(self):
        out = add_partial_instances(make_dataset([]), 0, 100)
        assert class_counts(out) == (0, 100)

    def test_unknown_attribute(self):
        with pytest.raises(DatasetError, match="unknown attribute"):
            add_partial_instances(make_dataset([]), 1, 0, {"zz": 1})


class TestClassCounts:
    def test_all_and_none(self):
        ds = make_dataset([(1, 0, "p"), (0, 1, "n"), (1, 1, "p")])
        assert class_counts(ds) == (2, 1)
        assert class_counts(ds, lambda inst: False) == (0, 0)

    def test_filtered(self):
        ds = make_dataset([(1, 0, "p"), (0, 0, "n"), (1, 1, "n"), (0, 1, "p")])
        # x = 1 rows: (1,0,p) and (1,1,n)
        assert class_counts(ds, lambda inst: inst.values[0] == 1) == (1, 1)


@given(st.integers(0, 30), st.integers(0, 30))
def test_partial_addition_grows_counts_exactly(count_p, count_n):
    ds = make_dataset([(0, 0, "p"), (1, 1, "n")])
    out = add_partial_instances(ds, count_p, count_n)
    assert class_counts(out) == (1 + count_p, 1 + count_n)


def test_provenance_partition_constant_under_pipeline_ops():
    ds = make_dataset([(0, 0, "p"), (1, 1, "n"), (1, 0, "p")])

    def non_synthetic(d):
        return sum(1 for i in d.instances if i.provenance is not Provenance.SYNTHETIC)

    swapped = swap_class(ds, [0])
    grown = add_partial_instances(swapped, 5, 3, {"x": 1})
    assert non_synthetic(swapped) == non_synthetic(grown) == 3
