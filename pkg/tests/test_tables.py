import numpy as np
import pytest

from logbench.tables import (EventTable, SequenceTable, Table,
                             split_train_test, validate_event_table)


def small_events():
    return EventTable({
        "m_message": ["alpha one", "beta two", "gamma three"],
        "m_timestamp": np.array(["2020-01-01T00:00:00",
                                 "2020-01-01T00:00:01",
                                 "2020-01-01T00:00:02"],
                                dtype="datetime64[us]"),
        "seq_id": ["s1", "s1", None],
        "count": [1, 2, 3],
        "flag": [True, False, True],
    })


def test_column_coercion_kinds():
    t = small_events()
    assert t["m_message"].dtype.kind == "O"
    assert t["count"].dtype == np.int64
    assert t["flag"].dtype == np.bool_
    assert t["m_timestamp"].dtype == np.dtype("datetime64[us]")


def test_list_columns_stay_ragged():
    t = Table({"words": [["a", "b"], ["c"], ["d", "e"]]})
    assert t["words"].dtype.kind == "O"
    assert t["words"][0] == ["a", "b"]
    assert t["words"][1] == ["c"]
    # equal-length sublists must not become a 2-d array either
    t2 = Table({"words": [["a", "b"], ["c", "d"]]})
    assert t2["words"].dtype.kind == "O"
    assert t2["words"][1] == ["c", "d"]


def test_length_mismatch_rejected():
    with pytest.raises(ValueError):
        Table({"a": [1, 2], "b": [1, 2, 3]})


def test_columns_frozen():
    t = small_events()
    with pytest.raises(ValueError):
        t["count"][0] = 99


def test_with_column_and_take_and_head():
    t = small_events()
    t2 = t.with_column("extra", [9, 8, 7])
    assert "extra" not in t
    assert list(t2["extra"]) == [9, 8, 7]
    sub = t2.take([2, 0])
    assert list(sub["count"]) == [3, 1]
    assert sub["m_message"][0] == "gamma three"
    assert len(t2.head(2)) == 2


def test_equals():
    a = small_events()
    b = small_events()
    assert a.equals(b)
    assert not a.equals(b.with_column("x", [0, 0, 0]))
    assert not a.equals(b.take([0, 1, 1]))


def test_validate_ok_and_missing():
    report = validate_event_table(small_events())
    assert report.is_valid
    assert report.missing_columns == []

    bad = Table({"m_message": ["x"]})
    report = validate_event_table(bad)
    assert not report.is_valid
    assert report.missing_columns == ["m_timestamp"]
    assert report.warnings


def test_validate_finds_nulls_but_exempts_seq_id():
    t = EventTable({
        "m_message": ["ok", None],
        "m_timestamp": np.array(["2020-01-01", "NaT"], dtype="datetime64[us]"),
        "seq_id": [None, "s"],
        "score": [1.0, float("nan")],
    })
    report = validate_event_table(t)
    cells = set(report.null_cells)
    assert ("m_message", 1) in cells
    assert ("m_timestamp", 1) in cells
    assert ("score", 1) in cells
    assert not any(col == "seq_id" for col, _ in cells)


def test_save_load_round_trip(tmp_path):
    t = small_events().with_column("words", [["a", "b"], [], ["c"]]) \
                      .with_column("ids", [[1, 2], [3], []]) \
                      .with_column("score", [1.5, float("nan"), 0.0])
    path = tmp_path / "t.table.json"
    t.save(path)
    back = Table.load(path)
    assert isinstance(back, EventTable)
    assert back.equals(t)

    # byte-identical re-serialization
    path2 = tmp_path / "t2.table.json"
    back.save(path2)
    assert path.read_bytes() == path2.read_bytes()


def test_load_rejects_foreign_json(tmp_path):
    p = tmp_path / "x.json"
    p.write_text('{"hello": 1}')
    with pytest.raises(ValueError):
        Table.load(p)


def test_sequence_table_kind_round_trip(tmp_path):
    s = SequenceTable({"seq_id": ["a"], "label": [False],
                       "seq_len": [3]})
    p = tmp_path / "s.table.json"
    s.save(p)
    assert isinstance(Table.load(p), SequenceTable)


def test_write_csv(tmp_path):
    p = tmp_path / "t.csv"
    small_events().with_column("words", [["a", "b"], [], ["c"]]).write_csv(p)
    lines = p.read_text().splitlines()
    assert lines[0].startswith("m_message,")
    assert len(lines) == 4
    assert "a b" in lines[1]


def test_split_fraction_bounds():
    with pytest.raises(ValueError):
        split_train_test(small_events(), 1.5, seed=0)


def test_split_partitions_rows():
    t = Table({"v": list(range(100))})
    train, test = split_train_test(t, 0.3, seed=7)
    assert len(train) == 30 and len(test) == 70
    together = sorted(list(train["v"]) + list(test["v"]))
    assert together == list(range(100))
    # original order preserved inside each side
    assert list(train["v"]) == sorted(train["v"])
    assert list(test["v"]) == sorted(test["v"])


def test_split_deterministic_and_seed_sensitive():
    t = Table({"v": list(range(60))})
    a1, _ = split_train_test(t, 0.5, seed=1)
    a2, _ = split_train_test(t, 0.5, seed=1)
    b1, _ = split_train_test(t, 0.5, seed=2)
    assert list(a1["v"]) == list(a2["v"])
    assert list(a1["v"]) != list(b1["v"])


def test_split_keeps_sequences_together():
    n = 200
    seqs = [f"s{i % 37}" for i in range(n)]
    t = Table({"seq_id": seqs, "row": list(range(n))})
    train, test = split_train_test(t, 0.4, seed=3)
    train_seqs = set(train["seq_id"])
    test_seqs = set(test["seq_id"])
    assert not (train_seqs & test_seqs)
    assert len(train_seqs) == round(0.4 * 37)
    assert len(train) + len(test) == n


def test_split_null_seq_ids_are_singletons():
    t = Table({"seq_id": ["a", None, "a", None], "row": [0, 1, 2, 3]})
    train, test = split_train_test(t, 0.5, seed=0)
    # 3 units total (a, and two singletons); a's rows stay together
    sides = []
    for part in (train, test):
        rows = set(part["row"])
        sides.append(rows)
    a_side = [0 in s for s in sides]
    assert (2 in sides[0]) == a_side[0]
    assert len(sides[0] | sides[1]) == 4


def test_split_property_loop():
    rng = np.random.default_rng(0)
    for trial in range(30):
        n = int(rng.integers(1, 80))
        frac = float(rng.uniform(0.0, 1.0))
        cols = {"row": list(range(n))}
        if trial % 2:
            cols["seq_id"] = [f"s{int(rng.integers(0, max(1, n // 3)))}"
                              for _ in range(n)]
        t = Table(cols)
        train, test = split_train_test(t, frac, seed=trial)
        assert len(train) + len(test) == n
        assert sorted(list(train["row"]) + list(test["row"])) == \
            list(range(n))
        if "seq_id" in cols:
            assert not (set(train["seq_id"]) & set(test["seq_id"]))
