import numpy as np
import pytest

from logbench.enhancers import (add_event_ids, add_ngram_scores,
                                add_normalized, add_tokens,
                                aggregate_sequences)
from logbench.ngram import ngram_train
from logbench.parsers import DrainParser
from logbench.tables import EventTable, SequenceTable


def _ts(seconds):
    return (np.asarray(seconds, dtype=np.int64) * 1_000_000) \
        .view(np.dtype("datetime64[us]"))


def small_table():
    return EventTable({
        "seq_id": ["s1", "s2", "s1", None, "s2", "s1"],
        "m_message": ["send 100 bytes", "open file a", "send 2 bytes",
                      "noise 7", "open file b", "send 31 bytes"],
        "m_timestamp": _ts([0, 10, 5, 7, 12, 20]),
    })


def test_add_normalized_and_tokens():
    t = add_normalized(small_table())
    assert t["e_message_normalized"][0] == "send <NUM> bytes"
    t = add_tokens(t)
    assert t["e_words"][0] == ["send", "<NUM>", "bytes"]
    # without a normalized column, tokens come from the raw message
    raw = add_tokens(small_table())
    assert raw["e_words"][0] == ["send", "100", "bytes"]


def test_add_event_ids_continues_parser_state():
    parser = DrainParser()
    t = add_event_ids(add_normalized(small_table()), parser)
    ids = t["e_event_id"]
    assert ids.dtype == np.int64
    assert ids[0] == ids[2] == ids[5]  # the three send lines
    assert ids[1] == ids[4]
    n_before = len(parser.store)
    t2 = EventTable({"m_message": ["send 9 bytes"], "m_timestamp": _ts([0])})
    out = add_event_ids(add_normalized(t2), parser)
    assert out["e_event_id"][0] == ids[0]
    assert len(parser.store) == n_before


def test_aggregate_sequences():
    parser = DrainParser()
    t = add_event_ids(add_tokens(add_normalized(small_table())), parser)
    seqs = aggregate_sequences(t)
    assert isinstance(seqs, SequenceTable)
    assert list(seqs["seq_id"]) == ["s1", "s2"]  # first-seen order
    assert list(seqs["seq_len"]) == [3, 2]
    assert seqs["duration"][0] == np.timedelta64(20, "s")
    assert seqs["duration"][1] == np.timedelta64(2, "s")
    assert seqs["event_ids"][0] == [0, 0, 0]
    assert seqs["words"][1] == ["open", "file", "a", "open", "file", "b"]
    assert seqs.meta["events_without_seq_id"] == 1
    assert "label" not in seqs


def test_aggregate_labels_from_dict_and_table():
    t = small_table()
    seqs = aggregate_sequences(t, {"s1": True})
    assert list(seqs["label"]) == [True, False]
    assert seqs.meta["sequences_unlabeled"] == 1

    label_table = SequenceTable({"seq_id": ["s2", "s1"],
                                 "label": [True, False]})
    seqs = aggregate_sequences(t, label_table)
    assert list(seqs["label"]) == [False, True]
    assert seqs.meta["sequences_unlabeled"] == 0


def test_aggregate_requires_seq_id():
    t = EventTable({"m_message": ["x"], "m_timestamp": _ts([0])})
    with pytest.raises(ValueError):
        aggregate_sequences(t)


def test_add_ngram_scores():
    t = add_event_ids(add_normalized(small_table()), DrainParser())
    seqs = aggregate_sequences(t)
    model = ngram_train(seqs["event_ids"], n=2)
    scored = add_ngram_scores(seqs, model, p0=0.05)
    assert "e_ngram_score" in scored
    assert scored["e_ngram_score"].dtype == np.float64
    # trained on itself: every transition was seen
    assert scored["e_ngram_score"].max() == 0.0
    with pytest.raises(ValueError):
        add_ngram_scores(SequenceTable({"seq_id": ["a"], "seq_len": [1]}),
                         model)
