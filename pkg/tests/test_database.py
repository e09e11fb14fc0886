import pytest

from ucqlab.database import Database, DatabaseError, load_database, save_database


def test_intern_and_decode():
    db = Database()
    a = db.intern("apple")
    assert db.intern("apple") == a
    assert db.decode(a) == "apple"
    assert db.lookup("apple") == a
    assert db.lookup("missing") is None


def test_add_and_query_tuples():
    db = Database()
    db.add_tuple("R", ("1", "2"))
    db.add_tuple("R", ("1", "2"))  # duplicate collapses
    db.add_tuple("R", ("2", "3"))
    rel = db.relation("R", 2)
    assert len(rel) == 2
    assert {db.decode_tuple(t) for t in rel} == {("1", "2"), ("2", "3")}


def test_arity_mismatch_rejected():
    db = Database()
    db.add_tuple("R", ("1", "2"))
    with pytest.raises(DatabaseError):
        db.add_tuple("R", ("1",))


def test_missing_relation_is_empty():
    db = Database()
    assert len(db.relation("nope", 3)) == 0


def test_column_index():
    db = Database()
    db.add_tuple("R", ("a", "x"))
    db.add_tuple("R", ("a", "y"))
    db.add_tuple("R", ("b", "x"))
    rel = db.relation("R", 2)
    a = db.lookup("a")
    assert len(rel.column_index(0)[a]) == 2
    assert set(rel.column_values(0)) == {db.lookup("a"), db.lookup("b")}


def test_size_and_active_domain():
    db = Database()
    db.add_tuple("R", ("a", "b"))
    db.add_tuple("S", ("b",))
    assert db.size() == 2
    assert {db.decode(c) for c in db.active_domain()} == {"a", "b"}


def test_save_load_roundtrip(tmp_path):
    db = Database()
    db.add_tuple("R", ("1", "2"))
    db.add_tuple("R", ("3", "4"))
    db.add_tuple("S", ("hello",))
    save_database(db, tmp_path / "out")
    back = load_database(tmp_path / "out")
    for sym, arity in (("R", 2), ("S", 1)):
        want = {db.decode_tuple(t) for t in db.relation(sym, arity)}
        got = {back.decode_tuple(t) for t in back.relation(sym, arity)}
        assert want == got


def test_load_ragged_rows_rejected(tmp_path):
    d = tmp_path / "db"
    d.mkdir()
    (d / "R.csv").write_text("1,2\n3\n")
    with pytest.raises(DatabaseError):
        load_database(d)


def test_load_deduplicates(tmp_path):
    d = tmp_path / "db"
    d.mkdir()
    (d / "R.csv").write_text("1,2\n1,2\n")
    db = load_database(d)
    assert len(db.relation("R", 2)) == 1
