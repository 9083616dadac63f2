import pytest

from simulacra.engine import generate_universe
from simulacra.errors import IntegrityError, NotFoundError
from simulacra.gateway import MockBackend
from simulacra.model import GenerationConfig
from simulacra.scenario import multiverse_community, multiverse_thread
from simulacra.store import Store


@pytest.fixture
def store(tmp_path):
    return Store(tmp_path / "data")


@pytest.fixture
def universe(psychotherapy_design):
    cfg = GenerationConfig(persona_pool_size=15, thread_count=2, rng_seed=42)
    return generate_universe(psychotherapy_design, cfg, MockBackend())


class TestDesigns:
    def test_round_trip(self, store, psychotherapy_design):
        design_id = store.save_design(psychotherapy_design)
        assert store.load_design(design_id) == psychotherapy_design

    def test_content_addressed_id_is_stable(self, store, psychotherapy_design):
        assert store.save_design(psychotherapy_design) == store.save_design(psychotherapy_design)

    def test_unknown_id(self, store):
        with pytest.raises(NotFoundError):
            store.load_design("d-missing")


class TestUniverses:
    def test_round_trip(self, store, universe):
        store.save_universe(universe)
        assert store.load_universe(universe.id) == universe

    def test_corrupt_file_names_path(self, store, universe):
        store.save_universe(universe)
        path = store.universes_dir / f"{universe.id}.json"
        path.write_text(path.read_text()[:50])
        with pytest.raises(IntegrityError) as err:
            store.load_universe(universe.id)
        assert universe.id in str(err.value)

    def test_rewrite_with_different_content_rejected(self, store, universe):
        store.save_universe(universe)
        import dataclasses
        other = dataclasses.replace(universe, created_at="2030-01-01T00:00:00Z")
        with pytest.raises(IntegrityError):
            store.save_universe(other)

    def test_no_partial_files_after_write(self, store, universe):
        store.save_universe(universe)
        leftovers = [p for p in store.universes_dir.iterdir() if p.name.startswith(".tmp-")]
        assert leftovers == []

    def test_list_multiverse_siblings(self, store, psychotherapy_design):
        cfg = GenerationConfig(persona_pool_size=15, thread_count=1, rng_seed=1)
        backend = MockBackend()
        for seed in (101, 102, 103):
            u = multiverse_community("community-x", psychotherapy_design, cfg,
                                     backend, rng_seed=seed)
            store.save_universe(u)
        summaries = store.list_universes("community-x")
        assert len(summaries) == 3
        assert all(s["parent_community"] == "community-x" for s in summaries)
        assert store.list_universes("somewhere-else") == []


class TestBranches:
    def test_append_and_load(self, store, universe):
        store.save_universe(universe)
        branches = multiverse_thread(universe, universe.threads[0].id, 0, 2, MockBackend())
        ids = store.append_threads(universe.id, branches)
        assert len(ids) == 2
        loaded = store.load_branches(universe.id)
        assert [b.thread.id for b in loaded] == ids
        assert all(b.source_thread_id == universe.threads[0].id for b in loaded)

    def test_requires_existing_universe(self, store, universe):
        branches = multiverse_thread(universe, universe.threads[0].id, 0, 1, MockBackend())
        with pytest.raises(NotFoundError):
            store.append_threads("u-unknown", branches)

    def test_branches_do_not_touch_universe_file(self, store, universe):
        store.save_universe(universe)
        path = store.universes_dir / f"{universe.id}.json"
        before = path.read_text()
        branches = multiverse_thread(universe, universe.threads[0].id, 0, 1, MockBackend())
        store.append_threads(universe.id, branches)
        assert path.read_text() == before
