import pytest

from simulacra.errors import ExpansionStalledError
from simulacra.gateway import AuditLog, CompletionBackend, MockBackend
from simulacra.model import FINISH_STOP, GenerationConfig, Persona
from simulacra.personas import expand_personas, parse_persona_lines


class TestParsePersonaLines:
    def test_paper_line(self):
        raw = ("Leo Yamamura, pursuing a doctorate in international relations "
               "with a focus on international economics")
        [p] = parse_persona_lines(raw)
        assert p.name == "Leo Yamamura"
        assert p.description.startswith("pursuing a doctorate")

    def test_malformed_lines_skipped(self):
        assert parse_persona_lines("garbage line without comma") == []
        assert parse_persona_lines(", no name") == []
        assert parse_persona_lines("no description,   ") == []

    def test_blank_lines_tolerated(self):
        assert len(parse_persona_lines("A, b\n\nC, d")) == 2

    def test_first_comma_delimits(self):
        [p] = parse_persona_lines("Ada Chen, writes essays, often long ones")
        assert p.name == "Ada Chen"
        assert p.description == "writes essays, often long ones"


class RiggedBackend(CompletionBackend):
    """Always returns the same persona line; forces expansion to stall."""

    deterministic = True

    def _raw_complete(self, request):
        return "Same Person, the only output this model knows\n\n", FINISH_STOP


class TestExpandPersonas:
    def seeds(self, n=5):
        return [Persona(f"Seed Person {i}", f"seed description {i}") for i in range(n)]

    def test_noop_when_target_equals_seeds(self):
        backend = MockBackend()
        config = GenerationConfig(persona_pool_size=3)
        seeds = self.seeds(3)
        roster = expand_personas(seeds, 3, backend, config)
        assert roster == seeds
        assert len(backend.audit_log) == 0

    def test_target_below_seeds_rejected(self):
        with pytest.raises(ValueError):
            expand_personas(self.seeds(5), 3, MockBackend(), GenerationConfig())

    def test_expansion_to_target(self, affairs_design):
        config = GenerationConfig(rng_seed=7)
        roster = expand_personas(affairs_design.seed_personas, 200, MockBackend(), config)
        assert len(roster) == 200
        names = [p.name.lower() for p in roster]
        assert len(set(names)) == 200
        assert roster[:10] == list(affairs_design.seed_personas)

    def test_deterministic_at_fixed_seed(self, affairs_design):
        config = GenerationConfig(rng_seed=11)
        a = expand_personas(affairs_design.seed_personas, 100, MockBackend(), config)
        b = expand_personas(affairs_design.seed_personas, 100, MockBackend(), config)
        assert a == b

    def test_stall_carries_partial_roster(self):
        config = GenerationConfig()
        with pytest.raises(ExpansionStalledError) as err:
            expand_personas(self.seeds(5), 10, RiggedBackend(AuditLog()), config)
        assert len(err.value.partial_roster) == 6
        assert err.value.partial_roster[5].name == "Same Person"

    def test_duplicates_dropped_case_insensitively(self):
        class DupBackend(CompletionBackend):
            deterministic = True
            calls = 0

            def _raw_complete(self, request):
                self.calls += 1
                return (f"SEED PERSON 0, shouting duplicate\n"
                        f"New Member {self.calls}, arrives fresh\n\n"), FINISH_STOP

        backend = DupBackend(AuditLog())
        roster = expand_personas(self.seeds(3), 6, backend, GenerationConfig())
        names = [p.name for p in roster]
        assert len(names) == 6
        assert sum(1 for n in names if n.lower() == "seed person 0") == 1
