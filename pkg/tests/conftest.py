import pytest

from simulacra.gateway import AuditLog, MockBackend
from simulacra.model import CommunityDesign, GenerationConfig, Persona, Rule

PSYCHOTHERAPY_RULES = [
    "no encouraging suicide",
    "no anti-therapy",
    "no trolling",
    "no incivility",
    "no self-marketing",
]

INTERNATIONAL_AFFAIRS_SEEDS = [
    ("Michael Ross", "works as a foreign diplomat"),
    ("Luis Almerado", "PhD student in international relations"),
    ("John Gordon", "worker in the foreign affairs department of the US government"),
    ("Joe Hawkins", "travels often"),
    ("Harry Chang", "international relations professor"),
    ("Catherine Xiao", "political science major in college"),
    ("Laney Kumar", "foreign policy expert for a newspaper"),
    ("Laura Wilson", "planning to go to college in an IR-related discipline"),
    ("Ali Samarneh", "interest in foreign policy"),
    ("Sam Thompson", "international affairs student in college"),
]


@pytest.fixture
def psychotherapy_design():
    return CommunityDesign(
        goal="sharing your psychotherapy stories and questions",
        rules=tuple(Rule.infer(t) for t in PSYCHOTHERAPY_RULES),
        seed_personas=(
            Persona("Layla Li", "a college student studying to be a social worker"),
            Persona("Tom Cheng", "a recovering addict who likes to spot bad therapists"),
        ),
    )


@pytest.fixture
def affairs_design():
    return CommunityDesign(
        goal="discussing of all events surrounding International Affairs",
        rules=(),
        seed_personas=tuple(Persona(n, d) for n, d in INTERNATIONAL_AFFAIRS_SEEDS),
    )


@pytest.fixture
def small_config():
    return GenerationConfig(persona_pool_size=30, thread_count=3, rng_seed=42)


@pytest.fixture
def mock_backend():
    return MockBackend(AuditLog())
