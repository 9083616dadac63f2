"""Domain types: personas, designs, threads, universes, completion contract.

All types are immutable value objects; constructors enforce the invariants,
and every type has a canonical snake_case JSON form used identically by the
store, the HTTP API, and the CLI.
"""

from __future__ import annotations

import json
import re
from dataclasses import dataclass, field, replace

from .errors import DesignValidationError

PRESCRIPTIVE = "prescriptive"
RESTRICTIVE = "restrictive"

ABLATION_FULL = "full"
ABLATION_NO_DESCRIPTION = "no_description"
ABLATION_NO_PERSONAS = "no_personas"
ABLATIONS = (ABLATION_FULL, ABLATION_NO_DESCRIPTION, ABLATION_NO_PERSONAS)

KIND_POST = "post"
KIND_REPLY = "reply"
KIND_INTERVENTION = "intervention"

MODERATOR_LABEL = "Moderator"
_USER_LABEL_RE = re.compile(r"^User \d+$")


def is_sentinel_author(name: str) -> bool:
    """True for the non-roster author labels ("Moderator", "User N")."""
    return name == MODERATOR_LABEL or bool(_USER_LABEL_RE.match(name))


def canonical_json(data) -> str:
    """The one JSON rendering used for files, API bodies, and hashing."""
    return json.dumps(data, ensure_ascii=False, indent=2) + "\n"


@dataclass(frozen=True)
class Persona:
    """A named community member with a one-phrase behavioral description."""

    name: str
    description: str

    def __post_init__(self):
        problems = _persona_problems(self.name, self.description)
        if problems:
            raise DesignValidationError(problems)
        object.__setattr__(self, "name", self.name.strip())
        object.__setattr__(self, "description", self.description.strip())

    def to_dict(self) -> dict:
        return {"name": self.name, "description": self.description}

    @classmethod
    def from_dict(cls, d: dict) -> "Persona":
        return cls(name=d["name"], description=d["description"])


def _persona_problems(name, description) -> list[str]:
    problems = []
    if not isinstance(name, str) or not name.strip():
        problems.append("persona name is empty")
    else:
        if "\n" in name:
            problems.append(f"persona name contains a newline: {name!r}")
        if "]" in name:
            problems.append(f"persona name contains ']': {name!r}")
    if not isinstance(description, str) or not description.strip():
        problems.append("persona description is empty")
    return problems


@dataclass(frozen=True)
class Rule:
    """A community rule, either prescriptive ("be kind") or restrictive ("no spam")."""

    text: str
    polarity: str

    def __post_init__(self):
        if not isinstance(self.text, str) or not self.text.strip():
            raise DesignValidationError("rule text is empty")
        if self.polarity not in (PRESCRIPTIVE, RESTRICTIVE):
            raise DesignValidationError(f"rule polarity must be set: {self.polarity!r}")
        object.__setattr__(self, "text", self.text.strip())

    @classmethod
    def infer(cls, text: str, polarity: str | None = None) -> "Rule":
        """Build a rule, auto-detecting polarity when the designer left it unset."""
        if polarity is None:
            lowered = text.strip().lower()
            if lowered.startswith("no ") or lowered.startswith("don't ") or lowered.startswith("dont "):
                polarity = RESTRICTIVE
            else:
                polarity = PRESCRIPTIVE
        return cls(text=text, polarity=polarity)

    def to_dict(self) -> dict:
        return {"text": self.text, "polarity": self.polarity}

    @classmethod
    def from_dict(cls, d: dict) -> "Rule":
        return cls.infer(d["text"], d.get("polarity"))


@dataclass(frozen=True)
class CommunityDesign:
    """Designer input: goal statement, rules, seed personas."""

    goal: str
    rules: tuple[Rule, ...]
    seed_personas: tuple[Persona, ...]

    def __post_init__(self):
        object.__setattr__(self, "rules", tuple(self.rules))
        object.__setattr__(self, "seed_personas", tuple(self.seed_personas))
        problems = []
        if not isinstance(self.goal, str) or not self.goal.strip():
            problems.append("goal is empty")
        if not self.seed_personas:
            problems.append("seed_personas is empty")
        seen = set()
        for p in self.seed_personas:
            if p.name in seen:
                problems.append(f"duplicate persona name: {p.name}")
            seen.add(p.name)
        if problems:
            raise DesignValidationError(problems)
        object.__setattr__(self, "goal", self.goal.strip())

    def to_dict(self) -> dict:
        return {
            "goal": self.goal,
            "rules": [r.to_dict() for r in self.rules],
            "seed_personas": [p.to_dict() for p in self.seed_personas],
        }

    @classmethod
    def from_dict(cls, d: dict) -> "CommunityDesign":
        return cls(
            goal=d["goal"],
            rules=tuple(Rule.from_dict(r) for r in d.get("rules", [])),
            seed_personas=tuple(Persona.from_dict(p) for p in d["seed_personas"]),
        )


def validate_design(design) -> list[str]:
    """Collect every invariant violation in a design (or raw design payload).

    Total function: returns [] for a valid design.  Accepts either a
    constructed CommunityDesign (always valid, by construction) or a raw
    mapping as received over the API/CLI before construction.
    """
    if isinstance(design, CommunityDesign):
        return []
    if not isinstance(design, dict):
        return ["design payload is not a JSON object"]

    problems = []
    goal = design.get("goal")
    if not isinstance(goal, str) or not goal.strip():
        problems.append("goal is empty")

    rules = design.get("rules", [])
    if not isinstance(rules, list):
        problems.append("rules is not a list")
        rules = []
    for i, r in enumerate(rules):
        if not isinstance(r, dict):
            problems.append(f"rule {i} is not an object")
            continue
        text = r.get("text")
        if not isinstance(text, str) or not text.strip():
            problems.append(f"rule {i} text is empty")
        polarity = r.get("polarity")
        if polarity is not None and polarity not in (PRESCRIPTIVE, RESTRICTIVE):
            problems.append(f"rule {i} polarity invalid: {polarity!r}")

    seeds = design.get("seed_personas")
    if not isinstance(seeds, list) or not seeds:
        problems.append("seed_personas is empty")
        seeds = []
    seen = set()
    for i, p in enumerate(seeds):
        if not isinstance(p, dict):
            problems.append(f"seed persona {i} is not an object")
            continue
        for msg in _persona_problems(p.get("name"), p.get("description")):
            problems.append(f"seed persona {i}: {msg}")
        name = p.get("name")
        if isinstance(name, str) and name.strip():
            if name.strip() in seen:
                problems.append(f"duplicate persona name: {name.strip()}")
            seen.add(name.strip())
    return problems


@dataclass(frozen=True)
class GenerationConfig:
    """Tunable knobs of one generation run; defaults follow the engine's norms."""

    persona_pool_size: int = 1000
    seed_persona_count_hint: int = 10
    thread_count: int = 20
    reply_prob_mean: float = 0.65
    reply_prob_stdev: float = 0.10
    max_replies: int = 8
    new_persona_rate: float = 0.5
    prompt_char_limit: int = 8000
    temperature: float = 0.7
    multiverse_temperature: float = 0.8
    ablation: str = ABLATION_FULL
    rng_seed: int = 0

    def __post_init__(self):
        problems = []
        if self.persona_pool_size < 1:
            problems.append("persona_pool_size must be positive")
        if self.thread_count < 0:
            problems.append("thread_count must be non-negative")
        if not 0 <= self.reply_prob_mean <= 1:
            problems.append("reply_prob_mean must be in [0, 1]")
        if self.reply_prob_stdev < 0:
            problems.append("reply_prob_stdev must be non-negative")
        if self.max_replies < 0:
            problems.append("max_replies must be non-negative")
        if not 0 <= self.new_persona_rate <= 1:
            problems.append("new_persona_rate must be in [0, 1]")
        if self.temperature < 0:
            problems.append("temperature must be non-negative")
        if self.multiverse_temperature < 0:
            problems.append("multiverse_temperature must be non-negative")
        if self.prompt_char_limit < 1000:
            problems.append("prompt_char_limit must be at least 1000")
        if self.ablation not in ABLATIONS:
            problems.append(f"unknown ablation mode: {self.ablation!r}")
        if problems:
            raise DesignValidationError(problems)

    def with_overrides(self, **kwargs) -> "GenerationConfig":
        return replace(self, **kwargs)

    def to_dict(self) -> dict:
        return {
            "persona_pool_size": self.persona_pool_size,
            "seed_persona_count_hint": self.seed_persona_count_hint,
            "thread_count": self.thread_count,
            "reply_prob_mean": self.reply_prob_mean,
            "reply_prob_stdev": self.reply_prob_stdev,
            "max_replies": self.max_replies,
            "new_persona_rate": self.new_persona_rate,
            "prompt_char_limit": self.prompt_char_limit,
            "temperature": self.temperature,
            "multiverse_temperature": self.multiverse_temperature,
            "ablation": self.ablation,
            "rng_seed": self.rng_seed,
        }

    @classmethod
    def from_dict(cls, d: dict) -> "GenerationConfig":
        known = {f for f in cls.__dataclass_fields__}
        return cls(**{k: v for k, v in d.items() if k in known})


@dataclass(frozen=True)
class Utterance:
    """One post, reply, or moderator intervention within a thread."""

    id: str
    author: str
    text: str
    kind: str
    index: int

    def __post_init__(self):
        problems = []
        if self.kind not in (KIND_POST, KIND_REPLY, KIND_INTERVENTION):
            problems.append(f"unknown utterance kind: {self.kind!r}")
        if (self.index == 0) != (self.kind == KIND_POST):
            problems.append("index 0 if and only if kind is post")
        if not isinstance(self.text, str) or not self.text.strip():
            problems.append("utterance text is empty")
        elif "</span>" in self.text:
            problems.append("utterance text contains a raw </span>")
        if not self.author or not self.author.strip():
            problems.append("utterance author is empty")
        if problems:
            raise DesignValidationError(problems)

    def to_dict(self) -> dict:
        return {
            "id": self.id,
            "author": self.author,
            "text": self.text,
            "kind": self.kind,
            "index": self.index,
        }

    @classmethod
    def from_dict(cls, d: dict) -> "Utterance":
        return cls(id=d["id"], author=d["author"], text=d["text"],
                   kind=d["kind"], index=d["index"])


@dataclass(frozen=True)
class Thread:
    """An ordered conversation: one post plus a flat chain of replies."""

    id: str
    utterances: tuple[Utterance, ...]

    def __post_init__(self):
        object.__setattr__(self, "utterances", tuple(self.utterances))
        problems = []
        if not self.utterances:
            problems.append("thread has no utterances")
        else:
            if self.utterances[0].kind != KIND_POST:
                problems.append("first utterance must be a post")
            for i, u in enumerate(self.utterances):
                if u.index != i:
                    problems.append(f"utterance {i} has index {u.index}")
                if i > 0 and u.kind == KIND_POST:
                    problems.append(f"utterance {i} is a second post")
                if i > 0 and u.author == self.utterances[i - 1].author:
                    problems.append(f"consecutive utterances {i - 1},{i} share author {u.author}")
        if problems:
            raise DesignValidationError(problems)

    def to_dict(self) -> dict:
        return {"id": self.id, "utterances": [u.to_dict() for u in self.utterances]}

    @classmethod
    def from_dict(cls, d: dict) -> "Thread":
        return cls(id=d["id"], utterances=tuple(Utterance.from_dict(u) for u in d["utterances"]))


@dataclass(frozen=True)
class Universe:
    """One generated instantiation of a design: frozen inputs + roster + threads."""

    id: str
    design: CommunityDesign
    config: GenerationConfig
    roster: tuple[Persona, ...]
    threads: tuple[Thread, ...]
    parent_community: str
    created_at: str

    def __post_init__(self):
        object.__setattr__(self, "roster", tuple(self.roster))
        object.__setattr__(self, "threads", tuple(self.threads))
        problems = []
        names = {p.name for p in self.roster}
        for t in self.threads:
            for u in t.utterances:
                if not is_sentinel_author(u.author) and u.author not in names:
                    problems.append(f"author not in roster: {u.author}")
        limit = self.config.persona_pool_size + len(self.design.seed_personas)
        if len(self.roster) > limit:
            problems.append(f"roster size {len(self.roster)} exceeds limit {limit}")
        if problems:
            raise DesignValidationError(problems)

    def find_thread(self, thread_id: str) -> Thread | None:
        for t in self.threads:
            if t.id == thread_id:
                return t
        return None

    def to_dict(self) -> dict:
        return {
            "id": self.id,
            "design": self.design.to_dict(),
            "config": self.config.to_dict(),
            "roster": [p.to_dict() for p in self.roster],
            "threads": [t.to_dict() for t in self.threads],
            "parent_community": self.parent_community,
            "created_at": self.created_at,
        }

    @classmethod
    def from_dict(cls, d: dict) -> "Universe":
        return cls(
            id=d["id"],
            design=CommunityDesign.from_dict(d["design"]),
            config=GenerationConfig.from_dict(d["config"]),
            roster=tuple(Persona.from_dict(p) for p in d["roster"]),
            threads=tuple(Thread.from_dict(t) for t in d["threads"]),
            parent_community=d["parent_community"],
            created_at=d["created_at"],
        )


@dataclass(frozen=True)
class CompletionRequest:
    """What the engine sends to a completion backend.

    `seed` is a caller-supplied nonce that deterministic backends (the mock)
    fold into their sampling so independent alternatives from an identical
    prompt can differ; live backends ignore it.  `op` names the calling
    operation for the audit log.
    """

    prompt: str
    temperature: float
    max_tokens: int
    stop: tuple[str, ...]
    seed: int = 0
    op: str = ""

    def __post_init__(self):
        object.__setattr__(self, "stop", tuple(self.stop))

    def to_dict(self) -> dict:
        return {
            "prompt": self.prompt,
            "temperature": self.temperature,
            "max_tokens": self.max_tokens,
            "stop": list(self.stop),
        }


FINISH_STOP = "stop_sequence"
FINISH_LENGTH = "length"
FINISH_OTHER = "other"


@dataclass(frozen=True)
class CompletionResult:
    text: str
    finish_reason: str

    def to_dict(self) -> dict:
        return {"text": self.text, "finish_reason": self.finish_reason}
