"""WhatIf and Multiverse orchestration on top of the thread engine.

Every operation here returns new threads with provenance; source universes
and threads are never mutated.
"""

from __future__ import annotations

from dataclasses import dataclass, field

from .errors import InvalidSpecError, NotFoundError, ThreadGenerationError
from .model import (
    KIND_INTERVENTION,
    KIND_REPLY,
    MODERATOR_LABEL,
    Persona,
    Thread,
    Universe,
    Utterance,
)
from .engine import continue_reply_loop, generate_reply, generate_universe
from .prompts import InjectedResponder, default_title_phrase
from .rng import RngStream, derive_seed

BRANCH_WHATIF = "whatif"
BRANCH_INTERVENTION = "whatif_intervention"
BRANCH_MULTIVERSE = "multiverse"


@dataclass(frozen=True)
class WhatIfSpec:
    """Designer request: regenerate from a chosen utterance with a twist."""

    thread_id: str
    at_utterance_index: int
    injected_name: str = ""
    injected_description: str = ""
    intervention_text: str | None = None
    alternatives: int = 3
    title_override: str | None = None

    def __post_init__(self):
        if self.alternatives < 1:
            raise InvalidSpecError("alternatives must be at least 1")
        if self.at_utterance_index < 0:
            raise InvalidSpecError("at_utterance_index must be non-negative")

    def to_dict(self) -> dict:
        return {
            "thread_id": self.thread_id,
            "at_utterance_index": self.at_utterance_index,
            "injected_name": self.injected_name,
            "injected_description": self.injected_description,
            "intervention_text": self.intervention_text,
            "alternatives": self.alternatives,
            "title_override": self.title_override,
        }

    @classmethod
    def from_dict(cls, d: dict) -> "WhatIfSpec":
        known = {f for f in cls.__dataclass_fields__}
        return cls(**{k: v for k, v in d.items() if k in known})


@dataclass(frozen=True)
class Branch:
    """One alternative thread plus where it came from."""

    thread: Thread
    source_thread_id: str
    branch_kind: str
    branch_index: int
    spec: dict = field(default_factory=dict)

    def to_dict(self) -> dict:
        return {
            "thread": self.thread.to_dict(),
            "source_thread_id": self.source_thread_id,
            "branch_kind": self.branch_kind,
            "branch_index": self.branch_index,
            "spec": self.spec,
        }

    @classmethod
    def from_dict(cls, d: dict) -> "Branch":
        return cls(
            thread=Thread.from_dict(d["thread"]),
            source_thread_id=d["source_thread_id"],
            branch_kind=d["branch_kind"],
            branch_index=d["branch_index"],
            spec=d.get("spec", {}),
        )


def _resolve_thread(universe: Universe, thread_id: str, extra_threads=()) -> Thread:
    thread = universe.find_thread(thread_id)
    if thread is None:
        for t in extra_threads:
            if t.id == thread_id:
                return t
        raise NotFoundError(f"unknown thread: {thread_id}")
    return thread


def _check_index(thread: Thread, index: int) -> None:
    if index >= len(thread.utterances):
        raise InvalidSpecError(
            f"at_utterance_index {index} out of range for thread of {len(thread.utterances)}")


def _reindexed(utterances) -> tuple[Utterance, ...]:
    out = []
    for i, u in enumerate(utterances):
        if u.index != i:
            u = Utterance(id=u.id, author=u.author, text=u.text, kind=u.kind, index=i)
        out.append(u)
    return tuple(out)


def injected_responder(spec: WhatIfSpec) -> InjectedResponder:
    if not spec.injected_name or not spec.injected_description:
        raise InvalidSpecError("whatif requires an injected persona (name and description)")
    return InjectedResponder(label=spec.injected_name, blurb=spec.injected_description)


def whatif_reply(universe: Universe, spec: WhatIfSpec, backend,
                 extra_threads=()) -> list[Branch]:
    """Truncate after the chosen utterance and let the injected persona reply."""
    source = _resolve_thread(universe, spec.thread_id, extra_threads)
    _check_index(source, spec.at_utterance_index)
    responder = injected_responder(spec)
    title = spec.title_override or default_title_phrase(spec.injected_description)
    prefix = source.utterances[: spec.at_utterance_index + 1]

    base_seed = derive_seed(universe.config.rng_seed, "whatif", source.id,
                            spec.at_utterance_index, spec.injected_name)
    branches = []
    errors = []
    for j in range(spec.alternatives):
        rng = RngStream(derive_seed(base_seed, j))
        try:
            reply = generate_reply(responder, prefix, universe.design, universe.config,
                                   backend, rng, title_override=title, op="whatif")
        except ThreadGenerationError as exc:
            errors.append(exc)
            continue
        except Exception as exc:
            errors.append(exc)
            continue
        thread = Thread(id="w-" + rng.token(), utterances=_reindexed(list(prefix) + [reply]))
        branches.append(Branch(thread=thread, source_thread_id=source.id,
                               branch_kind=BRANCH_WHATIF, branch_index=j,
                               spec=spec.to_dict()))
    if not branches and errors:
        raise errors[0]
    return branches


def whatif_intervention(universe: Universe, spec: WhatIfSpec, backend,
                        extra_threads=()) -> list[Branch]:
    """Insert a moderator comment and regenerate the probed member's response."""
    if not spec.intervention_text or not spec.intervention_text.strip():
        raise InvalidSpecError("intervention_text is empty")
    source = _resolve_thread(universe, spec.thread_id, extra_threads)
    _check_index(source, spec.at_utterance_index)

    probed = source.utterances[spec.at_utterance_index]
    if probed.author == MODERATOR_LABEL:
        raise InvalidSpecError("cannot probe the Moderator sentinel")

    roster_by_name = {p.name: p for p in universe.roster}
    if probed.author in roster_by_name:
        responder = roster_by_name[probed.author]
        title = None
    elif spec.injected_description:
        responder = InjectedResponder(label=probed.author, blurb=spec.injected_description)
        title = spec.title_override or default_title_phrase(spec.injected_description)
    else:
        responder = InjectedResponder(label=probed.author,
                                      blurb="shares comments in this community")
        title = spec.title_override or "comment"

    prefix = list(source.utterances[: spec.at_utterance_index + 1])
    base_seed = derive_seed(universe.config.rng_seed, "intervention", source.id,
                            spec.at_utterance_index, spec.intervention_text)
    moderator_rng = RngStream(derive_seed(base_seed, "moderator"))
    moderator = Utterance(
        id=moderator_rng.token(),
        author=MODERATOR_LABEL,
        text=spec.intervention_text.strip(),
        kind=KIND_INTERVENTION,
        index=len(prefix),
    )
    prefix.append(moderator)

    branches = []
    errors = []
    for j in range(spec.alternatives):
        rng = RngStream(derive_seed(base_seed, j))
        try:
            response = generate_reply(responder, prefix, universe.design, universe.config,
                                      backend, rng, title_override=title, op="whatif")
        except Exception as exc:
            errors.append(exc)
            continue
        thread = Thread(id="w-" + rng.token(), utterances=_reindexed(prefix + [response]))
        branches.append(Branch(thread=thread, source_thread_id=source.id,
                               branch_kind=BRANCH_INTERVENTION, branch_index=j,
                               spec=spec.to_dict()))
    if not branches and errors:
        raise errors[0]
    return branches


def multiverse_community(community_id: str, design, config, backend,
                         rng_seed: int | None = None, progress_cb=None) -> Universe:
    """Regenerate the whole community at the raised multiverse temperature."""
    if rng_seed is None:
        import secrets
        rng_seed = secrets.randbits(64)
    return generate_universe(
        design, config, backend,
        parent_community=community_id,
        temperature=config.multiverse_temperature,
        rng_seed=rng_seed,
        progress_cb=progress_cb,
    )


def multiverse_thread(universe: Universe, thread_id: str, at_utterance_index: int,
                      k: int, backend, extra_threads=()) -> list[Branch]:
    """Resample a thread from the chosen utterance, k independent times."""
    if k < 1:
        raise InvalidSpecError("k must be at least 1")
    source = _resolve_thread(universe, thread_id, extra_threads)
    _check_index(source, at_utterance_index)

    prefix = list(source.utterances[: at_utterance_index + 1])
    roster_by_name = {p.name: p for p in universe.roster}
    participants = []
    for u in prefix:
        p = roster_by_name.get(u.author)
        if p is not None and p.name not in {q.name for q in participants}:
            participants.append(p)
    latest = roster_by_name.get(prefix[-1].author)
    if latest is None:
        # latest speaker is a sentinel/injected label; represent it so the
        # no-latest-speaker rule still holds for the next reply
        latest = Persona(name=prefix[-1].author, description="outside the roster") \
            if prefix[-1].author else None

    base_seed = derive_seed(universe.config.rng_seed, "multiverse", source.id,
                            at_utterance_index)
    branches = []
    errors = []
    for j in range(k):
        rng = RngStream(derive_seed(base_seed, j))
        try:
            utterances = continue_reply_loop(
                prefix, participants or [latest], latest,
                universe.roster, universe.design, universe.config, backend, rng,
                temperature=universe.config.multiverse_temperature,
                op="multiverse")
        except Exception as exc:
            errors.append(exc)
            continue
        thread = Thread(id="m-" + rng.token(), utterances=_reindexed(utterances))
        branches.append(Branch(thread=thread, source_thread_id=source.id,
                               branch_kind=BRANCH_MULTIVERSE, branch_index=j,
                               spec={"at_utterance_index": at_utterance_index, "k": k}))
    if not branches and errors:
        raise errors[0]
    return branches
