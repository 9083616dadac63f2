"""The generation state machine: authors, lengths, prompts, parsing.

Each thread draws from a child RNG keyed by (universe seed, thread index),
so generating threads in any order (or concurrently) yields the same
universe.  Under the mock backend a whole universe is a pure function of
(design, config).
"""

from __future__ import annotations

import datetime

from .errors import EmptyGenerationError, NoCandidateError, PostGenerationFailedError, ThreadGenerationError
from .gateway import MAX_TOKENS_CONTENT
from .model import (
    ABLATION_NO_PERSONAS,
    KIND_POST,
    KIND_REPLY,
    CommunityDesign,
    CompletionRequest,
    GenerationConfig,
    Persona,
    Thread,
    Universe,
    Utterance,
)
from .personas import expand_personas
from .prompts import (
    build_headline_prompt,
    build_reply_prompt,
    parse_completion,
    parse_reply_completion,
)
from .rng import RngStream

RESAMPLE_LIMIT = 3

# Fixed timestamp for deterministic backends so reruns are byte-identical.
DETERMINISTIC_TIMESTAMP = "2020-06-11T00:00:00Z"

# Virtual author pool for the no-personas ablation ("User 1", "User 2", ...).
_NUMBERED_USER_POOL = 16


def _now() -> str:
    return datetime.datetime.now(datetime.timezone.utc).strftime("%Y-%m-%dT%H:%M:%SZ")


def clamp01(x: float) -> float:
    return 0.0 if x < 0.0 else 1.0 if x > 1.0 else x


def sample_reply_probability(rng: RngStream, config: GenerationConfig) -> float:
    """One Gaussian draw around the configured mean, clamped to [0, 1]."""
    return clamp01(rng.gauss(config.reply_prob_mean, config.reply_prob_stdev))


def select_responder(roster, participants, latest, rng: RngStream,
                     config: GenerationConfig) -> Persona:
    """Choose the next reply author.

    A coin flip at new_persona_rate picks a fresh roster member; otherwise a
    prior participant other than the latest speaker.  An empty branch falls
    back to the other; the result never equals the latest speaker.
    """
    participant_names = {p.name for p in participants}
    fresh = [p for p in roster if p.name not in participant_names]
    returning = []
    seen = set()
    for p in participants:
        if p.name != latest.name and p.name not in seen:
            returning.append(p)
            seen.add(p.name)

    want_new = rng.uniform() < config.new_persona_rate
    pool = fresh if want_new else returning
    if not pool:
        pool = returning if want_new else fresh
    if not pool:
        raise NoCandidateError("no eligible responder: roster equals {latest}")
    return pool[rng.randrange(len(pool))]


def _complete_utterance(backend, prompt_body: str, temperature: float,
                        rng: RngStream, op: str, parse) -> str:
    """Run one completion, resampling on empty generations."""
    last = None
    for _ in range(1 + RESAMPLE_LIMIT):
        request = CompletionRequest(
            prompt=prompt_body,
            temperature=temperature,
            max_tokens=MAX_TOKENS_CONTENT,
            stop=("</span>",),
            seed=rng.bits64(),
            op=op,
        )
        try:
            return parse(backend.complete(request).text)
        except EmptyGenerationError as exc:
            last = exc
    raise PostGenerationFailedError(
        f"empty generation persisted through {RESAMPLE_LIMIT} resamples") from last


def generate_post(author, design: CommunityDesign, config: GenerationConfig,
                  backend, rng: RngStream, temperature: float | None = None,
                  op: str = "generate_post") -> Utterance:
    """Generate the top-level post for a thread."""
    if temperature is None:
        temperature = config.temperature
    prompt = build_headline_prompt(author, design, config)
    text = _complete_utterance(backend, prompt.body, temperature, rng, op, parse_completion)
    label = author if isinstance(author, str) else author.name
    return Utterance(id=rng.token(), author=label, text=text, kind=KIND_POST, index=0)


def generate_reply(responder, utterances, design, config, backend, rng,
                   temperature: float | None = None, title_override: str | None = None,
                   kind: str = KIND_REPLY, op: str = "generate_reply") -> Utterance:
    """Generate one reply continuing the given utterances."""
    if temperature is None:
        temperature = config.temperature
    prompt = build_reply_prompt(responder, utterances, design, config,
                                title_override=title_override)
    text = _complete_utterance(backend, prompt.body, temperature, rng, op,
                               parse_reply_completion)
    label = responder.name if not isinstance(responder, str) else responder
    return Utterance(id=rng.token(), author=label, text=text, kind=kind,
                     index=len(utterances))


def numbered_user_roster(count: int = _NUMBERED_USER_POOL) -> list[Persona]:
    """Label-only author pool for the no-personas ablation."""
    return [Persona(name=f"User {i}", description="numbered user") for i in range(1, count + 1)]


def continue_reply_loop(utterances, participants, latest, roster, design, config,
                        backend, rng, temperature=None, p=None, op="generate_reply"):
    """Run the reply loop (continue-coin, responder pick, generate) to completion.

    Mutates nothing; returns the extended utterance list.
    """
    if temperature is None:
        temperature = config.temperature
    if p is None:
        p = sample_reply_probability(rng, config)
    utterances = list(utterances)
    participants = list(participants)
    reply_count = len(utterances) - 1
    try:
        while reply_count < config.max_replies:
            if rng.uniform() >= p:
                break
            responder = select_responder(roster, participants, latest, rng, config)
            reply = generate_reply(responder, utterances, design, config, backend,
                                   rng, temperature=temperature, op=op)
            utterances.append(reply)
            if responder.name not in {q.name for q in participants}:
                participants.append(responder)
            latest = responder
            reply_count += 1
    except Exception as exc:
        raise ThreadGenerationError("reply generation failed", utterances, exc) from exc
    return utterances


def generate_thread(design: CommunityDesign, roster, config: GenerationConfig,
                    backend, rng: RngStream, temperature: float | None = None) -> Thread:
    """Generate one post and its reply chain."""
    if temperature is None:
        temperature = config.temperature
    if config.ablation == ABLATION_NO_PERSONAS:
        roster = numbered_user_roster()
        poster = roster[0]
    else:
        poster = roster[rng.randrange(len(roster))]
    try:
        post = generate_post(poster, design, config, backend, rng,
                             temperature=temperature)
    except Exception as exc:
        raise ThreadGenerationError("post generation failed", [], exc) from exc
    utterances = continue_reply_loop(
        [post], [poster], poster, roster, design, config, backend, rng,
        temperature=temperature)
    return Thread(id=rng.token(), utterances=tuple(utterances))


def generate_universe(design: CommunityDesign, config: GenerationConfig, backend,
                      parent_community: str | None = None,
                      temperature: float | None = None,
                      rng_seed: int | None = None,
                      progress_cb=None) -> Universe:
    """Expand the roster and generate a full universe of threads."""
    seed = config.rng_seed if rng_seed is None else rng_seed
    master = RngStream(seed)

    if config.ablation == ABLATION_NO_PERSONAS:
        roster = list(design.seed_personas)
    else:
        target = max(config.persona_pool_size, len(design.seed_personas))
        roster = expand_personas(design.seed_personas, target, backend, config,
                                 rng=master.child("personas"),
                                 temperature=temperature)

    threads = []
    for i in range(config.thread_count):
        thread_rng = master.child("thread", i)
        threads.append(generate_thread(design, roster, config, backend, thread_rng,
                                       temperature=temperature))
        if progress_cb is not None:
            progress_cb(i + 1, config.thread_count)

    universe_id = "u-" + master.child("universe-id").token()
    created_at = DETERMINISTIC_TIMESTAMP if getattr(backend, "deterministic", False) else _now()
    return Universe(
        id=universe_id,
        design=design,
        config=config.with_overrides(rng_seed=seed),
        roster=tuple(roster),
        threads=tuple(threads),
        parent_community=parent_community or f"c-{universe_id}",
        created_at=created_at,
    )
