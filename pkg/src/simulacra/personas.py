"""Seed-persona expansion into a large deduplicated roster."""

from __future__ import annotations

import math

from .errors import ExpansionStalledError
from .gateway import MAX_TOKENS_PERSONAS
from .model import CompletionRequest, Persona
from .prompts import build_persona_expansion_prompt
from .rng import RngStream

FEW_SHOT_WINDOW = 25
BATCH_IDEAL = 5


def parse_persona_lines(raw: str) -> list[Persona]:
    """Parse "Name, description" lines; malformed lines are skipped, not errors."""
    personas = []
    for line in raw.splitlines():
        line = line.strip()
        if not line or "," not in line:
            continue
        name, _, description = line.partition(",")
        name = name.strip()
        description = description.strip()
        if not name or not description or "\n" in name or "]" in name:
            continue
        personas.append(Persona(name=name, description=description))
    return personas


def expand_personas(seeds, target_n: int, backend, config,
                    rng: RngStream | None = None, temperature: float | None = None) -> list[Persona]:
    """Grow the roster to target_n unique-named personas via few-shot completion.

    Prompts use a rolling window of the most recent roster entries so the
    prompt stays bounded as the roster grows.  Raises ExpansionStalledError
    (with the partial roster attached) if the attempt budget runs out.
    """
    seeds = list(seeds)
    if target_n < len(seeds):
        raise ValueError("target_n must be at least the number of seeds")
    roster = list(seeds)
    names = {p.name.lower() for p in roster}
    if len(roster) >= target_n:
        return roster[:target_n]

    if rng is None:
        rng = RngStream(config.rng_seed).child("persona-expansion")
    if temperature is None:
        temperature = config.temperature

    max_attempts = math.ceil(target_n / BATCH_IDEAL) * 4
    for _ in range(max_attempts):
        window = roster[-FEW_SHOT_WINDOW:]
        prompt = build_persona_expansion_prompt(window)
        request = CompletionRequest(
            prompt=prompt.body,
            temperature=temperature,
            max_tokens=MAX_TOKENS_PERSONAS,
            stop=("\n\n",),
            seed=rng.bits64(),
            op="persona_expansion",
        )
        result = backend.complete(request)
        for persona in parse_persona_lines(result.text):
            if persona.name.lower() in names:
                continue
            names.add(persona.name.lower())
            roster.append(persona)
            if len(roster) == target_n:
                return roster
    raise ExpansionStalledError(
        f"expansion stalled at {len(roster)}/{target_n} personas", roster)
