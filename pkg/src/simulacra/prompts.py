"""Prompt construction and completion parsing.

Everything here is a pure function.  Canonical whitespace: sentences are
single-space joined, paragraphs separated by a blank line, thread lines by
single newlines.  Prompts end mid-markup on purpose: the trailing `>` or
`>"` is the cue the completion continues from.
"""

from __future__ import annotations

from dataclasses import dataclass

from .errors import BudgetExhaustedError, EmptyGenerationError, OversizedDesignError
from .model import (
    ABLATION_FULL,
    ABLATION_NO_DESCRIPTION,
    ABLATION_NO_PERSONAS,
    PRESCRIPTIVE,
    RESTRICTIVE,
    CommunityDesign,
    Persona,
    Rule,
    Thread,
    Utterance,
)

STYLE_PERSONA_SENTENCE = "persona_sentence"
STYLE_TITLE_ATTRIBUTE = "title_attribute"

KIND_PERSONA_EXPANSION = "persona_expansion"
KIND_HEADLINE = "headline"
KIND_REPLY = "reply"


@dataclass(frozen=True)
class PromptText:
    body: str
    template_kind: str
    truncated_utterance_count: int = 0

    @property
    def char_count(self) -> int:
        return len(self.body)


@dataclass(frozen=True)
class InjectedResponder:
    """A free-text responder used by WhatIf (e.g. "Troll" / "shares trolling comments").

    `blurb` is a predicate completing "[<label>] ..." in the responder block.
    """

    label: str
    blurb: str

    @property
    def name(self) -> str:
        return self.label


def first_name(name: str) -> str:
    """Text before the first space ("Layla Li" -> "Layla")."""
    return name.split(" ", 1)[0]


def _strip_negation(text: str) -> str:
    lowered = text.lower()
    for prefix in ("no ", "don't ", "dont "):
        if lowered.startswith(prefix):
            return text[len(prefix):]
    return text


def render_rule_clause(rules, style: str, goal: str | None = None) -> str:
    """Join rules into the comma-separated clause the templates embed.

    persona_sentence: "not encouraging suicide, be kind, ..."
    title_attribute:  "NOT encouraging suicide, be kind, ..." and, when a
    goal is supplied, prefixed with the on-topic clause
    ("about <goal>, and ...").
    """
    negation = "not" if style == STYLE_PERSONA_SENTENCE else "NOT"
    parts = []
    for rule in rules:
        if rule.polarity == RESTRICTIVE:
            parts.append(f"{negation} {_strip_negation(rule.text)}")
        else:
            parts.append(rule.text)
    clause = ", ".join(parts)
    if style == STYLE_TITLE_ATTRIBUTE and goal:
        if clause:
            return f"about {goal}, and {clause}"
        return f"about {goal}"
    return clause


def build_persona_expansion_prompt(seeds) -> PromptText:
    """Few-shot roster continuation: one "Name, description" line per seed."""
    if not seeds:
        raise ValueError("persona expansion needs at least one seed")
    body = "".join(f"{p.name}, {p.description}\n" for p in seeds)
    return PromptText(body=body, template_kind=KIND_PERSONA_EXPANSION)


def build_headline_prompt(persona, design: CommunityDesign, config,
                          pronoun: str | None = None) -> PromptText:
    """The top-level post prompt: persona paragraph + posting cue paragraph."""
    ablation = config.ablation
    if ablation == ABLATION_NO_PERSONAS:
        label = persona if isinstance(persona, str) else persona.name
        intro = ""
        poster = label
    else:
        intro = f"{persona.name} is {persona.description}."
        poster = first_name(persona.name)

    if ablation == ABLATION_NO_DESCRIPTION:
        para1 = intro
        para2 = (f'{poster} posted the following headline to an online forum: '
                 f'<span class="headline_reddit" title="comment">')
    else:
        subject = pronoun or poster
        rule_sentence = ""
        persona_clause = render_rule_clause(design.rules, STYLE_PERSONA_SENTENCE)
        if persona_clause:
            rule_sentence = f"{subject} shares comments that are {persona_clause}."
        para1 = f"{intro} {rule_sentence}".strip()
        title = render_rule_clause(design.rules, STYLE_TITLE_ATTRIBUTE, goal=design.goal)
        para2 = (f'{poster} posted the following headline to an online forum for '
                 f'{design.goal}: <span class="headline_reddit" title="comment that is {title}">')

    body = f"{para1}\n\n{para2}" if para1 else para2
    if len(body) > config.prompt_char_limit:
        raise OversizedDesignError(
            f"headline prompt is {len(body)} chars; limit {config.prompt_char_limit}")
    return PromptText(body=body, template_kind=KIND_HEADLINE)


def render_utterance(utterance: Utterance) -> str:
    return f'[{utterance.author}]: <span class="comment">\n"{utterance.text}"</span>'


def serialize_thread(thread, char_budget: int) -> tuple[str, int]:
    """Render a thread, dropping oldest utterances until it fits the budget.

    Accepts a Thread or a list of utterances.  The most recent utterance is
    never dropped; if it alone does not fit, the budget is exhausted.
    """
    if char_budget <= 0:
        raise ValueError("char_budget must be positive")
    utterances = thread.utterances if isinstance(thread, Thread) else tuple(thread)
    lines = [render_utterance(u) for u in utterances]
    dropped = 0
    while True:
        text = "\n".join(lines[dropped:])
        if len(text) <= char_budget:
            return text, dropped
        if dropped >= len(lines) - 1:
            raise BudgetExhaustedError(
                f"most recent utterance alone is {len(lines[-1])} chars; budget {char_budget}")
        dropped += 1


def _responder_block(responder, design, ablation) -> str:
    if isinstance(responder, InjectedResponder):
        return f"Current responder:\n[{responder.label}] {responder.blurb}."
    if ablation == ABLATION_NO_PERSONAS:
        label = responder if isinstance(responder, str) else responder.name
        clause = render_rule_clause(design.rules, STYLE_PERSONA_SENTENCE)
        if clause:
            return f"Current responder:\n[{label}] shares comments that are {clause}."
        return f"Current responder:\n[{label}]"
    sentence = f"[{responder.name}] is {responder.description}."
    if ablation != ABLATION_NO_DESCRIPTION:
        clause = render_rule_clause(design.rules, STYLE_PERSONA_SENTENCE)
        if clause:
            subject = first_name(responder.name)
            sentence += f" {subject} shares comments that are {clause}."
    return f"Current responder:\n{sentence}"


def build_reply_prompt(responder, thread, design: CommunityDesign, config,
                       title_override: str | None = None,
                       pronoun: str | None = None) -> PromptText:
    """The reply prompt: responder block, thread context, and comment cue."""
    ablation = config.ablation
    block = _responder_block(responder, design, ablation)
    if pronoun and "shares comments that are" in block:
        # the golden fixture renders the pronoun instead of the first name
        subject = first_name(responder.name)
        block = block.replace(f" {subject} shares comments", f" {pronoun} shares comments", 1)

    if ablation == ABLATION_NO_DESCRIPTION:
        context_line = "The following thread was posted on online social media."
    else:
        context_line = f"The following thread was posted on online social media for {design.goal}."

    label = responder.name if not isinstance(responder, str) else responder
    if title_override is not None:
        title = title_override
    elif ablation == ABLATION_NO_DESCRIPTION:
        title = "comment"
    else:
        clause = render_rule_clause(design.rules, STYLE_TITLE_ATTRIBUTE)
        title = f"comment that is {clause}" if clause else "comment"
    cue = f'[{label}]: <span class="comment max_200_words" title="{title}">"'

    # body = block \n\n context \n "Thread:" \n <thread_text> \n cue
    overhead = len(block) + 2 + len(context_line) + 1 + len("Thread:") + 1 + 1 + len(cue)
    budget = config.prompt_char_limit - overhead
    if budget <= 0:
        raise OversizedDesignError(
            f"reply prompt frame is {overhead} chars; limit {config.prompt_char_limit}")
    thread_text, dropped = serialize_thread(thread, budget)
    body = f"{block}\n\n{context_line}\nThread:\n{thread_text}\n{cue}"
    return PromptText(body=body, template_kind=KIND_REPLY, truncated_utterance_count=dropped)


def parse_completion(raw: str) -> str:
    """Clean a completion into utterance text.

    Repeats tag stripping, paired-quote stripping, and trimming to a fixed
    point, so parsing is idempotent.
    """
    text = raw
    while True:
        before = text
        text = text.strip()
        if text.endswith("</span>"):
            text = text[: -len("</span>")]
            continue
        if len(text) >= 2 and text[0] == '"' and text[-1] == '"':
            text = text[1:-1]
            continue
        if text == before:
            break
    if not text:
        raise EmptyGenerationError("completion reduced to empty text")
    return text


def parse_reply_completion(raw: str) -> str:
    """Parse a reply completion, reinstating the opening quote the cue supplied."""
    stripped = raw.strip()
    if stripped.endswith("</span>"):
        stripped = stripped[: -len("</span>")].rstrip()
    if stripped.endswith('"') and not stripped.startswith('"'):
        stripped = '"' + stripped
    return parse_completion(stripped)


def default_title_phrase(description: str) -> str:
    """Derive a WhatIf title phrase from an injected description.

    "shares trolling comments" -> "comment that is trolling".
    """
    phrase = description.strip().rstrip(".")
    lowered = phrase.lower()
    if lowered.startswith("shares "):
        phrase = phrase[len("shares "):]
    if phrase.lower().endswith(" comments"):
        phrase = phrase[: -len(" comments")]
    return f"comment that is {phrase.strip()}"
