from pathlib import Path

import pytest
from hypothesis import given, settings, strategies as st

from simulacra.errors import BudgetExhaustedError, EmptyGenerationError
from simulacra.model import GenerationConfig, Persona, Rule, Thread, Utterance
from simulacra.prompts import (
    InjectedResponder,
    build_headline_prompt,
    build_persona_expansion_prompt,
    build_reply_prompt,
    default_title_phrase,
    first_name,
    parse_completion,
    parse_reply_completion,
    render_rule_clause,
    serialize_thread,
)

FIXTURES = Path(__file__).resolve().parents[1] / "src" / "simulacra" / "fixtures"


def golden(name: str) -> str:
    # fixtures are stored with a trailing newline; prompts end mid-markup
    return (FIXTURES / name).read_text(encoding="utf-8").rstrip("\n")


def utt(i, author, text):
    return Utterance(id=f"u{i}", author=author, text=text,
                     kind="post" if i == 0 else "reply", index=i)


LAYLA_POST = utt(0, "Layla Li",
                 "Antidepressants made me so unhappy that I wanted to die without them.")


class TestRuleClause:
    RULES = [Rule("no encouraging suicide", "restrictive"),
             Rule("no anti-therapy", "restrictive")]

    def test_persona_sentence(self):
        assert render_rule_clause(self.RULES, "persona_sentence") == \
            "not encouraging suicide, not anti-therapy"

    def test_title_attribute(self):
        assert render_rule_clause(self.RULES, "title_attribute") == \
            "NOT encouraging suicide, NOT anti-therapy"

    def test_title_attribute_with_goal(self):
        clause = render_rule_clause(self.RULES, "title_attribute", goal="psychotherapy")
        assert clause == "about psychotherapy, and NOT encouraging suicide, NOT anti-therapy"

    def test_prescriptive_rendered_verbatim(self):
        rules = [Rule("be kind", "prescriptive"), Rule("no spam", "restrictive")]
        assert render_rule_clause(rules, "persona_sentence") == "be kind, not spam"

    def test_empty_rules(self):
        assert render_rule_clause([], "persona_sentence") == ""
        assert render_rule_clause([], "title_attribute") == ""


class TestPersonaExpansionPrompt:
    def test_paper_seed_list(self, affairs_design):
        prompt = build_persona_expansion_prompt(affairs_design.seed_personas)
        lines = prompt.body.splitlines()
        assert len(lines) == 10
        assert lines[0] == "Michael Ross, works as a foreign diplomat"
        assert prompt.body.endswith("\n")
        assert prompt.template_kind == "persona_expansion"

    def test_single_seed(self):
        assert build_persona_expansion_prompt([Persona("A", "b")]).body == "A, b\n"

    def test_description_comma_preserved(self):
        from simulacra.personas import parse_persona_lines
        p = Persona("Leo Yamamura", "pursuing a doctorate, with a focus on economics")
        body = build_persona_expansion_prompt([p]).body
        [parsed] = parse_persona_lines(body)
        assert parsed == p


class TestHeadlinePrompt:
    def test_golden(self, psychotherapy_design):
        cfg = GenerationConfig()
        prompt = build_headline_prompt(psychotherapy_design.seed_personas[0],
                                       psychotherapy_design, cfg, pronoun="She")
        assert prompt.body == golden("headline_prompt.txt")
        assert prompt.char_count == len(prompt.body)

    def test_no_description_excludes_goal_and_rules(self, psychotherapy_design):
        cfg = GenerationConfig(ablation="no_description")
        body = build_headline_prompt(psychotherapy_design.seed_personas[0],
                                     psychotherapy_design, cfg).body
        assert "psychotherapy" not in body
        for rule in psychotherapy_design.rules:
            assert rule.text.removeprefix("no ") not in body
        assert 'title="comment"' in body

    def test_no_personas_uses_label(self, psychotherapy_design):
        cfg = GenerationConfig(ablation="no_personas")
        body = build_headline_prompt("User 1", psychotherapy_design, cfg).body
        assert body.startswith("User 1 shares comments that are not encouraging suicide")
        assert "is a college student" not in body
        assert "User 1 posted the following headline" in body

    def test_single_word_name(self, psychotherapy_design):
        assert first_name("Troll") == "Troll"
        cfg = GenerationConfig()
        body = build_headline_prompt(Persona("Troll", "shares trolling comments"),
                                     psychotherapy_design, cfg).body
        assert "Troll posted the following headline" in body

    def test_oversized_design_errors(self, psychotherapy_design):
        from simulacra.errors import OversizedDesignError
        from simulacra.model import CommunityDesign
        big = CommunityDesign(goal="g" * 3000, rules=psychotherapy_design.rules,
                              seed_personas=psychotherapy_design.seed_personas)
        cfg = GenerationConfig(prompt_char_limit=1000)
        with pytest.raises(OversizedDesignError):
            build_headline_prompt(big.seed_personas[0], big, cfg)


class TestSerializeThread:
    def test_paper_block(self):
        text, dropped = serialize_thread([LAYLA_POST], 8000)
        assert text == ('[Layla Li]: <span class="comment">\n'
                        '"Antidepressants made me so unhappy that I wanted to die '
                        'without them."</span>')
        assert dropped == 0

    def test_drops_oldest_first(self):
        utterances = [utt(i, f"Person {i}", "x" * 1500) for i in range(9)]
        rendered_each = len('[Person 0]: <span class="comment">\n""</span>') + 1500
        budget = 8000
        text, dropped = serialize_thread(utterances, budget)
        # oracle: keep the longest suffix whose rendered length fits
        lengths = [rendered_each] * 9
        keep, total = 0, 0
        for n in lengths:
            if total + n + (1 if keep else 0) > budget:
                break
            total += n + (1 if keep else 0)
            keep += 1
        assert dropped == 9 - keep
        assert dropped >= 4
        assert "[Person 8]" in text
        assert "[Person 0]" not in text
        assert len(text) <= budget

    def test_budget_exhausted(self):
        with pytest.raises(BudgetExhaustedError):
            serialize_thread([LAYLA_POST], 1)

    @given(st.integers(min_value=1, max_value=12), st.integers(min_value=60, max_value=4000))
    @settings(max_examples=50)
    def test_budget_law_and_monotonicity(self, n, budget):
        utterances = [utt(i, f"P{i}", "hello world " * (i + 1)) for i in range(n)]
        try:
            text, dropped = serialize_thread(utterances, budget)
        except BudgetExhaustedError:
            return
        assert len(text) <= budget
        bigger_text, bigger_dropped = serialize_thread(utterances, budget + 500)
        assert bigger_dropped <= dropped


class TestReplyPrompt:
    def test_golden(self, psychotherapy_design):
        cfg = GenerationConfig()
        prompt = build_reply_prompt(psychotherapy_design.seed_personas[1], [LAYLA_POST],
                                    psychotherapy_design, cfg, pronoun="He")
        assert prompt.body == golden("reply_prompt.txt")
        assert prompt.truncated_utterance_count == 0

    def test_troll_override_cue(self, psychotherapy_design):
        cfg = GenerationConfig()
        prompt = build_reply_prompt(
            InjectedResponder("Troll", "shares trolling comments"), [LAYLA_POST],
            psychotherapy_design, cfg, title_override="comment that is trolling")
        assert prompt.body.endswith(
            '[Troll]: <span class="comment max_200_words" title="comment that is trolling">"')
        assert "[Troll] shares trolling comments." in prompt.body

    def test_truncation_keeps_cue_and_recent(self, psychotherapy_design):
        cfg = GenerationConfig()
        utterances = [utt(i, f"Person {i}", "y" * 1200) for i in range(12)]
        prompt = build_reply_prompt(psychotherapy_design.seed_personas[0], utterances,
                                    psychotherapy_design, cfg)
        assert prompt.char_count <= cfg.prompt_char_limit
        assert prompt.truncated_utterance_count > 0
        assert "[Person 11]" in prompt.body
        assert "[Person 0]" not in prompt.body
        assert prompt.body.endswith('">"')

    def test_length_always_within_limit(self, psychotherapy_design):
        cfg = GenerationConfig()
        for n in range(1, 13):
            utterances = [utt(i, f"Person {i}", "z" * 900) for i in range(n)]
            prompt = build_reply_prompt(psychotherapy_design.seed_personas[0], utterances,
                                        psychotherapy_design, cfg)
            assert prompt.char_count <= cfg.prompt_char_limit


MARKER_GOAL = "zqgoalmarker discussions"
MARKER_RULES = ["no zqrulemarkerone", "zqrulemarkertwo kindness"]


@given(st.integers(min_value=0, max_value=2 ** 32))
@settings(max_examples=100)
def test_ablation_excludes_design_text(seed):
    """No substring of the goal or rules leaks into no-description prompts."""
    import random
    from simulacra.model import CommunityDesign
    r = random.Random(seed)
    goal = f"{MARKER_GOAL} {r.randint(0, 999)}"
    rules = tuple(Rule.infer(f"{t} {r.randint(0, 999)}") for t in MARKER_RULES)
    seeds = tuple(Persona(f"Person {i} N{r.randint(0, 999)}", "does things")
                  for i in range(r.randint(1, 4)))
    design = CommunityDesign(goal=goal, rules=rules, seed_personas=seeds)
    cfg = GenerationConfig(ablation="no_description")
    head = build_headline_prompt(seeds[0], design, cfg).body
    reply = build_reply_prompt(seeds[0], [utt(0, "User 9", "hello there")], design, cfg).body
    for body in (head, reply):
        assert "zqgoalmarker" not in body
        assert "zqrulemarkerone" not in body
        assert "zqrulemarkertwo" not in body


class TestParseCompletion:
    def test_paper_post(self):
        raw = ("My experience with therapy has been amazing and I would encourage "
               "everyone to give it a try!</span>")
        assert parse_completion(raw) == raw[: -len("</span>")]

    def test_paper_reply_quotes_stripped(self):
        raw = ('"I\'m sorry to hear that you felt that way. I think it can be really '
               'helpful for people who are struggling with depression."</span>')
        assert parse_completion(raw) == (
            "I'm sorry to hear that you felt that way. I think it can be really "
            "helpful for people who are struggling with depression.")

    def test_bare_tag_is_empty_generation(self):
        with pytest.raises(EmptyGenerationError):
            parse_completion("</span>")

    def test_reply_completion_reinstates_cue_quote(self):
        assert parse_reply_completion('Nice to meet you."</span>') == "Nice to meet you."

    @given(st.text(max_size=120))
    def test_idempotent(self, raw):
        try:
            once = parse_completion(raw)
        except EmptyGenerationError:
            return
        assert parse_completion(once) == once


def test_default_title_phrase():
    assert default_title_phrase("shares trolling comments") == "comment that is trolling"
    assert default_title_phrase("shares sarcastic comments.") == "comment that is sarcastic"
    assert default_title_phrase("always off topic") == "comment that is always off topic"
