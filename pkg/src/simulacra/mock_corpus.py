"""Template corpus behind the deterministic mock backend.

Sentences are deliberately bland but on-topic: the mock substitutes the
community topic extracted from the prompt so generated content stays
plausible enough for tests, transcripts, and UI demos.
"""

from __future__ import annotations

import re

from .rng import RngStream

GENERIC_SENTENCE = "This is an interesting discussion and I wanted to add my thoughts."

_FIRST_NAMES = [
    "Ada", "Aiden", "Alma", "Amara", "Amir", "Anya", "Ari", "Asha", "Ben", "Bianca",
    "Caleb", "Camila", "Carlos", "Chen", "Clara", "Dario", "Dev", "Diego", "Dina", "Eli",
    "Elena", "Emeka", "Esme", "Ethan", "Farah", "Felix", "Fiona", "Gabriel", "Gina", "Goran",
    "Hana", "Hassan", "Hugo", "Ida", "Igor", "Imani", "Ines", "Ivan", "Jade", "Jamal",
    "Jana", "Jin", "Jonas", "Julia", "Kai", "Kara", "Kenji", "Kira", "Lars", "Leila",
    "Liam", "Lina", "Luca", "Mai", "Marco", "Mina", "Nadia", "Nico", "Noor", "Omar",
    "Paula", "Petra", "Priya", "Rafael", "Ravi", "Rhea", "Rosa", "Sana", "Sasha", "Selin",
    "Simon", "Sofia", "Talia", "Tariq", "Theo", "Uma", "Vera", "Wei", "Yara", "Zoe",
]

_LAST_NAMES = [
    "Abara", "Adler", "Alvarez", "Antunes", "Baptiste", "Barros", "Becker", "Bello", "Berg", "Bianchi",
    "Calder", "Castillo", "Chen", "Cho", "Costa", "Demir", "Diallo", "Dominguez", "Dunn", "Eriksen",
    "Farouk", "Fernandes", "Fischer", "Fontaine", "Garber", "Gupta", "Haddad", "Halvorsen", "Hassan", "Herrera",
    "Ibarra", "Ishikawa", "Ivanov", "Jansen", "Jimenez", "Kaur", "Keller", "Kimura", "Kowalski", "Krishnan",
    "Laurent", "Lindgren", "Lombardi", "Ma", "Marchetti", "Mbeki", "Mendes", "Meyer", "Moreau", "Moretti",
    "Nakamura", "Novak", "Obi", "Okafor", "Oliveira", "Olsen", "Ortega", "Park", "Petrov", "Quispe",
    "Rahman", "Reyes", "Rossi", "Saito", "Sandoval", "Schmidt", "Silva", "Sorensen", "Suzuki", "Tanaka",
    "Torres", "Ueda", "Vargas", "Vasquez", "Vidal", "Weber", "Wong", "Yilmaz", "Zhang", "Zimmer",
]

_PERSONA_DESCRIPTIONS = [
    "works as a community organizer",
    "recent college graduate exploring career options",
    "retired teacher with strong opinions",
    "freelance journalist who asks a lot of questions",
    "graduate student researching the field",
    "parent of two with limited free time",
    "long-time hobbyist who loves sharing tips",
    "newcomer looking for advice",
    "skeptic who needs to see evidence",
    "enthusiast who posts daily updates",
    "professional with a decade of experience",
    "volunteer moderator on other forums",
    "small business owner in a related industry",
    "writes a niche blog on the subject",
    "curious lurker finally joining the conversation",
    "podcast listener who follows the experts",
    "engineer who likes practical details",
    "artist drawn to the creative side of things",
    "night-shift nurse who reads during breaks",
    "high school teacher planning a class unit",
    "avid reader of the relevant research",
    "regular attendee of local meetups",
    "works in public policy",
    "amateur historian of the topic",
    "data analyst who tracks the trends",
    "immigrant bringing a cross-cultural perspective",
    "quiet observer who occasionally comments",
    "former insider who has seen it all",
    "student saving up to get more involved",
    "weekend warrior balancing a day job",
    "person who discovered the topic during a tough year",
    "keeps detailed notes and loves spreadsheets",
    "prefers asking questions to giving answers",
    "tries every new thing once",
    "grandparent learning from their grandkids",
    "believes in doing things the traditional way",
    "always recommends more reading",
    "translates jargon for beginners",
    "organizes an annual local event",
    "relocated recently and looking for community",
]

_HEADLINE_TEMPLATES = [
    "My experience with {topic} has been amazing and I would encourage everyone to give it a try!",
    "What is one thing you wish you had known before getting into {topic}?",
    "I finally took the plunge into {topic} last month and I have so many questions.",
    "Unpopular opinion: we talk about {topic} all wrong and I want to discuss why.",
    "Looking for honest stories about {topic} from people who have been at it for years.",
    "A small win today related to {topic} that I wanted to share with this community.",
    "Is it just me, or has {topic} changed a lot in the past few years?",
    "New here: what resources helped you the most when you started with {topic}?",
    "After a rough start, {topic} has genuinely improved my life and here is how.",
    "Can we have a thread collecting the best beginner advice about {topic}?",
    "I made every mistake possible with {topic} so you don't have to.",
    "Today I learned something surprising about {topic} and I can't stop thinking about it.",
    "How do you explain {topic} to friends and family who just don't get it?",
    "Long-time lurker here with a confession about {topic}.",
    "What does everyone think about the recent developments around {topic}?",
]

_REPLY_OPENERS = [
    "I'm sorry to hear that you felt that way.",
    "Thanks for sharing this with the community.",
    "I had a really similar experience last year.",
    "That's a great question and I've wondered the same thing.",
    "I see this a little differently.",
    "This resonates with me a lot.",
    "I don't usually comment, but this deserved a reply.",
    "Honestly, this is why I keep coming back to this forum.",
    "I want to gently push back on part of this.",
    "You are definitely not alone in this.",
    "As someone who has been around this for a while,",
    "Adding my two cents here:",
    "This thread is exactly what I needed today.",
    "I was skeptical at first too.",
]

_REPLY_BODIES = [
    "I think it can be really helpful for people who are struggling to give it a try.",
    "What worked for me was starting small and being patient with the process.",
    "It took me a long time to find something that fit, so keep looking.",
    "The community around {topic} made all the difference for me.",
    "I'd recommend talking to someone with more experience before deciding.",
    "There is no one-size-fits-all answer, and that's okay.",
    "My advice is to keep notes on what works and what doesn't.",
    "Everyone's situation is different, but sharing stories like this helps.",
    "Don't let one bad experience put you off for good.",
    "The first step is the hardest and you've already taken it.",
    "I found that expectations matter more than anything else.",
    "It helps to remember why you started in the first place.",
    "Reading about {topic} here taught me more than anywhere else.",
    "Give it time; things looked very different for me after a few months.",
]

_TROLL_LINES = [
    "This whole thread is pathetic and so is everyone taking it seriously.",
    "Imagine actually believing this. Couldn't be me.",
    "Wow, another thread where everyone pats each other on the back. Boring.",
    "You people will believe anything you read online.",
    "This is the worst take I have ever seen and I have seen a lot of them.",
    "Cry more. Nobody cares about your little story.",
    "Anyone who agrees with this post is a gullible sheep.",
    "I only came here to say that this community is a joke.",
]

_TROLL_TAILS = [
    "Downvote me all you want.",
    "Somebody had to say it.",
    "Keep pretending otherwise.",
    "Not that any of you will listen.",
    "And that's the nicest way I can put it.",
    "Prove me wrong, you can't.",
    "This forum gets worse every day.",
    "Enjoy your echo chamber.",
]

_MODERATOR_RESPONSES = [
    "Sorry, I may have been too harsh. I'll keep it civil from here.",
    "That's offensive? Then why don't you kick me out already? I'd like to see you do it LOL.",
    "Fine, whatever. Didn't realize this place was so sensitive.",
    "You're right, that came out wrong. I apologize to everyone in the thread.",
    "I hear you. I still disagree with the post, but I'll say it more respectfully.",
    "Rules are rules, I guess. Consider me warned.",
    "Honestly, I was out of line. Thanks for stepping in.",
    "Or what? Ban me then. This thread was dead anyway.",
]

_TOPIC_FROM_TITLE = re.compile(r'title="comment that is about ([^,"]+)')
_TOPIC_FROM_FORUM = re.compile(r"(?:online forum for|online social media for) ([^:\n]+?)[:.]")
_CUE_TITLE = re.compile(r'title="comment that is ([^"]*)"\s*>?"?\s*$')


def classify_prompt(prompt: str) -> str:
    """Sort a prompt into its template family by its structural markers."""
    if 'class="headline_reddit"' in prompt:
        return "headline"
    if '<span class="comment' in prompt:
        return "reply"
    lines = [ln for ln in prompt.splitlines() if ln.strip()]
    if lines and all("," in ln for ln in lines):
        return "persona_expansion"
    return "generic"


def extract_topic(prompt: str) -> str:
    m = _TOPIC_FROM_TITLE.search(prompt)
    if m:
        return m.group(1).strip()
    m = _TOPIC_FROM_FORUM.search(prompt)
    if m:
        return m.group(1).strip()
    return "this"


def persona_batch(rng: RngStream, count: int = 10) -> str:
    """A batch of "Name, description" lines mimicking few-shot continuation."""
    lines = []
    for _ in range(count):
        name = f"{rng.choice(_FIRST_NAMES)} {rng.choice(_LAST_NAMES)}"
        lines.append(f"{name}, {rng.choice(_PERSONA_DESCRIPTIONS)}")
    return "\n".join(lines)


def headline_sentence(rng: RngStream, topic: str) -> str:
    return rng.choice(_HEADLINE_TEMPLATES).format(topic=topic)


def reply_sentence(rng: RngStream, topic: str, prompt: str) -> str:
    """Pick a reply appropriate to the conversational situation in the prompt."""
    if f"[{_moderator_label()}]:" in prompt:
        return rng.choice(_MODERATOR_RESPONSES)
    cue = _CUE_TITLE.search(prompt)
    if cue:
        phrase = cue.group(1)
        if "trolling" in phrase and "NOT" not in phrase:
            return f"{rng.choice(_TROLL_LINES)} {rng.choice(_TROLL_TAILS)}"
    opener = rng.choice(_REPLY_OPENERS)
    body = rng.choice(_REPLY_BODIES).format(topic=topic)
    return f"{opener} {body}"


def _moderator_label() -> str:
    from .model import MODERATOR_LABEL
    return MODERATOR_LABEL
