#!/usr/bin/env python3
"""Regenerates data/synthetic.jsonl, the small bundled demo corpus.

Roughly 15% of the tweets mention a drug. Offsets are character offsets.
"""
import json
import random

rng = random.Random(20211108)

DRUGS = [
    "epidural", "tums", "tylenol", "birth control", "prenatal vitamins",
    "zofran", "ibuprofen", "aspirin", "benadryl", "folic acid", "Follistim",
    "flu shot", "unisom", "pitocin", "colace", "Tdap vaccine", "iron pills",
    "Bio-oil", "claritin", "metformin", "advil", "nexium", "gaviscon",
    "miralax", "diclegis", "prenatal vitamins with DHA",
]

POSITIVE_TEMPLATES = [
    "just took {d} and feeling better",
    "can't believe how much {d} helps with this heartburn",
    "doc says {d} is fine during pregnancy 🤰",
    "ran out of {d} again ugh",
    "anyone else living on {d} this trimester??",
    "{d} is my best friend right now 😩",
    "got the {d} today, baby kicking like crazy",
    "asked the nurse about {d} #pregnancy",
    "note to self: buy {d} tomorrow",
    "stocked up on {d} at target lol",
]
HASHTAG_TEMPLATES = [
    "3am and I'm reaching for the #{d} again",
    "team #{d} all the way",
]
COLON_TEMPLATES = [
    "{d}: day 4 of injections, so tired",
    "shopping list {d}: check",
]
TYPO_TWEETS = [
    ("took some asprin for this headache", "asprin"),
    ("the tylenl isn't helping at all", "tylenl"),
]
TWO_DRUG_TEMPLATES = [
    "{a} in the morning, {b} at night",
    "switching from {a} to {b} per my OB",
]
NEGATIVE = [
    "baby shower planning is so stressful",
    "my toddler's tantrums are next level today",
    "32 weeks and the nursery is finally done",
    "why is everything about pickles now 😂",
    "first ultrasound tomorrow!! so nervous",
    "nap time is the best time",
    "husband assembled the crib backwards lol",
    "craving tacos at midnight again",
    "maternity leave countdown: 12 days",
    "can someone explain round ligament pain",
    "going to the gym was a mistake",
    "so many baby name lists, none agreed on",
    "she smiled at me today 🥰",
    "car seat installed, feeling like an adult",
    "hospital bag packed and repacked",
    "the heat is unbearable this week",
    "new episode tonight, no spoilers please",
    "tired of people touching my belly",
    "registry done finally",
    "swollen feet club checking in",
    "birth plan: whatever gets the baby out",
    "control the controllables they said",
    "watching the rain with decaf coffee",
    "first kicks felt like popcorn",
    "my cat is named zofran and she is a menace",
    "the tums tummy rumble is real lol",
    "pitocin playlist for the delivery room vibes",
]


def mention(template, drug, hashtag=False):
    text = template.format(d=drug)
    start = text.index(("#" if hashtag else "") + drug) + (1 if hashtag else 0)
    return text, [(start, start + len(drug))]


def char_spans(text, spans):
    out = []
    for s, e in spans:
        cs = len(text[:s])
        out.append({"start": cs, "end": cs + len(text[s:e]), "surface": text[s:e]})
    return out


records = []
users = [f"u{i:02d}" for i in range(12)]


def add(text, spans):
    records.append({
        "id": f"syn{len(records):04d}",
        "user_id": rng.choice(users),
        "text": text,
        "spans": char_spans(text, spans),
    })


positives = []
for _ in range(24):
    d = rng.choice(DRUGS)
    positives.append(mention(rng.choice(POSITIVE_TEMPLATES), d))
for d in ["tylenol", "zofran", "unisom"]:
    positives.append(mention(rng.choice(HASHTAG_TEMPLATES), d, hashtag=True))
for d in ["Follistim", "colace"]:
    positives.append(mention(rng.choice(COLON_TEMPLATES), d))
for text, surface in TYPO_TWEETS:
    s = text.index(surface)
    positives.append((text, [(s, s + len(surface))]))
for _ in range(2):
    a, b = rng.sample(DRUGS, 2)
    text = rng.choice(TWO_DRUG_TEMPLATES).format(a=a, b=b)
    sa = text.index(a)
    sb = text.index(b, sa + len(a))
    positives.append((text, [(sa, sa + len(a)), (sb, sb + len(b))]))

negatives = [rng.choice(NEGATIVE) + rng.choice(["", "", " 😴", " #momlife", "!!", " smh"]) for _ in range(170)]

items = [("p", p) for p in positives] + [("n", n) for n in negatives]
rng.shuffle(items)
for kind, item in items:
    if kind == "p":
        add(*item)
    else:
        add(item, [])

with open("data/synthetic.jsonl", "w", encoding="utf-8") as f:
    for r in records:
        f.write(json.dumps(r, ensure_ascii=False, separators=(",", ":")) + "\n")
print(len(records), "tweets,", len(positives), "positive")
