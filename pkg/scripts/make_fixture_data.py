#!/usr/bin/env python3
"""Regenerate the shipped fixture data files.

Survey names match the default production catalog; question wording and tag
labels beyond the few canonical ones are synthetic fixture content. Output is
deterministic so the JSON files stay diff-stable.
"""

import json
import re
from pathlib import Path

DATA_DIR = Path(__file__).resolve().parents[1] / "src" / "geoquorum" / "data"


def slug(text: str) -> str:
    return re.sub(r"[^a-z0-9]+", "-", text.lower()).strip("-")


# (survey name, survey id, [(question text, multi_select, [labels])])
SURVEYS = [
    ("Sexual Activity", "sexual-activity", [
        ("Sexual activity", True, [
            "vaginal sex", "oral sex", "anal sex", "manual stimulation",
            "mutual masturbation", "kissing", "cuddling", "massage", "role play",
            "bondage", "phone sex", "video chat", "sexting", "fantasy only",
            "showering together", "dancing", "striptease", "lap dance",
            "watching porn together", "reading erotica", "tantric session", "quickie",
        ]),
        ("Relationship description", False, [
            "committed relationship", "casual encounter", "friends with benefits",
            "married", "dating", "ex-partner", "anonymous partner", "paid encounter",
        ]),
        ("How many people involved?", False, [
            "one", "two", "three", "multiple partners", "group",
        ]),
        ("Location", True, [
            "home", "partner's home", "hotel", "car", "outdoors", "workplace",
            "party", "dorm", "public venue", "vacation rental", "beach", "forest",
            "garage", "office after hours", "gym", "rooftop", "basement", "staircase",
        ]),
        ("Protection used", True, [
            "condom", "dental dam", "hormonal contraception", "iud", "withdrawal",
            "fertility awareness", "no protection", "other protection",
        ]),
        ("Time of day", False, [
            "early morning", "morning", "midday", "afternoon", "evening", "late night",
        ]),
        ("Mood before", True, [
            "relaxed", "stressed", "excited", "anxious", "playful", "romantic",
            "bored", "tired", "adventurous", "affectionate", "curious", "lonely",
            "celebratory", "jealous", "reconciling", "experimental",
        ]),
        ("Initiated by", False, ["me", "partner", "mutual", "spontaneous"]),
        ("Duration", False, [
            "under five minutes", "five to fifteen minutes", "fifteen to thirty minutes",
            "thirty to sixty minutes", "over an hour", "all night",
        ]),
        ("Satisfaction", False, [
            "very satisfied", "satisfied", "neutral", "unsatisfied", "very unsatisfied",
        ]),
        ("Communication", True, [
            "discussed beforehand", "consent asked verbally", "safe word agreed",
            "talked during", "debriefed after", "no discussion", "texted after",
            "nonverbal cues",
        ]),
        ("Sounds and expression", True, [
            "silent", "quiet", "talkative", "laughing", "moaning", "music playing",
            "tv on", "neighbors audible",
        ]),
        ("Props and toys", True, [
            "none used", "vibrator", "lubricant", "blindfold", "restraints", "costume",
            "mirror", "camera", "feather", "massage oil", "handcuffs", "rope",
            "paddle", "ice", "wax", "swing",
        ]),
        ("Afterwards", True, [
            "cuddled", "slept", "showered", "ate", "talked", "left immediately",
            "watched a show", "exercised",
        ]),
    ]),
    ("Flirting", "flirting", [
        ("Gender flirting", True, [
            "male flirting", "female flirting", "nonbinary flirting", "mutual flirting",
        ]),
        ("Flirting setting", True, [
            "bar", "workplace", "school", "gym", "online app", "social media",
            "party", "coffee shop", "public transit", "wedding", "conference", "street",
        ]),
        ("Flirting style", True, [
            "compliments", "teasing", "eye contact", "light touch", "humor",
            "buying drinks", "dancing", "showing off", "gift giving", "direct proposition",
        ]),
        ("Outcome", False, [
            "exchanged numbers", "went on a date", "went home together",
            "politely declined", "ignored", "interrupted",
        ]),
        ("Who initiated", False, ["me", "them", "mutual", "friend introduced"]),
    ]),
    ("Public Display of Affection", "public-display-of-affection", [
        ("Type of affection", True, [
            "holding hands", "kissing", "hugging", "arm around shoulder", "sitting on lap",
            "dancing close", "feeding each other", "whispering", "caressing", "long embrace",
        ]),
        ("Venue", True, [
            "park", "restaurant", "cinema", "street", "beach", "concert",
            "public transit", "mall", "airport", "campus",
        ]),
        ("Bystander reaction", True, [
            "smiles", "stares", "comments", "complaints", "applause", "no reaction",
        ]),
        ("Company", False, ["just us", "with friends", "with family", "in a crowd"]),
        ("How long", False, [
            "a moment", "a few minutes", "on and off all day", "continuous",
        ]),
    ]),
    ("Sexual Fetish", "sexual-fetish", [
        ("Fetish type", True, [
            "feet", "leather", "latex", "uniforms", "voyeurism", "exhibitionism",
            "domination", "submission", "spanking", "role reversal", "lingerie",
            "food play", "sensory deprivation", "wax play",
        ]),
        ("Context", True, [
            "with long-term partner", "with new partner", "solo", "online",
            "club or event", "negotiated scene", "spontaneous", "planned in advance",
        ]),
        ("Partner involvement", False, [
            "partner participated", "partner observed", "partner unaware", "no partner",
        ]),
        ("Frequency", False, [
            "first time", "rarely", "monthly", "weekly", "daily",
        ]),
        ("How discovered", True, [
            "online reading", "partner suggested", "film or book", "accidental",
            "community event", "long-standing interest",
        ]),
    ]),
    ("Porn", "porn", [
        ("Medium", True, [
            "video site", "film", "magazine", "literature", "audio", "animation",
            "live cam", "virtual reality",
        ]),
        ("Genre", True, [
            "amateur", "professional", "romantic", "hardcore", "softcore", "parody",
            "documentary style", "vintage", "animated", "solo performer", "couples",
            "group scene",
        ]),
        ("Device", False, ["phone", "tablet", "laptop", "desktop", "television"]),
        ("Company", False, ["alone", "with partner", "with group"]),
        ("Payment", False, ["free", "subscription", "one-time purchase"]),
        ("Frequency", False, [
            "first time", "rarely", "monthly", "weekly", "daily",
        ]),
    ]),
    ("Female Hormonal Birth Control Use and Effects", "birth-control", [
        ("Method", False, [
            "pill", "patch", "ring", "injection", "implant", "hormonal iud",
            "emergency contraception",
        ]),
        ("Duration of use", False, [
            "under a month", "one to six months", "six months to two years",
            "two to five years", "over five years",
        ]),
        ("Side effects", True, [
            "nausea", "headache", "mood changes", "weight change", "spotting",
            "cramps", "breast tenderness", "acne", "libido change", "fatigue",
            "dizziness", "irregular bleeding", "appetite change", "no side effects",
        ]),
        ("Effect on mood", False, [
            "much better", "better", "no change", "worse", "much worse",
        ]),
        ("Satisfaction", False, [
            "very satisfied", "satisfied", "neutral", "unsatisfied", "very unsatisfied",
        ]),
        ("Reason for use", True, [
            "contraception", "cycle regulation", "acne treatment", "pain management",
            "pms relief", "other reason",
        ]),
    ]),
    ("Unwanted Experience", "unwanted-experience", [
        ("Experience type", True, [
            "stalking", "catcalling", "groping", "indecent exposure",
            "unwanted messages", "harassment at work", "coercion", "threats",
            "being followed", "photographed without consent",
        ]),
        ("Where it happened", True, [
            "street", "workplace", "online", "public transit", "bar", "home",
            "school", "event",
        ]),
        ("Response", True, [
            "reported to police", "told friends", "confronted", "ignored",
            "blocked online", "left location", "sought support", "documented",
        ]),
        ("Relationship to person", False, [
            "stranger", "acquaintance", "coworker", "friend", "ex-partner",
            "family member",
        ]),
    ]),
    ("Valentine's Day", "valentines-day", [
        ("Plans", True, [
            "dinner out", "home-cooked meal", "gifts", "flowers", "chocolate",
            "card", "weekend trip", "no plans",
        ]),
        ("With whom", False, [
            "partner", "date", "friends", "family", "alone",
        ]),
        ("Gift received", True, [
            "flowers", "chocolate", "jewelry", "card", "clothing", "experience",
            "handmade gift", "nothing",
        ]),
        ("Mood", False, ["delighted", "content", "indifferent", "disappointed", "lonely"]),
        ("Spending", False, [
            "nothing", "a little", "moderate", "generous", "extravagant",
        ]),
    ]),
]

QUESTION_ID_OVERRIDES = {
    ("sexual-activity", "Sexual activity"): "sa-activity",
    ("sexual-activity", "Relationship description"): "sa-relationship",
}

GEOBOXES = [
    # country, province, city, lat_min, lat_max, lon_min, lon_max
    ("usa", "indiana", "bloomington", 39.05, 39.30, -86.65, -86.40),
    ("usa", "indiana", "indianapolis", 39.60, 39.95, -86.35, -85.95),
    ("usa", "california", "san francisco", 37.70, 37.84, -122.55, -122.35),
    ("usa", "california", "los angeles", 33.90, 34.15, -118.50, -118.10),
    ("usa", "texas", "austin", 30.15, 30.45, -97.90, -97.55),
    ("usa", "oregon", "portland", 45.40, 45.65, -122.80, -122.45),
    ("usa", "ohio", "columbus", 39.85, 40.10, -83.15, -82.80),
    ("usa", "new york", "new york", 40.55, 40.90, -74.10, -73.70),
    ("italy", "lazio", "rome", 41.80, 42.00, 12.35, 12.65),
    ("canada", "ontario", "toronto", 43.55, 43.85, -79.60, -79.15),
    ("netherlands", "north holland", "amsterdam", 52.28, 52.45, 4.75, 5.05),
    ("great britain", "england", "london", 51.38, 51.65, -0.45, 0.20),
    ("china", "beijing", "beijing", 39.75, 40.10, 116.15, 116.65),
    ("spain", "community of madrid", "madrid", 40.30, 40.55, -3.85, -3.55),
    ("turkey", "istanbul", "istanbul", 40.90, 41.20, 28.70, 29.25),
    ("denmark", "capital region", "copenhagen", 55.60, 55.75, 12.45, 12.70),
    ("australia", "new south wales", "sydney", -34.00, -33.70, 150.95, 151.30),
]


def build_catalog():
    out = []
    for name, sid, questions in SURVEYS:
        qdocs = []
        for text, multi, labels in questions:
            qid = QUESTION_ID_OVERRIDES.get((sid, text), f"{sid}-{slug(text)}")
            qdocs.append({
                "id": qid,
                "text": text,
                "multi_select": multi,
                "tags": [{"id": f"{qid}-{slug(lb)}", "label": lb} for lb in labels],
            })
        out.append({"id": sid, "name": name, "questions": qdocs})
    return out


def main():
    DATA_DIR.mkdir(parents=True, exist_ok=True)
    catalog = build_catalog()
    (DATA_DIR / "catalog.json").write_text(
        json.dumps(catalog, indent=1, ensure_ascii=False) + "\n", "utf-8"
    )
    boxes = [
        {
            "country": c, "province": p, "city": ci,
            "lat_min": a, "lat_max": b, "lon_min": lo, "lon_max": hi,
        }
        for c, p, ci, a, b, lo, hi in GEOBOXES
    ]
    (DATA_DIR / "geoboxes.json").write_text(
        json.dumps(boxes, indent=1, ensure_ascii=False) + "\n", "utf-8"
    )
    n_tags = sum(len(q["tags"]) for s in catalog for q in s["questions"])
    print(f"wrote catalog with {len(catalog)} surveys, {n_tags} tags; {len(boxes)} geo boxes")


if __name__ == "__main__":
    main()
