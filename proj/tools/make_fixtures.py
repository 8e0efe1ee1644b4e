#!/usr/bin/env python3
"""Regenerates the small bundled corpora under tests/data/.

The output is deterministic; rerunning the script must leave the files
unchanged.
"""

import json
import random
from pathlib import Path

DATA = Path(__file__).resolve().parent.parent / "tests" / "data"

PLACES = ["Adrian", "Marlow", "Kestrel Bay", "Ostend", "Veldhoven", "Tarragona", "Lindau",
          "Brixham", "Cordova", "Halden", "Ravenna", "Dunmore", "Port Ellis", "Selby"]
THINGS = ["bridge", "harbor", "library", "observatory", "railway station", "cathedral",
          "market hall", "lighthouse", "botanical garden", "town hall", "canal", "museum"]
PEOPLE = ["Berryman", "Okafor", "Lindqvist", "Moreau", "Tanaka", "Castellanos", "Novak",
          "Whitfield", "Sandoval", "Achterberg", "Ferreira", "Quinlan"]
TOPICS = ["politics", "engineering", "football", "painting", "astronomy", "trade", "farming",
          "music", "shipping", "medicine"]
VERBS = ["opened", "was rebuilt", "was expanded", "closed for repairs", "was renamed",
         "hosted its first festival", "was damaged by a storm", "received a national award"]

OPENERS = [
    "{person} (born {year}) is a {topic} figure from {place}.",
    "The {thing} of {place} is one of the oldest in the region.",
    "{place} is a small town known for its {thing}.",
    "In {year}, the {thing} in {place} {verb}.",
    "{person} served as mayor of {place} from {year} to {year2}.",
]
BODY = [
    "It {verb} in {year}.",
    "Local records describe a long dispute over its ownership.",
    "{person} wrote about it in a short essay on {topic}.",
    "Visitors from {place} arrive mostly in summer.",
    "The building was restored after a fire in {year}.",
    "A second {thing} was planned but never built.",
    "Its collection includes maps, letters and early photographs.",
    "The council voted to extend it in {year}.",
    "Attendance grew steadily during the following decade.",
    "The original plans were drawn by an engineer from {place}.",
]

REVIEW_CATEGORIES = {
    "Kitchen": ["kettle", "pan", "knife set", "blender", "popcorn maker"],
    "Books": ["novel", "cookbook", "travel guide", "biography", "poetry collection"],
    "Electronics": ["antenna", "phone case", "charger", "headset", "radio"],
    "Toys": ["puzzle", "kite", "board game", "train set", "plush bear"],
}
REVIEW_OPEN = [
    "This {item} is exactly what I needed.",
    "The {item} arrived quickly and works well.",
    "I bought this {item} as a gift for my brother.",
    "Disappointed with this {item} overall.",
    "Great value for a {item} at this price.",
]
REVIEW_BODY = [
    "The instructions were easy to follow.",
    "It feels sturdy and well made.",
    "After two weeks it still works fine.",
    "Shipping took longer than promised.",
    "My kids use it every day.",
    "I would buy it again.",
    "The color is a bit darker than the photos.",
    "Customer service answered within a day.",
]


def fill(template, rng):
    year = rng.randint(1850, 2015)
    return template.format(person=rng.choice(PEOPLE), place=rng.choice(PLACES),
                           thing=rng.choice(THINGS), topic=rng.choice(TOPICS),
                           verb=rng.choice(VERBS), year=year, year2=year + rng.randint(1, 12))


def articles(rng):
    out = []
    for a in range(50):
        paragraphs = []
        for p in range(rng.randint(3, 7)):
            sentences = [fill(rng.choice(OPENERS), rng)]
            sentences += [fill(rng.choice(BODY), rng) for _ in range(rng.randint(1, 4))]
            paragraphs.append(" ".join(sentences))
        # A few paragraphs that filtering should drop.
        if a % 10 == 3:
            paragraphs.insert(1, "See also.")
        if a % 10 == 7:
            paragraphs.insert(2, "### *** ###! More follows here.")
        if a % 10 == 9 and out:
            paragraphs.insert(1, out[-1]["paragraphs"][0])
        out.append({"id": f"wiki-{a:03d}", "title": f"Article {a}", "paragraphs": paragraphs})
    return out


def reviews(rng):
    out = []
    for i in range(200):
        category = rng.choice(sorted(REVIEW_CATEGORIES))
        item = rng.choice(REVIEW_CATEGORIES[category])
        sentences = [REVIEW_OPEN[rng.randrange(len(REVIEW_OPEN))].format(item=item)]
        sentences += rng.sample(REVIEW_BODY, rng.randint(1, 3))
        sentences.append(f"Order number {1000 + i} was handled well.")
        out.append({"category": category, "text": " ".join(sentences)})
    return out


def main():
    rng = random.Random(20220301)
    DATA.mkdir(parents=True, exist_ok=True)
    with open(DATA / "tiny_articles.jsonl", "w", encoding="utf-8") as f:
        for rec in articles(rng):
            f.write(json.dumps(rec, ensure_ascii=False) + "\n")
    with open(DATA / "tiny_reviews.jsonl", "w", encoding="utf-8") as f:
        for rec in reviews(rng):
            f.write(json.dumps(rec, ensure_ascii=False) + "\n")


if __name__ == "__main__":
    main()
