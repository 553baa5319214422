"""Small labelled corpora for desk-scale runs and tests."""

from __future__ import annotations

import random

from memcluster.model import Document

TOPICS = {
    "weather": ["will it rain", "forecast for", "how hot is it", "is it snowing in"],
    "alarm_set": ["set an alarm for", "wake me up at", "alarm at", "remind me at"],
    "music_play": ["play some", "put on the song", "shuffle my", "start the playlist"],
    "news_query": ["latest headlines about", "what happened with", "news on", "any updates about"],
    "cooking_recipe": ["how do i cook", "recipe for", "bake a", "ingredients for"],
    "travel_booking": ["book a flight to", "find a hotel in", "train tickets to", "reserve a car in"],
    "sports_scores": ["who won the game", "score of the", "league table for", "match result"],
    "finance_stock": ["stock price of", "how is the market", "shares of", "dividend for"],
    "smart_home": ["turn off the lights in", "dim the", "lock the", "set the thermostat in"],
    "calendar_event": ["add a meeting with", "what is on my calendar", "schedule lunch with", "cancel the event"],
    "email_send": ["send an email to", "reply to the message from", "draft a note to", "forward the mail to"],
    "transport_taxi": ["call a taxi to", "get me an uber to", "how long is the ride to", "book a cab to"],
}
FILLERS = ["tomorrow", "paris", "the kitchen", "mom", "jazz", "friday", "tesla", "berlin", "pasta", "noon"]


def class_names(n_classes: int) -> list[str]:
    names = list(TOPICS)
    return names[:n_classes] + [f"topic_{i:02d}" for i in range(len(names), n_classes)]


def make_corpus(n_docs: int, n_classes: int, seed: int = 0) -> list[Document]:
    """Every class appears within the first ``n_classes`` documents; later order is shuffled."""
    if n_classes < 1 or n_docs < n_classes:
        raise ValueError("need 1 <= n_classes <= n_docs")
    rng = random.Random(seed)
    names = class_names(n_classes)
    labels = names + [rng.choice(names) for _ in range(n_docs - n_classes)]
    tail = labels[n_classes:]
    rng.shuffle(tail)
    labels[n_classes:] = tail
    docs = []
    for i, gold in enumerate(labels):
        phrases = TOPICS.get(gold, [f"something about {gold.replace('_', ' ')}"])
        text = f"{rng.choice(phrases)} {rng.choice(FILLERS)} ({i})"
        docs.append(Document(f"d{i:04d}", text, gold))
    return docs
