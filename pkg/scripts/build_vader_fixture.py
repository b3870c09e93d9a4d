"""Regenerate tests/data/vader_reference.tsv.

Builds a fixed 300-sentence set exercising negation, boosters, caps,
punctuation, "but" clauses, idioms and emoticons, then records the scores of
the reference ``vaderSentiment`` package (pip install vaderSentiment==3.3.2).
Only needed when the sentence set changes; tests read the committed file.
"""

import csv
import itertools
import sys
from pathlib import Path

OUT = Path(__file__).resolve().parents[1] / "tests" / "data" / "vader_reference.tsv"

HAND = [
    "Avoid exit 374 if possible - major accident causing delays",
    "SmartTrips Knoxville promoting bike sharing to reduce Knoxville traffic congestion",
    "$20 to park downtown for 2 hours is insane. #Knoxville",
    "Stuck in I-40 traffic for an hour again. This project is a nightmare.",
    "Took away a whole lane on Broadway for bikes nobody uses.",
    "Love the new protected bike lane on Gay St! Feels so much safer.",
    "Used the SmartTrips app to find a carpool partner, saved me so much stress and money.",
    "The KAT bus was late again",
    "The KAT bus was NOT late today!",
    "Cumberland Ave construction is finally done :)",
    "Cumberland Ave construction is never going to end :(",
    "I can't stand this traffic",
    "I cant stand this traffic",
    "Traffic isn't bad at all this morning",
    "Without a doubt the worst merge in Tennessee",
    "At least the detour signs are clear",
    "This is the least helpful detour ever",
    "Parking downtown is kind of a mess",
    "Parking downtown is sort of okay",
    "The new lights are kinda nice but the turn lanes are terrible",
    "The road is great, but the potholes are awful",
    "Nice job TDOT!!!",
    "Nice job TDOT!!!!!!",
    "Why is the bridge closed again??",
    "Why is the bridge closed again????",
    "Is the bridge closed?",
    "Yeah right, the project will be done on time",
    "That new greenway is the bomb",
    "Honestly the bus app is the shit",
    "What a bad ass interchange",
    "The bus stop is right there",
    "No problem getting downtown today",
    "No parking, no bikes, no fun",
    "Not good, not bad",
    "Never so happy to see an open lane",
    "Never this frustrated with I-75",
    "I-75 is ABSOLUTELY TERRIBLE today",
    "I-75 is absolutely terrible today",
    "Absolutely terrible traffic on I-640",
    "Extremely slow traffic near the airport",
    "Slightly better commute than yesterday",
    "Barely moving on Kingston Pike",
    "The merge is hardly safe",
    "GREAT job on the repaving",
    "great JOB on the repaving",
    "The crash on I-40 is HORRIBLE and I hate it",
    "I love the greenway but hate the parking",
    "I hate the greenway but love the parking",
    "Not only is it slow but it is dangerous",
    "Traffic was not terrible but not great either",
    "Thanks for the update!",
    "thanks for nothing",
    "lol the detour is longer than the drive",
    "Good grief, another closure",
    "The city did a good job, but the contractor did a horrible job",
    "Knoxville traffic",
    "",
    "!!!",
    "???",
    "🚗 🚗 🚗 traffic again 😡",
    "Happy to see the new crosswalk 😊",
    "Delays, delays, delays",
    "I don't hate the new roundabout",
    "I didn't love the new roundabout",
    "Nobody is happy about the tolls",
    "Nothing good about this intersection",
    "None of the signals work and it's dangerous",
    "The signals rarely work",
    "The signals seldom fail",
    "Despite the rain, traffic flowed well",
    "It's not that the bus is bad, it's that it never comes",
    "Pretty good commute but super long",
    "very very good",
    "VERY very good",
    "so good",
    "so bad",
    "this good",
    "never so bad",
    "not so bad",
    "not very good",
    "not the worst",
    "the worst",
    "kind of bad",
    "kind of good",
    "sort of good",
    "Kinda Awful",
    "the bus is uber slow",
    "the bus is friggin slow",
    "the bus is FRIGGIN SLOW",
    "the bus is fine.",
    "the bus is fine!",
    "the bus is fine!!",
    "the bus is fine!!!",
    "the bus is terrible.",
    "the bus is terrible!",
    "the bus is terrible!!",
    "the bus is terrible!!!",
    "no no no",
    "no",
    "yes",
    "ok",
    "OK fine",
    "Fine OK",
    "accident accident accident",
    "Accident cleared, all lanes open",
    "Major accident near Papermill, backed up to Cedar Bluff",
    "Update: Cumberland corridor construction continues through summer",
    "Construction at the park going on forever",
    "Knoxville traffic reduce smarttrips",
    "Accident major near backed",
    "KAT bus route service traffic",
]

SUBJECTS = ["The bus", "Traffic on I-40", "The new bike lane", "Parking downtown", "The detour"]
ADJECTIVES = ["good", "bad", "great", "terrible", "safe", "dangerous", "nice", "awful"]
MODIFIERS = ["", "very ", "extremely ", "slightly ", "kind of ", "not ", "not very ",
             "never ", "hardly ", "really ", "VERY ", "totally "]
ENDINGS = [".", "!", "!!!", "?", "??", " :)", " :(", " lol"]


def generated():
    rows = []
    for subj, adj, mod in itertools.product(SUBJECTS, ADJECTIVES, MODIFIERS):
        rows.append((subj, adj, mod))
    # fixed stride through the product keeps the set spread over every factor
    picked = rows[::2]
    out = []
    for k, (subj, adj, mod) in enumerate(picked):
        word = adj.upper() if k % 7 == 0 else adj
        out.append(f"{subj} is {mod}{word}{ENDINGS[k % len(ENDINGS)]}")
    return out


def sentences(n=300):
    seen = dict.fromkeys(HAND)
    for s in generated():
        if len(seen) >= n:
            break
        seen.setdefault(s)
    out = list(seen)[:n]
    if len(out) != n:
        sys.exit(f"only {len(out)} sentences")
    return out


def main():
    from vaderSentiment.vaderSentiment import SentimentIntensityAnalyzer

    analyzer = SentimentIntensityAnalyzer()
    OUT.parent.mkdir(parents=True, exist_ok=True)
    with OUT.open("w", encoding="utf-8", newline="") as fh:
        w = csv.writer(fh, delimiter="\t", lineterminator="\n", quoting=csv.QUOTE_MINIMAL)
        w.writerow(["sentence", "neg", "neu", "pos", "compound"])
        for s in sentences():
            r = analyzer.polarity_scores(s)
            w.writerow([s, r["neg"], r["neu"], r["pos"], r["compound"]])
    print(f"wrote {OUT}")


if __name__ == "__main__":
    main()
