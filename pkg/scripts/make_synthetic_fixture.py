"""Generate the synthetic 500-post corpus and zone file under fixtures/.

The corpus is made up; it only needs to look like local traffic chatter so
every stage has something realistic to chew on. Output is a pure function of
the seed, so rerunning this script reproduces the committed files exactly.

    python3 scripts/make_synthetic_fixture.py [--seed 20220301] [--out fixtures]
"""

from __future__ import annotations

import argparse
import json
import random
from datetime import datetime, timedelta, timezone
from pathlib import Path

from civic_pulse.spatiotemporal import point_in_polygon

N_POSTS = 500  # total records, including the ones cleaning should remove
N_NOISE = 15

# (location_type, name, lon/lat ring). Rings are closed and non-overlapping.
ZONES = [
    ("UrbanCore", "Downtown", [(-83.93, 35.955), (-83.91, 35.955), (-83.91, 35.972), (-83.93, 35.972)]),
    ("Highway", "I-40 corridor west", [(-84.06, 35.925), (-83.93, 35.945), (-83.93, 35.952), (-84.06, 35.932)]),
    ("Highway", "I-40 corridor east", [(-83.91, 35.985), (-83.83, 36.005), (-83.83, 36.012), (-83.91, 35.992)]),
    ("Commercial", "Kingston Pike", [(-84.08, 35.905), (-83.96, 35.920), (-83.96, 35.924), (-84.08, 35.909)]),
    ("MajorRoad", "Broadway", [(-83.935, 35.975), (-83.925, 35.975), (-83.915, 36.02), (-83.925, 36.02)]),
    ("Residential", "Fountain City", [(-83.94, 36.025), (-83.90, 36.025), (-83.90, 36.06), (-83.94, 36.06)]),
    ("Residential", "Bearden", [(-84.02, 35.930), (-83.98, 35.930), (-83.98, 35.945), (-84.02, 35.945)]),
]

PLACES = ["I-40", "I-75", "I-640", "Alcoa Hwy", "Kingston Pike", "Broadway", "Chapman Hwy",
          "Pellissippi", "Henley St bridge", "downtown", "Cumberland Ave", "Middlebrook Pike"]

# themed phrase pools, loosely one per latent topic
THEMES = {
    "congestion": [
        "traffic is backed up for miles on {p}",
        "bumper to bumper on {p} again this morning",
        "sat in a jam on {p} for forty minutes",
        "{p} congestion is brutal, commute took forever",
        "gridlock near {p}, nothing moving",
        "slow traffic on {p} heading into town",
    ],
    "incident": [
        "major accident on {p} causing delays, avoid if possible",
        "crash blocking two lanes on {p}",
        "wreck on {p} near exit 374, emergency crews on scene",
        "accident cleared on {p}, lanes reopened",
        "disabled vehicle on {p} shoulder, use caution",
        "another collision at {p} intersection",
    ],
    "construction": [
        "construction on {p} has lanes closed through friday",
        "road work on {p} merging into one lane",
        "tdot crews repaving {p} overnight",
        "orange barrels everywhere on {p}, construction never ends",
        "bridge repair on {p} detour posted",
        "new lane configuration on {p} after construction",
    ],
    "transit": [
        "kat bus running late on the {p} route",
        "took the bus downtown instead of driving on {p}",
        "smarttrips carpool saved me money on {p}",
        "bike lane on {p} would make commuting safer",
        "new bus shelter near {p}, nice upgrade",
        "park and ride from {p} was easy today",
    ],
    "parking": [
        "no parking anywhere near {p} during the game",
        "parking garage off {p} full again",
        "paid parking downtown by {p} is a rip off",
        "found street parking on {p} surprisingly quick",
        "parking tickets on {p} are out of control",
        "event parking near {p} was well organized",
    ],
}

TAILS = {
    "neg": ["ugh.", "terrible.", "so frustrating!", "this is awful", "worst commute ever",
            "I hate this", "not happy", "seriously?!", "so annoying", "absolutely horrible"],
    "neu": ["", "", "", "fyi", "heads up", "update at 5", "", "as of now", "", "see map"],
    "pos": ["great job crews!", "love it", "nice work", "thanks KPD :)", "very helpful",
            "much better now", "awesome", "good news", "really glad", "happy commute"],
}

HASHTAGS = ["#knoxtraffic", "#knoxville", "#i40", "#commute", "#tdot", ""]


def _point_in(ring: list[tuple[float, float]], rng: random.Random) -> tuple[float, float]:
    # rejection sample inside the ring's bounding box
    lons = [p[0] for p in ring]
    lats = [p[1] for p in ring]
    latlon_ring = [(lat, lon) for lon, lat in ring]
    while True:
        lon = round(rng.uniform(min(lons), max(lons)), 5)
        lat = round(rng.uniform(min(lats), max(lats)), 5)
        if point_in_polygon((lat, lon), latlon_ring):
            return lat, lon


def make_posts(seed: int) -> list[dict]:
    rng = random.Random(seed)
    start = datetime(2022, 3, 1, tzinfo=timezone.utc)
    theme_names = sorted(THEMES)
    posts: list[dict] = []
    for i in range(N_POSTS - N_NOISE):
        platform = "Twitter" if rng.random() < 0.7 else "Reddit"
        theme = rng.choice(theme_names)
        mood = rng.choices(["neg", "neu", "pos"], weights=[4, 4, 2])[0]
        text = rng.choice(THEMES[theme]).format(p=rng.choice(PLACES))
        tail = rng.choice(TAILS[mood])
        tag = rng.choice(HASHTAGS)
        text = " ".join(part for part in (text, tail, tag) if part)
        if rng.random() < 0.1:
            text += f" https://t.co/{rng.randrange(16**8):08x}"
        if rng.random() < 0.05:
            text = text.upper()
        # weekday-heavy, with a bump around the rush windows (Eastern time, UTC-5)
        day = rng.randrange(28)
        hour_local = rng.choice([7, 7, 8, 8, 12, 15, 17, 17, 18, 18, 21, 9, 6, 19, 16, 10, 0, 23])
        minute = rng.randrange(60)
        created = start + timedelta(days=day, hours=hour_local + 5, minutes=minute, seconds=rng.randrange(60))
        rec = {
            "id": str(1_500_000_000_000 + i) if platform == "Twitter" else f"t3_{i:05x}",
            "platform": platform,
            "text": text,
            "created_at": created.strftime("%Y-%m-%dT%H:%M:%SZ"),
        }
        if rng.random() < 0.2:
            _, _, ring = rng.choice(ZONES)
            rec["lat"], rec["lon"] = _point_in(ring, rng)
        elif rng.random() < 0.03:
            # geotagged but outside every zone and outside the bbox
            rec["lat"], rec["lon"] = 36.5, -83.5
        if platform == "Twitter":
            rec["lang"] = "en"
            if rng.random() < 0.04:
                rec["is_retweet"] = True
        elif rng.random() < 0.3:
            rec["parent_id"] = f"t3_{rng.randrange(i + 1):05x}"
        posts.append(rec)

    # a handful of records cleaning should remove
    for j in range(6):
        dup = dict(posts[rng.randrange(len(posts))])
        dup["id"] = dup["id"] + f"-copy{j}"
        dup["text"] = "  " + dup["text"].upper() + " "
        posts.insert(rng.randrange(len(posts)), dup)
    for j in range(4):
        posts.insert(rng.randrange(len(posts)), {
            "id": f"es{j}", "platform": "Twitter", "lang": "es",
            "text": "mucho tráfico en la I-40 hoy", "created_at": "2022-03-02T13:00:00Z",
        })
    for j in range(5):
        posts.insert(rng.randrange(len(posts)), {
            "id": f"off{j}", "platform": "Reddit", "text": "lovely weather for a picnic today",
            "created_at": "2022-03-03T16:00:00Z",
        })
    assert len(posts) == N_POSTS
    return posts


def zones_geojson() -> dict:
    return {
        "type": "FeatureCollection",
        "features": [
            {
                "type": "Feature",
                "properties": {"name": name, "location_type": ltype},
                "geometry": {"type": "Polygon", "coordinates": [[list(p) for p in ring + [ring[0]]]]},
            }
            for ltype, name, ring in ZONES
        ],
    }


def main() -> None:
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--seed", type=int, default=20220301)
    ap.add_argument("--out", type=Path, default=Path(__file__).resolve().parents[1] / "fixtures")
    args = ap.parse_args()
    args.out.mkdir(parents=True, exist_ok=True)
    posts = make_posts(args.seed)
    with open(args.out / "synthetic_posts.jsonl", "w", encoding="utf-8", newline="\n") as fh:
        for rec in posts:
            fh.write(json.dumps(rec, ensure_ascii=False) + "\n")
    with open(args.out / "zones.geojson", "w", encoding="utf-8", newline="\n") as fh:
        fh.write(json.dumps(zones_geojson(), indent=2) + "\n")
    print(f"wrote {len(posts)} posts and {len(ZONES)} zones to {args.out}")


if __name__ == "__main__":
    main()
