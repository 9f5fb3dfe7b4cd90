#!/usr/bin/env python3
# Copyright 2026 The stormtopics Authors.
#
# Licensed under the Apache License, Version 2.0 (the "License");
# you may not use this file except in compliance with the License.
# You may obtain a copy of the License at
#
#     http://www.apache.org/licenses/LICENSE-2.0
#
# Unless required by applicable law or agreed to in writing, software
# distributed under the License is distributed on an "AS IS" BASIS,
# WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
# See the License for the specific language governing permissions and
# limitations under the License.
"""Regenerates the synthetic snowstorm fixture: tweets.jsonl plus two bundles.

Run from this directory: python3 make_fixture.py
"""

import hashlib
import json
import pathlib
import struct

import numpy as np

N_TWEETS = 200
DIM = 16
SEED = 20260214

THEMES = {
    "power": ["power", "outage", "lines", "electricity", "crews", "restored", "grid", "transformer", "dark"],
    "roads": ["roads", "icy", "plows", "highway", "closed", "crash", "salt", "traffic", "stuck"],
    "schools": ["schools", "closed", "district", "classes", "cancelled", "students", "delay", "campus", "tomorrow"],
    "shelter": ["shelter", "warming", "center", "help", "volunteers", "blankets", "homeless", "donate", "open"],
    "totals": ["inches", "snowfall", "totals", "record", "accumulation", "measured", "drifts", "feet", "forecast"],
}
FILLER = ["the", "is", "and", "so", "we", "our", "in", "at", "now", "still", "very", "this"]
PLACES = ["#boston", "#nyc", "#snowstorm", "#blizzard2026", "#nor_easter", "#stormwatch"]
HANDLES = ["@nws", "@citymayor", "@mass_dot", "@redcross", "@weather_desk"]


def make_text(rng, words):
    n = int(rng.integers(5, 10))
    body = list(rng.choice(words, size=n))
    for _ in range(int(rng.integers(1, 4))):
        body.insert(int(rng.integers(0, len(body) + 1)), str(rng.choice(FILLER)))
    if rng.random() < 0.6:
        body.append(str(rng.choice(PLACES)))
    if rng.random() < 0.3:
        body.insert(0, str(rng.choice(HANDLES)))
    if rng.random() < 0.25:
        body.append("https://t.co/" + "".join(rng.choice(list("abcdefgh123"), size=8)))
    if rng.random() < 0.15:
        body = ["RT"] + body
    text = " ".join(body)
    if rng.random() < 0.4:
        text += str(rng.choice(["!", "!!", "...", " :(", " ❄️"]))
    return text.capitalize() if rng.random() < 0.5 else text


def write_bundle(out, ids, vectors, attention, source_tag):
    out.mkdir(exist_ok=True)
    raw = b"".join(struct.pack("<f", float(v)) for v in vectors.astype(np.float32).ravel())
    manifest = {
        "version": 1,
        "n_tweets": len(ids),
        "dim": int(vectors.shape[1]),
        "tweet_ids": ids,
        "sha256": hashlib.sha256(raw).hexdigest(),
        "source_tag": source_tag,
    }
    (out / "vectors.f32").write_bytes(raw)
    (out / "manifest.json").write_text(json.dumps(manifest, indent=2) + "\n")
    with (out / "attention.jsonl").open("w") as f:
        for tid, (tokens, attn) in zip(ids, attention):
            f.write(json.dumps({"id": tid, "tokens": tokens, "attn": attn}, ensure_ascii=False) + "\n")


def main():
    rng = np.random.default_rng(SEED)
    here = pathlib.Path(__file__).resolve().parent
    names = list(THEMES)
    centers = rng.normal(0.0, 1.0, size=(len(names), DIM))

    ids, texts, themes = [], [], []
    for i in range(N_TWEETS):
        t = i % len(names)
        ids.append(f"t{i:04d}")
        texts.append(make_text(rng, THEMES[names[t]]))
        themes.append(t)

    with (here / "tweets.jsonl").open("w") as f:
        for i, (tid, text) in enumerate(zip(ids, texts)):
            rec = {"id": tid, "text": text, "author": f"user{i % 37:02d}",
                   "created_at": f"2026-02-{14 + i // 100:02d}T{(i * 7) % 24:02d}:{(i * 13) % 60:02d}:00Z"}
            f.write(json.dumps(rec, ensure_ascii=False) + "\n")

    attention = []
    for text, t in zip(texts, themes):
        tokens = text.split()
        raw = rng.gamma(1.0, 1.0, size=len(tokens))
        for j, tok in enumerate(tokens):
            if tok.lower().strip("!.:(") in THEMES[names[t]]:
                raw[j] *= 3.0
        attn = (raw / raw.sum()).round(6).tolist()
        attention.append((tokens, attn))

    fte = centers[themes] + rng.normal(0.0, 0.35, size=(N_TWEETS, DIM))
    bert = centers[themes] * 0.5 + rng.normal(0.0, 0.8, size=(N_TWEETS, DIM))
    write_bundle(here / "bundle_fte", ids, fte, attention, "finetuned")
    write_bundle(here / "bundle_bert", ids, bert, attention, "pretrained")


if __name__ == "__main__":
    main()
