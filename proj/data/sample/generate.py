#!/usr/bin/env python3
"""Regenerates the synthetic sample corpus in this directory.

Everything is derived from a fixed seed, so running it again reproduces the
committed files byte for byte. The embeddings are linear in VA plus noise,
which is enough for the VA heads to learn something meaningful.
"""
import json
import math
import os
import random

HERE = os.path.dirname(os.path.abspath(__file__))
RNG = random.Random(20240617)

TRACKS = [f"track{i:02d}" for i in range(1, 21)]
FRAME_MS = 500
TRACK_MS = 45_000
MUSIC_DIM = 16
IMAGE_DIM = 64  # must equal the mock embedder's dim (backends.embed.mock_dim)
N_IMAGES = 90

EMOTIC = ["Affection", "Anger", "Annoyance", "Anticipation", "Aversion", "Confidence", "Disapproval",
          "Disconnection", "Disquietment", "Doubt/Confusion", "Embarrassment", "Engagement", "Esteem",
          "Excitement", "Fatigue", "Fear", "Happiness", "Pain", "Peace", "Pleasure", "Sadness",
          "Sensitivity", "Suffering", "Surprise", "Sympathy", "Yearning"]

# (clip_id, caption, valence, arousal) with VA in the DEAM range [-1, 1].
CAPTIONS = [
    ("track01_000", "a lone pianist in a rainy city at night, slow jazz with brushed drums", -0.4, -0.5),
    ("track02_001", "an upbeat electronic track with pulsing synth for dancers on a neon rooftop", 0.7, 0.8),
    ("track03_002", "gentle acoustic folk guitar, a couple strolling along a quiet river in the morning", 0.5, -0.4),
    ("track04_003", "thunderous orchestral climax with pounding timpani, a horse racing across a stormy field",
     -0.3, 0.9),
    ("track05_004", "a sad cello melody for a child waiting by the window of an empty room", -0.7, -0.8),
    ("track06_005", "bright pop anthem with handclaps, a crowd dancing at a summer festival", 0.9, 0.6),
    ("track07_006", "dreamy ambient pads, a bird floating through clouds above the sea at sunset", 0.3, -0.6),
    ("track08_007", "aggressive distorted rock guitar, a drummer exploding on a smoky stage", -0.6, 0.8),
    ("track09_008", "warm bossa nova saxophone in a cozy cafe, a woman sitting by the window", 0.6, -0.7),
    ("track10_008", "driving techno beat, a traveler running through a city subway at midnight", 0.2, 0.5),
]


def curve(base, amp, phase, t):
    return max(-1.0, min(1.0, base + amp * math.sin(t / 7000.0 + phase)))


def fmt(x):
    return repr(round(x, 6))


def write_annotations():
    rows = ["track_id,time_ms,valence,arousal"]
    means = {}
    for track in TRACKS:
        bv, ba = RNG.uniform(-0.7, 0.7), RNG.uniform(-0.7, 0.7)
        av, aa = RNG.uniform(0.05, 0.3), RNG.uniform(0.05, 0.3)
        pv, pa = RNG.uniform(0, 6.28), RNG.uniform(0, 6.28)
        for t in range(0, TRACK_MS, FRAME_MS):
            v = curve(bv, av, pv, t) + RNG.gauss(0, 0.02)
            a = curve(ba, aa, pa, t) + RNG.gauss(0, 0.02)
            v, a = max(-1.0, min(1.0, v)), max(-1.0, min(1.0, a))
            rows.append(f"{track},{t},{fmt(v)},{fmt(a)}")
            means.setdefault(f"{track}_{t // 5000:03d}", []).append((float(fmt(v)), float(fmt(a))))
    with open(os.path.join(HERE, "annotations.csv"), "w", newline="\n") as f:
        f.write("\n".join(rows) + "\n")
    return {k: (sum(p[0] for p in v) / len(v), sum(p[1] for p in v) / len(v)) for k, v in means.items()}


def embedding(v01, a01, dim, noise):
    vec = [v01, a01, v01 * a01, v01 - a01]
    vec += [RNG.gauss(0, 1) * 0.3 + (v01 if i % 3 == 0 else a01 if i % 3 == 1 else 0.0) for i in range(dim - 4)]
    return [round(x + RNG.gauss(0, noise), 6) for x in vec]


def write_embeddings(name, modality, rows, dim):
    with open(os.path.join(HERE, name), "w", newline="\n") as f:
        f.write("# synthetic sample embeddings, linear in VA plus gaussian noise\n")
        f.write(json.dumps({"dim": dim, "modality": modality, "count": len(rows)}) + "\n")
        for rid, vec in rows:
            f.write(json.dumps({"id": rid, "vec": vec}) + "\n")


def main():
    means = write_annotations()
    music = []
    for clip in sorted(means):
        v, a = means[clip]
        music.append((clip, embedding((v + 1) / 2, (a + 1) / 2, MUSIC_DIM, 0.05)))
    write_embeddings("music_embeddings.jsonl", "audio", music, MUSIC_DIM)

    with open(os.path.join(HERE, "captions.jsonl"), "w", newline="\n") as f:
        for clip, caption, v, a in CAPTIONS:
            f.write(json.dumps({"clip_id": clip, "caption": caption, "valence": v, "arousal": a}) + "\n")

    images = []
    with open(os.path.join(HERE, "images.jsonl"), "w", newline="\n") as f:
        for i in range(1, N_IMAGES + 1):
            iid = f"img_{i:04d}"
            v, a, d = (round(RNG.uniform(1, 10), 2) for _ in range(3))
            cats = sorted(RNG.sample(EMOTIC, RNG.randint(1, 3)))
            f.write(json.dumps({"image_id": iid, "categories": cats, "valence": v, "arousal": a, "dominance": d}) + "\n")
            images.append((iid, embedding((v - 1) / 9, (a - 1) / 9, IMAGE_DIM, 0.05)))
    write_embeddings("image_embeddings.jsonl", "image", images, IMAGE_DIM)


if __name__ == "__main__":
    main()
