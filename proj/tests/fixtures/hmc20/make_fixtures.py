#!/usr/bin/env python3
# Copyright 2026 The MemeShield Authors.
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
"""Writes the synthetic 20-meme replay fixture set.

Outputs dev_seen.jsonl, img/ and responses.json next to this file. The
store/ directory is then built with `memeshield fixtures import` and the
golden reports with `memeshield detect --backend replay`; audit_golden.py
checks those reports against the vote plan below.

Captions are neutral placeholders. Labels and model replies are authored by
hand to exercise the parser and the vote aggregation, not to model real
memes.
"""

import json
import pathlib

from PIL import Image

HERE = pathlib.Path(__file__).resolve().parent

# (id, label, image file, (hateful, non-hateful, abstain) votes without OCR,
#  the same with OCR). Vote counts always sum to 5.
MEMES = [
    ("40153", 1, "img/40153.png", (5, 0, 0), (5, 0, 0)),
    ("52037", 1, "img/52037.png", (4, 1, 0), (4, 1, 0)),
    ("61248", 1, "img/61248.jpg", (3, 2, 0), (4, 1, 0)),
    ("07594", 1, "img/07594.png", (2, 3, 0), (3, 2, 0)),
    ("18265", 1, "img/18265.png", (3, 1, 1), (3, 1, 1)),
    ("29376", 1, "img/29376.jpg", (1, 4, 0), (2, 3, 0)),
    ("30487", 1, "img/30487.png", (0, 5, 0), (1, 4, 0)),
    ("41598", 1, "img/41598.png", (2, 2, 1), (3, 2, 0)),
    ("56609", 1, "img/56609.png", (0, 0, 5), (2, 2, 1)),
    ("67710", 1, "img/67710.png", (4, 0, 1), (5, 0, 0)),
    ("08821", 0, "img/08821.png", (0, 5, 0), (0, 5, 0)),
    ("19932", 0, "img/19932.jpg", (1, 4, 0), (0, 5, 0)),
    ("21043", 0, "img/21043.png", (2, 3, 0), (1, 4, 0)),
    ("32154", 0, "img/32154.png", (3, 2, 0), (2, 3, 0)),
    ("43265", 0, "img/43265.png", (0, 4, 1), (0, 4, 1)),
    ("54376", 0, "img/54376.png", (1, 3, 1), (1, 3, 1)),
    ("65487", 0, "img/65487.jpg", (4, 1, 0), (3, 2, 0)),
    ("76598", 0, "img/76598.png", (0, 5, 0), (0, 5, 0)),
    ("83610", 0, "img/83610.png", (2, 1, 2), (1, 2, 2)),  # JPEG bytes behind a .png name
    ("94721", 0, "img/94721.png", (1, 1, 3), (0, 0, 5)),
]

HATEFUL = [
    "The image shows a group of people at a market. The caption singles them out.\n"
    "Taken together the meme attacks the group.\n\nClassification: Hateful",
    "**Visual description:** two figures on a street.\n**Embedded text:** a short caption.\n\n"
    "**Classification:** Hateful",
    "Taken together, the image and the caption are hateful toward the people shown.",
    "The combined message constitutes hate speech against a religious group.",
    "Some readers may call it a joke, and it could be seen as not hateful.\n"
    "Classification: Hateful.",
]

NON_HATEFUL = [
    "The image shows a dog on a couch and the caption is a pun about naps.\n\n"
    "Classification: Not Hateful",
    "Final classification: Non-hateful",
    "The meme is not hateful; it is a light joke about the weather.",
    "The caption is crude, but this does not constitute hate speech.",
    "At first glance it looks hateful, but in context it is not hateful.\n"
    "> Classification: `Not Hateful`",
]

ABSTAIN = [
    "I'm sorry, but I can't help with evaluating this image.",
    "The image is too blurry for me to read the text.",
    "Whether this is hateful depends on context I do not have.",
]

# Correction fixtures: meme id -> list of (reply, verification votes or None).
# Verification votes apply to the rewrite extracted from the reply.
CORRECTIONS = {
    "40153": [
        ("Here is a kinder caption for the same picture.\n"
         "New text: Neighbors from every background share the market",
         (0, 5, 0)),
    ],
    "52037": [
        ("New text: \"Look who moved in next door\"", (4, 1, 0)),
        ("A possible rewrite:\nNew text:\nThey are still here", (3, 2, 0)),
    ],
    "61248": [
        ("I can't produce a new caption for this one.", None),
        ("Try “Everyone is welcome at our table” as the caption.", (0, 4, 1)),
    ],
}

REWRITES = {
    ("40153", 0): "Neighbors from every background share the market",
    ("52037", 0): "Look who moved in next door",
    ("52037", 1): "They are still here",
    ("61248", 1): "Everyone is welcome at our table",
}


def replies(plan, salt):
    """Five replies realising a (hateful, non-hateful, abstain) plan."""
    h, n, a = plan
    kinds = ["H"] * h + ["N"] * n + ["A"] * a
    # Rotate so the position of each kind varies between memes.
    shift = salt % 5
    kinds = kinds[shift:] + kinds[:shift]
    out = []
    for trial, kind in enumerate(kinds):
        pool = {"H": HATEFUL, "N": NON_HATEFUL, "A": ABSTAIN}[kind]
        out.append(pool[(salt + trial) % len(pool)])
    return out


def write_image(path, index, jpeg):
    color = ((index * 53) % 256, (index * 97) % 256, (index * 31) % 256)
    img = Image.new("RGB", (32, 32), color)
    for x in range(32):
        img.putpixel((x, index % 32), (255, 255, 255))
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "wb") as f:
        img.save(f, format="JPEG" if jpeg else "PNG", quality=90)


def main():
    lines = []
    entries = []
    for index, (meme_id, label, img, plain, ocr) in enumerate(MEMES):
        text = f"placeholder caption {meme_id}"
        lines.append(json.dumps({"id": meme_id, "img": img, "label": label, "text": text}))
        write_image(HERE / img, index, img.endswith(".jpg") or meme_id == "83610")
        for use_ocr, plan in ((False, plain), (True, ocr)):
            for trial, reply in enumerate(replies(plan, index + (7 if use_ocr else 0))):
                entries.append({"meme_id": meme_id, "kind": "detect", "tier": "complete", "ocr": use_ocr,
                                "trial": trial, "response": reply})
    for meme_id, attempts in CORRECTIONS.items():
        for attempt, (reply, votes) in enumerate(attempts):
            entries.append({"meme_id": meme_id, "kind": "correct", "trial": attempt, "response": reply})
            if votes is None:
                continue
            rewrite = REWRITES[(meme_id, attempt)]
            for trial, verdict in enumerate(replies(votes, attempt + 3)):
                entries.append({"meme_id": meme_id, "kind": "detect", "tier": "complete", "ocr": rewrite,
                                "trial": trial, "response": verdict})
    (HERE / "dev_seen.jsonl").write_text("\n".join(lines) + "\n")
    (HERE / "responses.json").write_text(json.dumps({"entries": entries}, indent=1, ensure_ascii=False) + "\n")


if __name__ == "__main__":
    main()
