#!/usr/bin/env python3
"""Count fields and index postings of a corpus JSONL file by direct text scan.

Usage: corpus_oracle.py CORPUS.jsonl > counts.json

The output is frozen under tests/data and compared against what the C++
loader and reference index report.
"""
import collections
import json
import sys
import unicodedata


def is_cjk(ch):
    cp = ord(ch)
    return (0x3400 <= cp <= 0x4DBF or 0x4E00 <= cp <= 0x9FFF or 0xF900 <= cp <= 0xFAFF
            or 0x20000 <= cp <= 0x3FFFF or 0x3040 <= cp <= 0x30FF or 0xAC00 <= cp <= 0xD7AF
            or 0x1100 <= cp <= 0x11FF or 0x3130 <= cp <= 0x318F)


def tokens(text):
    word = []
    for ch in unicodedata.normalize("NFC", text):
        if is_cjk(ch):
            if word:
                yield "".join(word)
                word = []
            yield ch
        elif ch.isalnum():
            word.append(ch.lower())
        elif word:
            yield "".join(word)
            word = []
    if word:
        yield "".join(word)


def main(path):
    counts = {
        "documents": 0,
        "citations": 0,
        "jurisdiction": collections.Counter(),
        "language": collections.Counter(),
        "category": collections.Counter(),
        "source": collections.Counter(),
        "with_family": 0,
        "ipc_codes": 0,
    }
    vocabulary = set()
    postings = 0
    with open(path, encoding="utf-8") as f:
        for line in f:
            if not line.strip():
                continue
            rec = json.loads(line)
            if rec["kind"] == "citation":
                counts["citations"] += 1
                counts["category"][rec["category"]] += 1
                counts["source"][rec["source"]] += 1
                continue
            counts["documents"] += 1
            counts["jurisdiction"][rec["jurisdiction"]] += 1
            counts["language"][rec["language"]] += 1
            counts["ipc_codes"] += len(rec["ipc_codes"])
            if rec.get("family_id"):
                counts["with_family"] += 1
            text = "\n".join(rec[k] for k in ("title", "abstract", "claims", "description"))
            terms = set(tokens(text))
            vocabulary |= terms
            postings += len(terms)
    counts["total_postings"] = postings
    counts["term_count"] = len(vocabulary)
    json.dump(counts, sys.stdout, indent=2, sort_keys=True, ensure_ascii=False)
    sys.stdout.write("\n")


if __name__ == "__main__":
    main(sys.argv[1])
