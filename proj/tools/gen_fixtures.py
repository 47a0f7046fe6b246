#!/usr/bin/env python3
"""Regenerates the fixture files under data/.

Deterministic: running it twice produces identical bytes. The script verifies
that every designed word's canonical (greedy longest-match) encoding comes out
as intended before writing anything.
"""

import json
import random
import sys
from pathlib import Path

ROOT = Path(__file__).resolve().parent.parent
DATA = ROOT / "data"

# ---------------------------------------------------------------- byte map


def bytes_to_unicode():
    bs = list(range(ord("!"), ord("~") + 1)) + list(range(0xA1, 0xAD)) + list(range(0xAE, 0x100))
    cs = bs[:]
    n = 0
    for b in range(256):
        if b not in bs:
            bs.append(b)
            cs.append(256 + n)
            n += 1
    return dict(zip(bs, (chr(c) for c in cs)))


B2U = bytes_to_unicode()


def printable(token: str) -> str:
    return "".join(B2U[b] for b in token.encode("utf-8"))


# ---------------------------------------------------------------- word pools

# Disjoint consonant alphabets per word family keep the fixture tokens from
# colliding inside each other's words (none contain 's').
CONS_E1 = "bcdfg"
CONS_TRANS = "jklmn"
CONS_CAP = "pqrtv"
CONS_MISC = "wzbd"
VOWELS = "aeiou"

AFFIXES = ["re", "un", "dis", "pre", "ing", "ed", "er", "ly", "tion"]

STOP_FILLERS = [
    "the", "of", "and", "in", "was", "it", "for", "on", "with", "that",
    "this", "is", "were", "at", "by", "from", "as", "not", "but", "had",
    "has", "have", "been", "are", "an", "or", "his", "her", "they", "we",
    "there", "then", "which", "their", "its", "some", "more", "most",
    "other", "such", "into", "only", "own", "same", "so", "than", "too",
]
SENTENCE_STARTS = ["The", "It", "There", "This", "Some", "When", "Then", "But", "While"]


def make_pseudo_words(rng, count, length, used, cons, capitalize=False, upper=False):
    words = []
    while len(words) < count:
        n_syll = (length + 1) // 2
        w = "".join(rng.choice(cons) + rng.choice(VOWELS) for _ in range(n_syll))
        w = w[:length]
        if upper:
            w = w.upper()
        elif capitalize:
            w = w[0].upper() + w[1:]
        if w in used or len(w) != length:
            continue
        if any(w.startswith(a) or w.endswith(a) for a in AFFIXES):
            continue
        used.add(w)
        words.append(w)
    return words


def main():
    rng = random.Random(20260826)
    used = set()
    used.update(STOP_FILLERS)
    used.update(AFFIXES)

    # E1-capable words: atomic with and without leading space, one split.
    w_e1 = make_pseudo_words(rng, 36, 6, used, CONS_E1)
    # Transition words: canonical 3 fragments, with 2- and 4-fragment
    # alternates. No word's back half may equal another's front half, or the
    # greedy encoder would bridge across the designed fragment boundary.
    w_trans = []
    prefixes, suffixes = set(), set()
    while len(w_trans) < 36:
        cand = make_pseudo_words(rng, 1, 8, used, CONS_TRANS)[0]
        front, back = cand[0:4], cand[4:8]
        if front == back or back in prefixes or front in suffixes:
            continue
        prefixes.add(front)
        suffixes.add(back)
        w_trans.append(cand)
    # capitalized words for proper-noun resegmentation
    w_cap = make_pseudo_words(rng, 12, 7, used, CONS_CAP, capitalize=True)
    # affix-prefixed words for morphological surfacing
    w_affix = []
    stems = make_pseudo_words(rng, 12, 5, used, CONS_MISC)
    for i, stem in enumerate(stems[:10]):
        w_affix.append(["re", "un", "dis", "pre"][i % 4] + stem)
    # acronyms
    w_acro = []
    while len(w_acro) < 8:
        w = "".join(rng.choice("BCDFGHJKLMNPQRTVWZ") for _ in range(rng.choice([3, 4])))
        if w in used:
            continue
        used.add(w)
        w_acro.append(w)
    # plural-tail words
    w_plural = []
    bases = make_pseudo_words(rng, 10, 6, used, CONS_MISC)
    for b in bases:
        w_plural.append(b + "s")

    paper_words = [
        "February", "Saturday", "Guy", "However", "unbelievable", "Jubilee",
        "Dormer", "repaid", "HIV", "rights", "smooth", "Clements",
    ]

    # ------------------------------------------------------------ vocabulary

    tokens = [chr(b).encode("latin-1").decode("latin-1") for b in range(256)]
    tokens = [bytes([b]).decode("latin-1") for b in range(256)]
    seen = set(tokens)

    def add(tok):
        if tok not in seen:
            seen.add(tok)
            tokens.append(tok)

    # paper example words and their pieces
    for w in ["February", "Saturday", "Guy", "However", "unbelievable",
              "repaid", "HIV", "rights", "smooth"]:
        add(" " + w)
        add(w)
    add("Febr"); add("uary")
    add("Sat"); add("urday")
    add("How"); add("ever")
    add("bel"); add("ievable")
    add(" Jub"); add("Jub"); add("ilee"); add("ub")
    add(" Dorm"); add("Dorm"); add("orm")
    add("paid")
    add("HI"); add("IV")
    add("right")
    add("mooth")
    add(" Clement"); add("Clement"); add("lements")
    for a in AFFIXES:
        add(a)

    for w in w_e1:
        add(" " + w); add(w); add(w[0:3]); add(w[3:6])
    for w in w_trans:
        add(" " + w[0:4]); add(w[0:4]); add(w[0:2]); add(w[2:4])
        add(w[4:6]); add(w[6:8]); add(w[0:6])
    for w in w_cap:
        add(" " + w); add(w[1:4]); add(w[4:7])
    for w in w_affix:
        add(" " + w)
        add(w[2:] if w[:2] in ("re", "un") else w[3:])  # stem
    for w in w_acro:
        add(" " + w)
        add(w[0:2])
    for w in w_plural:
        add(" " + w); add(w[:-1])
    for f in STOP_FILLERS:
        add(" " + f)

    # ------------------------------------------------------------ verification

    by_first = {}
    for i, t in enumerate(tokens):
        by_first.setdefault(t[0], []).append(t)

    def greedy(text):
        out = []
        pos = 0
        while pos < len(text):
            best = None
            for t in by_first.get(text[pos], []):
                if text.startswith(t, pos) and (best is None or len(t) > len(best)):
                    best = t
            assert best is not None
            out.append(best)
            pos += len(best)
        return out

    failures = []
    for w in w_e1 + w_cap + w_affix + w_acro + w_plural:
        got = greedy(" " + w + " ")
        if got != [" " + w, " "]:
            failures.append((w, got))
    for w in w_trans:
        got = greedy(" " + w + " ")
        if got != [" " + w[0:4], w[4:6], w[6:8], " "]:
            failures.append((w, got))
    for w, canon in [("February", [" February"]), ("Jubilee", [" Jub", "ilee"]),
                     ("Dormer", [" Dorm", "er"]), ("Clements", [" Clement", "s"]),
                     ("unbelievable", [" unbelievable"]), ("HIV", [" HIV"]),
                     ("rights", [" rights"]), ("smooth", [" smooth"])]:
        got = greedy(" " + w + " ")
        if got != canon + [" "]:
            failures.append((w, got))
    if failures:
        for w, got in failures:
            print(f"canonical mismatch for {w!r}: {got}", file=sys.stderr)
        sys.exit(1)

    DATA.mkdir(exist_ok=True)
    (DATA / "presets").mkdir(exist_ok=True)

    voc = {
        "mode": "byte_level",
        "normalize_whitespace": True,
        "tokens": [printable(t) for t in tokens],
    }
    (DATA / "toyvoc.json").write_text(json.dumps(voc, indent=1) + "\n")

    # ------------------------------------------------------------ lexicon

    lexicon = [" " + w for w in paper_words]
    lexicon += [" " + w for w in w_e1[:12]]
    lexicon += [" " + w for w in w_trans[:8]]
    lexicon += [" " + w for w in w_cap[:4]]
    lexicon += [" " + w for w in w_affix[:4]]
    lexicon += [" " + w for w in w_acro[:3]]
    lexicon += [" " + w for w in w_plural[:3]]
    (DATA / "lexicon.txt").write_text("".join(w + "\n" for w in lexicon))

    # ------------------------------------------------------------ corpora

    def make_corpus(name, pool, n_docs, family_per_sentence=3, sentences=12):
        crng = random.Random(hash(name) & 0xFFFFFFFF)
        lines = [json.dumps({"schema": "corpus", "version": 1})]
        for d in range(n_docs):
            doc_words = crng.sample(pool, min(len(pool), family_per_sentence * sentences))
            wi = 0
            parts = []
            for s in range(sentences):
                sent = [crng.choice(SENTENCE_STARTS)]
                slots = []
                n_fill = 6
                layout = ["f"] * n_fill + ["t"] * family_per_sentence
                crng.shuffle(layout)
                for kind in layout:
                    if kind == "f" or wi >= len(doc_words):
                        slots.append(crng.choice(STOP_FILLERS))
                    else:
                        slots.append(doc_words[wi])
                        wi += 1
                sent.extend(slots)
                text = " ".join(sent) + "."
                parts.append(text)
            sep_text = ""
            for i, p in enumerate(parts):
                if i == 0:
                    sep_text = p
                elif i % 4 == 0:
                    sep_text += "\n" + p
                else:
                    sep_text += " " + p
            lines.append(json.dumps({"doc_id": f"{name}-{d:04d}", "text": sep_text}))
        (DATA / f"{name}.jsonl").write_text("\n".join(lines) + "\n")

    mixed_pool = paper_words + w_e1 + w_cap + w_affix + w_acro + w_plural
    make_corpus("corpus_mixed", mixed_pool, 640)
    make_corpus("corpus_words", w_e1, 640)
    make_corpus("corpus_transitions", w_trans, 640)

    # ------------------------------------------------------------ synonyms

    syn_used = set(used)
    srng = random.Random(777)
    synonyms = {}
    for w in mixed_pool + w_trans:
        alts = []
        while len(alts) < 2:
            cand = "".join(srng.choice("wz") + srng.choice(VOWELS) for _ in range(3))
            if cand in syn_used:
                continue
            syn_used.add(cand)
            alts.append(cand)
        synonyms[w] = alts
    (DATA / "synonyms.json").write_text(json.dumps(synonyms, indent=1) + "\n")

    # ------------------------------------------------------------ presets

    uniform = {f"E{i}": 0.125 for i in range(1, 9)}
    presets = {
        "oracle_uniform": {
            "p_unchanged": 0.2, "p_replaced": 0.3, "p_phantom": 0.5,
            "strategy": "by_error_type", "phantom_profile": uniform,
        },
        "masking_run": {
            "p_unchanged": 0.3, "p_replaced": 0.4, "p_phantom": 0.3,
            "strategy": "by_error_type", "phantom_profile": uniform,
        },
        "finding1_transitions": {
            "p_unchanged": 0.1, "p_replaced": 0.1, "p_phantom": 0.8,
            "strategy": "by_transition",
            "split_merge_profile": {"same": 0.78, "split": 0.197, "merge": 0.023},
        },
        "finding2_cell11": {
            "p_unchanged": 0.1, "p_replaced": 0.2, "p_phantom": 0.7,
            "strategy": "by_error_type",
            "phantom_profile": {"E1": 0.722, "E4": 0.278},
        },
        # Approximate calibration inputs read off the outcome-distribution
        # figure; not ground truth.
        "fig2_gemma3_4b": {
            "p_unchanged": 0.2, "p_replaced": 0.6, "p_phantom": 0.2,
            "strategy": "by_error_type", "phantom_profile": uniform,
        },
        "fig2_llama32_3b": {
            "p_unchanged": 0.3, "p_replaced": 0.55, "p_phantom": 0.15,
            "strategy": "by_error_type", "phantom_profile": uniform,
        },
        "fig2_qwen3_4b": {
            "p_unchanged": 0.25, "p_replaced": 0.65, "p_phantom": 0.1,
            "strategy": "by_error_type", "phantom_profile": uniform,
        },
    }
    for name, preset in presets.items():
        (DATA / "presets" / f"{name}.json").write_text(json.dumps(preset, indent=1) + "\n")

    # ------------------------------------------------------------ misc files

    (DATA / "affixes.txt").write_text("".join(a + "\n" for a in AFFIXES))
    (DATA / "stopwords.txt").write_text("".join(w + "\n" for w in sorted({
        *STOP_FILLERS, *(s.lower() for s in SENTENCE_STARTS),
    })) )
    (DATA / "prompt_template.txt").write_text(
        "Replace every word enclosed in square brackets with a different word "
        "of similar meaning. Keep all other text exactly as it is, including "
        "spacing and punctuation. Output the full document with the "
        "replacements applied and the brackets removed.\n\n{doc}\n"
    )

    print(f"vocabulary size: {len(tokens)}")
    print(f"lexicon words: {len(lexicon)}")


if __name__ == "__main__":
    main()
