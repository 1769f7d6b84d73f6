#!/usr/bin/env python3
# Copyright 2026 The lingeval Authors
# SPDX-License-Identifier: Apache-2.0
"""Writes the corpus fixtures and the golden prompt files.

The prompt layout is re-implemented here from the templates directory so the
C++ renderer is compared against a second, independent implementation.
"""
import json
import pathlib

ROOT = pathlib.Path(__file__).resolve().parents[3]
FIX = ROOT / "tests" / "fixtures"
TPL = ROOT / "templates"

PAIRS = [
    ("We see you.", "tike'a tātou koe"),
    ("I hear you.", "ŋaro'a au koe"),
    ("I see you.", "tike'a au koe"),
    ("We hear you.", "ŋaro'a tātou koe"),
    ("The person hits me.", "pu'a taŋata au"),
    ("The dog drinks the water", "unu paiheŋas bai"),
    ("The fish drinks the blood.", "unu ika toto"),
    ("We bite the bone.", "ŋau tātou ivi"),
    ("We hit the bird.", "pu'a tātou manu"),
]
TEST = ("The bird bites you.", "ŋau manu koe")


def record(rid, exemplars, test, gold):
    return {
        "id": rid,
        "language": "Rapa Nui",
        "direction": "from_english",
        "exemplars": [{"source": s, "target": t} for s, t in exemplars],
        "test_phrase": test,
        "gold_answers": [gold],
        "dataset": "modeling",
        "problem_type": "rosetta",
        "difficulty": "unspecified",
    }


def dump(rec):
    return json.dumps(rec, ensure_ascii=False, separators=(",", ":"))


def write_corpora():
    main = record("rapa_nui_1", PAIRS, TEST[0], TEST[1])
    (FIX / "rapa_nui.jsonl").write_text(dump(main) + "\n", encoding="utf-8")
    everything = PAIRS + [TEST]
    lines = []
    for i, (src, tgt) in enumerate(everything):
        rest = [p for j, p in enumerate(everything) if j != i]
        lines.append(dump(record(f"rapa_nui_loo_{i:02d}", rest, src, tgt)))
    (FIX / "rapa_nui_loo.jsonl").write_text("\n".join(lines) + "\n", encoding="utf-8")
    return main


def tpl(name):
    return (TPL / f"{name}.txt").read_text(encoding="utf-8")


def exemplars(rec):
    a, b = "English", rec["language"]
    parts = [f"Example Translations from {a} to {b}"]
    for ex in rec["exemplars"]:
        parts.append(f"{a}: {ex['source']}\n{b}: {ex['target']}")
    return "\n\n".join(parts)


def test(rec):
    return f"Translate Test Phrase\n\nEnglish: {rec['test_phrase']}\n{rec['language']}:"


def fill(text, name, family=""):
    return text.replace("{name}", name).replace("{lang_family}", family)


def write_prompts(rec):
    stage1 = (FIX / "stage1_sample.txt").read_text(encoding="utf-8")
    name = rec["language"]
    ex, ts = exemplars(rec), test(rec)
    prompts = {
        "zero_shot": ("system_zero_shot", "\n\n".join([tpl("instruction_zero_shot"), ts])),
        "few_shot": ("system_exemplar", "\n\n".join([tpl("instruction_few_shot"), ex, ts])),
        "few_shot_zero_shot_style": ("system_zero_shot", "\n\n".join([tpl("instruction_zero_shot"), ex, ts])),
        "few_shot_cot": ("system_exemplar", "\n\n".join([tpl("instruction_few_shot_cot"), ex, ts])),
        "few_shot_cot_rationale": ("system_exemplar",
                                   "\n\n".join([tpl("instruction_few_shot_cot_rationale"), ex, ts])),
        "analogical_1stage": ("system_exemplar", "\n\n".join([tpl("instruction_analogical_1stage"), ex, ts])),
        "stage1_inferred": ("system_exemplar",
                            "\n\n".join([fill(tpl("instruction_stage1_inferred"), name), ex, ts])),
        "stage1_oracle": ("system_exemplar",
                          "\n\n".join([fill(tpl("instruction_stage1_oracle"), name,
                                            "Austronesian Malayo-Polynesian"), ex, ts])),
        "stage2": ("system_exemplar",
                   "\n\n".join([fill(tpl("instruction_stage2_deduce"), name), ex,
                                "Generated Puzzles\n\n" + stage1, ts])),
    }
    out = FIX / "prompts"
    out.mkdir(exist_ok=True)
    for key, (system, user) in prompts.items():
        (out / f"{key}.system.txt").write_text(tpl(system), encoding="utf-8")
        (out / f"{key}.user.txt").write_text(user, encoding="utf-8")


# Difficulty x problem-type cells that carry results; 100 instances each so any whole
# percent is reachable. Test phrases encode the cell and index for scripted backends.
LINGOLY_CELLS = [
    ("breakthrough", ["text", "pattern", "rosetta"]),
    ("foundation", ["computational", "match_up", "pattern", "rosetta"]),
    ("intermediate", ["pattern", "rosetta"]),
    ("advanced", ["monolingual", "match_up", "pattern", "rosetta"]),
    ("round2", ["monolingual", "match_up", "pattern", "rosetta"]),
]
PER_CELL = 100


def write_lingoly_shaped():
    lines = []
    for difficulty, types in LINGOLY_CELLS:
        for ptype in types:
            for k in range(PER_CELL):
                lines.append(dump({
                    "id": f"lg_{difficulty}_{ptype}_{k:03d}",
                    "language": f"Lang {difficulty} {ptype}",
                    "direction": "to_english",
                    "exemplars": [{"source": "ka", "target": "one"}],
                    "test_phrase": f"{difficulty}/{ptype}/{k:03d}",
                    "gold_answers": ["ok"],
                    "dataset": "lingoly",
                    "problem_type": ptype,
                    "difficulty": difficulty,
                }))
    (FIX / "lingoly_shaped.jsonl").write_text("\n".join(lines) + "\n", encoding="utf-8")


# Toy puzzles named after curated languages; the words are placeholders.
MODELING_SAMPLE = [
    ("Bangime", "to_english", [("dɛ̀mɛ̀", "house"), ("kɔ̀ⁿ", "water")], "dɛ̀mɛ̀ kɔ̀ⁿ", "house water"),
    ("Bangime", "from_english", [("house", "dɛ̀mɛ̀"), ("water", "kɔ̀ⁿ")], "water house", "kɔ̀ⁿ dɛ̀mɛ̀"),
    ("Seri", "to_english", [("ziix", "thing"), ("hant", "land")], "hant ziix", "land thing"),
    ("Mapudungan 4", "to_english", [("ruka", "house"), ("ko", "water")], "ko ruka", "water house"),
    ("Kalam", "from_english", [("see", "ñb"), ("go", "ap")], "go see", "ap ñb"),
    ("Rapa Nui", "from_english", [("We see you.", "tike'a tātou koe")], "I see you.", "tike'a au koe"),
]


def write_modeling_sample():
    lines = []
    for i, (lang, direction, ex, test, gold) in enumerate(MODELING_SAMPLE):
        lines.append(dump({
            "id": f"ml_{i:02d}",
            "language": lang,
            "direction": direction,
            "exemplars": [{"source": s, "target": t} for s, t in ex],
            "test_phrase": test,
            "gold_answers": [gold],
            "dataset": "modeling",
            "problem_type": "rosetta",
            "difficulty": "unspecified",
        }))
    (FIX / "modeling_sample.jsonl").write_text("\n".join(lines) + "\n", encoding="utf-8")


if __name__ == "__main__":
    write_prompts(write_corpora())
    write_lingoly_shaped()
    write_modeling_sample()
