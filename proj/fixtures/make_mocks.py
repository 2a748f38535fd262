#!/usr/bin/env python3
"""Write the scripted-policy and QA fixtures next to this file.

mock.jsonl holds both golden episodes keyed by (question, step); the
per-case files hold one episode each. Node ids refer to the generated corpus.
"""

import json
import pathlib

HERE = pathlib.Path(__file__).resolve().parent

PRINCES_Q = "Who was the father of the Princes in the Tower?"
SKIN_YARD_Q = "Were the bands Skin Yard and Ostava from the U.S.?"


def turn(think, action, conclusion=None):
    out = f"<think>\n{think}\n</think>\n"
    if conclusion is not None:
        out += f"<conclusion>\n{conclusion}\n</conclusion>\n"
    return out + f"```\n{action}\n```"


PRINCES = [
    turn("The landing page has a search box [331]. Search for the article directly.",
         "type [331] [Princes in the Tower] [1]"),
    turn("The first result [1459] is the article itself; open it.",
         "click [1459] [Princes in the Tower]",
         "The search results list a \"Princes in the Tower\" article that should name their parents."),
    turn("The article says the brothers were the only sons of King Edward IV and Elizabeth Woodville.",
         "stop [King Edward IV]",
         "The father of the Princes in the Tower was King Edward IV."),
]

SKIN_YARD = [
    turn("Check each band separately, starting with Skin Yard via the search box [331].",
         "type [331] [Skin Yard] [1]"),
    turn("The Skin Yard snippet gives its origin as Seattle, Washington. Search Ostava next using "
         "the results page search box [1432].",
         "type [1432] [Ostava] [1]",
         "Skin Yard was from Seattle, Washington, U.S."),
    turn("The Ostava snippet says it is an alternative rock band from Bulgaria, so only Skin Yard "
         "is American.",
         "stop [Skin Yard was from the U.S. (Seattle, Washington). Ostava was from Bulgaria (not the U.S.).]",
         "Skin Yard was from the U.S. (Seattle, Washington). Ostava was from Bulgaria (not the U.S.)."),
]


def script_lines(question, outputs):
    return [{"question": question, "step": i, "output": o} for i, o in enumerate(outputs)]


def write_jsonl(path, rows):
    with open(path, "w", encoding="utf-8") as f:
        for row in rows:
            f.write(json.dumps(row, ensure_ascii=False) + "\n")


def main():
    princes = script_lines(PRINCES_Q, PRINCES)
    skin_yard = script_lines(SKIN_YARD_Q, SKIN_YARD)
    write_jsonl(HERE / "mock_princes.jsonl", princes)
    write_jsonl(HERE / "mock_skin_yard.jsonl", skin_yard)
    write_jsonl(HERE / "mock.jsonl", princes + skin_yard)

    qa = HERE / "qa"
    qa.mkdir(exist_ok=True)
    write_jsonl(qa / "case_studies.jsonl", [
        {"id": "nq-princes", "question": PRINCES_Q,
         "golden_answers": ["Edward IV of England"], "source": "NQ"},
        {"id": "hotpot-skin-yard", "question": SKIN_YARD_Q,
         "golden_answers": ["no"], "source": "HotpotQA"},
    ])
    write_jsonl(qa / "case_answers.jsonl", [
        {"id": "nq-princes", "answer": "King Edward IV"},
        {"id": "hotpot-skin-yard",
         "answer": "Skin Yard was from the U.S. (Seattle, Washington). Ostava was from Bulgaria (not the U.S.)."},
    ])
    (HERE / "judges_mock.json").write_text(json.dumps({"judges": [
        {"id": "judge-a", "mock": "yes"},
        {"id": "judge-b", "mock": "Yes."},
        {"id": "judge-c", "mock": "yes"},
    ]}, indent=2) + "\n", encoding="utf-8")


if __name__ == "__main__":
    main()
