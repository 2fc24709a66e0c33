"""Regenerate words_fixture.txt from the Alice chapter.

Keeps every alphabetic word of the chapter that appears in Webster's web2 or
GCIDE (public domain, shipped by the `english-words` pip package), directly
or after removing a regular inflection.

    pip install english-words
    python3 make_words_fixture.py > words_fixture.txt
"""
import pathlib
import re

from english_words import get_english_words_set

known = get_english_words_set(["web2", "gcide"], lower=True)


def is_word(w):
    if w in known:
        return True
    for suffix, repl in (("ies", "y"), ("ied", "y"), ("es", ""), ("s", ""),
                         ("ed", ""), ("ed", "e"), ("d", ""), ("ing", ""),
                         ("ing", "e"), ("ly", ""), ("er", ""), ("est", "")):
        if w.endswith(suffix) and len(w) > len(suffix) + 1:
            base = w[: -len(suffix)] + repl
            if base in known:
                return True
            # doubled consonant: peeped -> peep, stopping -> stop
            if len(base) > 2 and base[-1] == base[-2] and base[:-1] in known:
                return True
    return False


text = (pathlib.Path(__file__).parent / "alice_chapter1.txt").read_text()
words = {w.lower() for w in re.findall(r"[A-Za-z]+", text)}
for w in sorted(words):
    if is_word(w):
        print(w)
