"""Porter suffix-stripping stemmer.

Follows the widely used reference implementation of the 1980 algorithm,
including its two departures from the published paper (-bli/-logi handling
in step 2 and skipping words of length <= 2), so output agrees with the
canonical voc.txt/output.txt test vectors.
"""

from functools import lru_cache

_VOWELS = "aeiou"


class _Buffer:
    """Mutable word buffer; b[0..k] is the current word, j a suffix offset."""

    __slots__ = ("b", "k", "j")

    def __init__(self, word: str):
        self.b = word
        self.k = len(word) - 1
        self.j = 0

    def cons(self, i: int) -> bool:
        ch = self.b[i]
        if ch in _VOWELS:
            return False
        if ch == "y":
            return i == 0 or not self.cons(i - 1)
        return True

    def m(self) -> int:
        """Number of consonant-vowel sequences in b[0..j]."""
        i, n = 0, 0
        while True:
            if i > self.j:
                return n
            if not self.cons(i):
                break
            i += 1
        i += 1
        while True:
            while True:
                if i > self.j:
                    return n
                if self.cons(i):
                    break
                i += 1
            i += 1
            n += 1
            while True:
                if i > self.j:
                    return n
                if not self.cons(i):
                    break
                i += 1
            i += 1

    def vowel_in_stem(self) -> bool:
        return any(not self.cons(i) for i in range(self.j + 1))

    def double_cons(self, j: int) -> bool:
        return j > 0 and self.b[j] == self.b[j - 1] and self.cons(j)

    def cvc(self, i: int) -> bool:
        if i < 2 or not self.cons(i) or self.cons(i - 1) or not self.cons(i - 2):
            return False
        return self.b[i] not in "wxy"

    def ends(self, s: str) -> bool:
        length = len(s)
        if s[-1] != self.b[self.k] or length > self.k + 1:
            return False
        if self.b[self.k - length + 1 : self.k + 1] != s:
            return False
        self.j = self.k - length
        return True

    def set_to(self, s: str) -> None:
        self.b = self.b[: self.j + 1] + s
        self.k = len(self.b) - 1

    def replace_if_m(self, s: str) -> None:
        if self.m() > 0:
            self.set_to(s)


def _step1ab(w: _Buffer) -> None:
    # plurals and -ed / -ing
    if w.b[w.k] == "s":
        if w.ends("sses"):
            w.k -= 2
        elif w.ends("ies"):
            w.set_to("i")
        elif w.b[w.k - 1] != "s":
            w.k -= 1
    if w.ends("eed"):
        if w.m() > 0:
            w.k -= 1
    elif (w.ends("ed") or w.ends("ing")) and w.vowel_in_stem():
        w.k = w.j
        if w.ends("at"):
            w.set_to("ate")
        elif w.ends("bl"):
            w.set_to("ble")
        elif w.ends("iz"):
            w.set_to("ize")
        elif w.double_cons(w.k):
            if w.b[w.k - 1] not in "lsz":
                w.k -= 1
        elif w.m() == 1 and w.cvc(w.k):
            w.set_to("e")


def _step1c(w: _Buffer) -> None:
    # terminal y -> i when the stem has another vowel
    if w.ends("y") and w.vowel_in_stem():
        w.b = w.b[: w.k] + "i"


_STEP2 = {
    "a": (("ational", "ate"), ("tional", "tion")),
    "c": (("enci", "ence"), ("anci", "ance")),
    "e": (("izer", "ize"),),
    "l": (("bli", "ble"), ("alli", "al"), ("entli", "ent"), ("eli", "e"), ("ousli", "ous")),
    "o": (("ization", "ize"), ("ation", "ate"), ("ator", "ate")),
    "s": (("alism", "al"), ("iveness", "ive"), ("fulness", "ful"), ("ousness", "ous")),
    "t": (("aliti", "al"), ("iviti", "ive"), ("biliti", "ble")),
    "g": (("logi", "log"),),
}

_STEP3 = {
    "e": (("icate", "ic"), ("ative", ""), ("alize", "al")),
    "i": (("iciti", "ic"),),
    "l": (("ical", "ic"), ("ful", "")),
    "s": (("ness", ""),),
}


def _map_suffixes(w: _Buffer, table, key_index: int) -> None:
    for suffix, repl in table.get(w.b[w.k - key_index], ()):
        if w.ends(suffix):
            w.replace_if_m(repl)
            return


_STEP4_BY_PENULT = {
    "a": ("al",),
    "c": ("ance", "ence"),
    "e": ("er",),
    "i": ("ic",),
    "l": ("able", "ible"),
    "n": ("ant", "ement", "ment", "ent"),
    "o": ("ion", "ou"),
    "s": ("ism",),
    "t": ("ate", "iti"),
    "u": ("ous",),
    "v": ("ive",),
    "z": ("ize",),
}


def _step4(w: _Buffer) -> None:
    # strip -ant, -ence, ... when m() > 1
    for suffix in _STEP4_BY_PENULT.get(w.b[w.k - 1], ()):
        if w.ends(suffix):
            if suffix == "ion" and w.b[w.j] not in "st":
                continue
            if w.m() > 1:
                w.k = w.j
            return


def _step5(w: _Buffer) -> None:
    w.j = w.k
    if w.b[w.k] == "e":
        a = w.m()
        if a > 1 or (a == 1 and not w.cvc(w.k - 1)):
            w.k -= 1
    if w.b[w.k] == "l" and w.double_cons(w.k) and w.m() > 1:
        w.k -= 1


@lru_cache(maxsize=65536)
def stem(word: str) -> str:
    """Return the Porter stem of a lowercased word.

    Words of length <= 2 (and the empty string) are returned unchanged.
    """
    if len(word) <= 2:
        return word
    w = _Buffer(word)
    _step1ab(w)
    _step1c(w)
    _map_suffixes(w, _STEP2, 1)
    _map_suffixes(w, _STEP3, 0)
    _step4(w)
    _step5(w)
    return w.b[: w.k + 1]


def stem_phrase(tokens) -> str:
    """Canonical identity of a phrase: space-joined stems of its tokens."""
    return " ".join(stem(t) for t in tokens)
