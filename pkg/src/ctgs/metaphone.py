"""Double metaphone phonetic codes (L. Philips, 1998/2000).

Produces a primary and an alternate code so that similar-sounding words
(including many non-English spellings of names) share a code. The rule set
follows the published reference implementation; codes are truncated to
``max_length`` characters (4 by default, the reference's limit; pass None
for untruncated codes).
"""

from __future__ import annotations

from dataclasses import dataclass

_VOWELS = frozenset("AEIOUY")
_SILENT_STARTS = ("GN", "KN", "PN", "WR", "PS")


@dataclass(frozen=True)
class MetaphoneCode:
    primary: str
    alternate: str

    def matches(self, other: "MetaphoneCode") -> bool:
        """Standard double-metaphone match: any code of one equals any
        non-empty code of the other."""
        mine = {self.primary, self.alternate} - {""}
        theirs = {other.primary, other.alternate} - {""}
        return bool(mine & theirs)


def double_metaphone(word: str, max_length: int | None = 4) -> MetaphoneCode:
    pri, sec = _codes(word.upper())
    if max_length is not None:
        pri, sec = pri[:max_length], sec[:max_length]
    return MetaphoneCode(pri, sec)


def _codes(word: str) -> tuple[str, str]:
    # Pad so every rule can index two chars back and five ahead without
    # bounds checks: positions 0-1 are '-', the tail is spaces.
    slavo_germanic = (
        "W" in word or "K" in word or "CZ" in word or "WITZ" in word
    )
    length = len(word)
    first = 2
    s = "--" + word + "     "
    last = first + length - 1
    pos = first
    pri = sec = ""

    if s[first : first + 2] in _SILENT_STARTS:
        pos += 1
    if s[first] == "X":  # initial X pronounced as Z, coded S ('Xavier')
        pri = sec = "S"
        pos += 1

    while pos <= last:
        ch = s[pos]
        # Each case yields (primary-add, secondary-add, advance); a
        # two-tuple adds the same fragment to both codes.
        nxt: tuple = (None, 1)

        if ch in _VOWELS:
            nxt = ("A", 1) if pos == first else (None, 1)

        elif ch == "B":
            # '-mb' ('dumb') is skipped by the M rule
            nxt = ("P", 2) if s[pos + 1] == "B" else ("P", 1)

        elif ch == "C":
            nxt = _case_c(s, pos, first)

        elif ch == "D":
            if s[pos : pos + 2] == "DG":
                if s[pos + 2] in "IEY":  # 'edge'
                    nxt = ("J", 3)
                else:  # 'Edgar'
                    nxt = ("TK", 2)
            elif s[pos : pos + 2] in ("DT", "DD"):
                nxt = ("T", 2)
            else:
                nxt = ("T", 1)

        elif ch == "F":
            nxt = ("F", 2) if s[pos + 1] == "F" else ("F", 1)

        elif ch == "G":
            nxt = _case_g(s, pos, first, slavo_germanic)

        elif ch == "H":
            # keep only when initial or intervocalic
            if (pos == first or s[pos - 1] in _VOWELS) and s[pos + 1] in _VOWELS:
                nxt = ("H", 2)
            else:
                nxt = (None, 1)

        elif ch == "J":
            nxt = _case_j(s, pos, first, last, slavo_germanic)

        elif ch == "K":
            nxt = ("K", 2) if s[pos + 1] == "K" else ("K", 1)

        elif ch == "L":
            if s[pos + 1] == "L":
                # Spanish 'cabrillo', 'gallegos': alternate drops the L
                if (
                    pos == last - 2
                    and s[pos - 1 : pos + 3] in ("ILLO", "ILLA", "ALLE")
                ) or (
                    (s[last - 1 : last + 1] in ("AS", "OS") or s[last] in "AO")
                    and s[pos - 1 : pos + 3] == "ALLE"
                ):
                    nxt = ("L", "", 2)
                else:
                    nxt = ("L", 2)
            else:
                nxt = ("L", 1)

        elif ch == "M":
            if (
                s[pos + 1 : pos + 4] == "UMB"
                and (pos + 1 == last or s[pos + 2 : pos + 4] == "ER")
                or s[pos + 1] == "M"
            ):
                nxt = ("M", 2)
            else:
                nxt = ("M", 1)

        elif ch == "N":
            nxt = ("N", 2) if s[pos + 1] == "N" else ("N", 1)

        elif ch == "P":
            if s[pos + 1] == "H":
                nxt = ("F", 2)
            elif s[pos + 1] in "PB":  # 'campbell', 'raspberry'
                nxt = ("P", 2)
            else:
                nxt = ("P", 1)

        elif ch == "Q":
            nxt = ("K", 2) if s[pos + 1] == "Q" else ("K", 1)

        elif ch == "R":
            # French final -ier ('rogier'), but not 'hochmeier'
            if (
                pos == last
                and not slavo_germanic
                and s[pos - 2 : pos] == "IE"
                and s[pos - 4 : pos - 2] not in ("ME", "MA")
            ):
                head: tuple = ("", "R")
            else:
                head = ("R",)
            nxt = head + ((2,) if s[pos + 1] == "R" else (1,))

        elif ch == "S":
            nxt = _case_s(s, pos, first, last, slavo_germanic)

        elif ch == "T":
            if s[pos : pos + 4] == "TION":
                nxt = ("X", 3)
            elif s[pos : pos + 3] in ("TIA", "TCH"):
                nxt = ("X", 3)
            elif s[pos : pos + 2] == "TH" or s[pos : pos + 3] == "TTH":
                # 'thomas', 'thames', or Germanic names keep the hard T
                if (
                    s[pos + 2 : pos + 4] in ("OM", "AM")
                    or s[first : first + 4] in ("VON ", "VAN ")
                    or s[first : first + 3] == "SCH"
                ):
                    nxt = ("T", 2)
                else:
                    nxt = ("0", "T", 2)
            elif s[pos + 1] in "TD":
                nxt = ("T", 2)
            else:
                nxt = ("T", 1)

        elif ch == "V":
            nxt = ("F", 2) if s[pos + 1] == "V" else ("F", 1)

        elif ch == "W":
            nxt = _case_w(s, pos, first, last)

        elif ch == "X":
            # silent in French '-eaux'
            head = (None,)
            if not (
                pos == last
                and (
                    s[pos - 3 : pos] in ("IAU", "EAU")
                    or s[pos - 2 : pos] in ("AU", "OU")
                )
            ):
                head = ("KS",)
            nxt = head + ((2,) if s[pos + 1] in "CX" else (1,))

        elif ch == "Z":
            if s[pos + 1] == "H":  # pinyin 'zhao'
                head = ("J",)
            elif s[pos + 1 : pos + 3] in ("ZO", "ZI", "ZA") or (
                slavo_germanic and pos > first and s[pos - 1] != "T"
            ):
                head = ("S", "TS")
            else:
                head = ("S",)
            nxt = head + ((2,) if s[pos + 1] == "Z" else (1,))

        if len(nxt) == 2:
            if nxt[0]:
                pri += nxt[0]
                sec += nxt[0]
            pos += nxt[1]
        else:
            if nxt[0]:
                pri += nxt[0]
            if nxt[1]:
                sec += nxt[1]
            pos += nxt[2]

    return pri, sec


def _case_c(s: str, pos: int, first: int) -> tuple:
    # Germanic '-ACH-' ('Bacher', 'Macher') but not 'ACHI'
    if (
        pos > first + 1
        and s[pos - 2] not in _VOWELS
        and s[pos - 1 : pos + 2] == "ACH"
        and (s[pos + 2] not in "IE" or s[pos - 2 : pos + 4] in ("BACHER", "MACHER"))
    ):
        return ("K", 2)
    if pos == first and s[first : first + 6] == "CAESAR":
        return ("S", 2)
    if s[pos : pos + 4] == "CHIA":  # Italian 'chianti'
        return ("K", 2)
    if s[pos : pos + 2] == "CH":
        if pos > first and s[pos : pos + 4] == "CHAE":  # 'michael'
            return ("K", "X", 2)
        if (
            pos == first
            and (
                s[pos + 1 : pos + 6] in ("HARAC", "HARIS")
                or s[pos + 1 : pos + 4] in ("HOR", "HYM", "HIA", "HEM")
            )
            and s[first : first + 5] != "CHORE"
        ):
            return ("K", 2)
        # Germanic/Greek 'ch' as 'kh'
        if (
            s[first : first + 4] in ("VAN ", "VON ")
            or s[first : first + 3] == "SCH"
            or s[pos - 2 : pos + 4] in ("ORCHES", "ARCHIT", "ORCHID")
            or s[pos + 2] in "TS"
            or (
                (s[pos - 1] in "AOUE" or pos == first)
                and s[pos + 2] in ("L", "R", "N", "M", "B", "H", "F", "V", "W", " ")
            )
        ):
            return ("K", 1)
        if pos > first:
            if s[first : first + 2] == "MC":
                return ("K", 2)
            return ("X", "K", 2)
        return ("X", 2)
    if s[pos : pos + 2] == "CZ" and s[pos - 2 : pos + 2] != "WICZ":  # 'czerny'
        return ("S", "X", 2)
    if s[pos + 1 : pos + 4] == "CIA":  # 'focaccia'
        return ("X", 3)
    # double C, but not 'McClellan'
    if s[pos : pos + 2] == "CC" and not (pos == first + 1 and s[first] == "M"):
        if s[pos + 2] in "IEH" and s[pos + 2 : pos + 4] != "HU":
            # 'accident', 'accede', 'succeed'
            if (pos == first + 1 and s[first] == "A") or s[pos - 1 : pos + 4] in (
                "UCCEE",
                "UCCES",
            ):
                return ("KS", 3)
            # 'bacci', 'bertucci'
            return ("X", 3)
        return ("K", 2)
    if s[pos : pos + 2] in ("CK", "CG", "CQ"):
        return ("K", 2)
    if s[pos : pos + 2] in ("CI", "CE", "CY"):
        if s[pos : pos + 3] in ("CIO", "CIE", "CIA"):
            return ("S", "X", 2)
        return ("S", 2)
    if s[pos + 1 : pos + 3] in (" C", " Q", " G"):  # 'mac caffrey'
        return ("K", 3)
    if s[pos + 1] in "CKQ" and s[pos + 1 : pos + 3] not in ("CE", "CI"):
        return ("K", 2)
    return ("K", 1)


def _case_g(s: str, pos: int, first: int, slavo_germanic: bool) -> tuple:
    if s[pos + 1] == "H":
        if pos > first and s[pos - 1] not in _VOWELS:
            return ("K", 2)
        if pos < first + 3:
            if pos == first:  # 'ghislane', 'ghiradelli'
                if s[pos + 2] == "I":
                    return ("J", 2)
                return ("K", 2)
            return (None, 1)
        # silent after B/H/D a few letters back ('hugh')
        if (
            (pos > first + 1 and s[pos - 2] in "BHD")
            or (pos > first + 2 and s[pos - 3] in "BHD")
            or (pos > first + 3 and s[pos - 4] in "BH")
        ):
            return (None, 2)
        # '-ough-' as F ('laugh', 'rough', 'cough')
        if pos > first + 2 and s[pos - 1] == "U" and s[pos - 3] in "CGLRT":
            return ("F", 2)
        if pos > first and s[pos - 1] != "I":
            return ("K", 2)
        return (None, 1)
    if s[pos + 1] == "N":
        if pos == first + 1 and s[first] in _VOWELS and not slavo_germanic:
            return ("KN", "N", 2)
        # not 'cagney'
        if s[pos + 2 : pos + 4] != "EY" and s[pos + 1] != "Y" and not slavo_germanic:
            return ("N", "KN", 2)
        return ("KN", 2)
    if s[pos + 1 : pos + 3] == "LI" and not slavo_germanic:  # 'tagliaro'
        return ("KL", "L", 2)
    # initial 'ges-', 'gep-', 'gie-' etc.
    if pos == first and (
        s[pos + 1] == "Y"
        or s[pos + 1 : pos + 3]
        in ("ES", "EP", "EB", "EL", "EY", "IB", "IL", "IN", "IE", "EI", "ER")
    ):
        return ("K", "J", 2)
    if (
        (s[pos + 1 : pos + 2] == "ER" or s[pos + 1] == "Y")
        and s[first : first + 6] not in ("DANGER", "RANGER", "MANGER")
        and s[pos - 1] not in "EI"
        and s[pos - 1 : pos + 2] not in ("RGY", "OGY")
    ):
        return ("K", "J", 2)
    # Italian 'biaggi'
    if s[pos + 1] in "EIY" or s[pos - 1 : pos + 3] in ("AGGI", "OGGI"):
        if (
            s[first : first + 4] in ("VON ", "VAN ")
            or s[first : first + 3] == "SCH"
            or s[pos + 1 : pos + 3] == "ET"
        ):
            return ("K", 2)
        if s[pos + 1 : pos + 5] == "IER ":  # French ending: always soft
            return ("J", 2)
        return ("J", "K", 2)
    if s[pos + 1] == "G":
        return ("K", 2)
    return ("K", 1)


def _case_j(s: str, pos: int, first: int, last: int, slavo_germanic: bool) -> tuple:
    # Spanish 'jose', 'san jacinto'
    if s[pos : pos + 4] == "JOSE" or s[first : first + 4] == "SAN ":
        if (pos == first and s[pos + 4] == " ") or s[first : first + 4] == "SAN ":
            head: tuple = ("H",)
        else:
            head = ("J", "H")
    elif pos == first and s[pos : pos + 4] != "JOSE":
        head = ("J", "A")  # Yankelovich / Jankelowicz
    elif (
        s[pos - 1] in _VOWELS and not slavo_germanic and s[pos + 1] in "AO"
    ):  # Spanish 'bajador'
        head = ("J", "H")
    elif pos == last:
        head = ("J", " ")
    elif s[pos + 1] not in ("L", "T", "K", "S", "N", "M", "B", "Z") and s[
        pos - 1
    ] not in "SKL":
        head = ("J",)
    else:
        head = (None,)
    return head + ((2,) if s[pos + 1] == "J" else (1,))


def _case_s(s: str, pos: int, first: int, last: int, slavo_germanic: bool) -> tuple:
    if s[pos - 1 : pos + 2] in ("ISL", "YSL"):  # 'island', 'carlisle'
        return (None, 1)
    if pos == first and s[first : first + 5] == "SUGAR":
        return ("X", "S", 1)
    if s[pos : pos + 2] == "SH":
        if s[pos + 1 : pos + 5] in ("HEIM", "HOEK", "HOLM", "HOLZ"):  # Germanic
            return ("S", 2)
        return ("X", 2)
    # Italian and Armenian '-sio-', '-sia-'
    if s[pos : pos + 3] in ("SIO", "SIA") or s[pos : pos + 4] == "SIAN":
        if not slavo_germanic:
            return ("S", "X", 3)
        return ("S", 3)
    # 'smith' matching 'schmidt', 'snider' matching 'schneider'; also '-sz-'
    if (pos == first and s[pos + 1] in "MNLW") or s[pos + 1] == "Z":
        return ("S", "X") + ((2,) if s[pos + 1] == "Z" else (1,))
    if s[pos : pos + 2] == "SC":
        if s[pos + 2] == "H":
            if s[pos + 3 : pos + 5] in ("OO", "ER", "EN", "UY", "ED", "EM"):
                # Dutch 'school', 'schooner'; 'schermerhorn', 'schenker'
                if s[pos + 3 : pos + 5] in ("ER", "EN"):
                    return ("X", "SK", 3)
                return ("SK", 3)
            if pos == first and s[first + 3] not in _VOWELS and s[first + 3] != "W":
                return ("X", "S", 3)
            return ("X", 3)
        if s[pos + 2] in "IEY":
            return ("S", 3)
        return ("SK", 3)
    # French final 'resnais', 'artois'
    if pos == last and s[pos - 2 : pos] in ("AI", "OI"):
        return ("", "S", 1)
    return ("S",) + ((2,) if s[pos + 1] in "SZ" else (1,))


def _case_w(s: str, pos: int, first: int, last: int) -> tuple:
    if s[pos : pos + 2] == "WR":
        return ("R", 2)
    if pos == first and (s[pos + 1] in _VOWELS or s[pos : pos + 2] == "WH"):
        if s[pos + 1] in _VOWELS:  # 'Wasserman' matching 'Vasserman'
            return ("A", "F", 1)
        return ("A", 1)
    # 'Arnow' matching 'Arnoff'
    if (
        (pos == last and s[pos - 1] in _VOWELS)
        or s[pos - 1 : pos + 5] in ("EWSKI", "EWSKY", "OWSKI", "OWSKY")
        or s[first : first + 3] == "SCH"
    ):
        return ("", "F", 1)
    if s[pos : pos + 4] in ("WICZ", "WITZ"):  # Polish 'filipowicz'
        return ("TS", "FX", 4)
    return (None, 1)
