"""Built-in rules and the plain-text rule format.

Rule files have three lines::

    k 3
    r 1
    table 0 1 0 0 1 0 2 0 2 ...

with ``k^(2r+1)`` table entries in index order (leftmost neighbor most
significant).
"""

from __future__ import annotations

from dataclasses import dataclass
from pathlib import Path

from .core import LocalRule, RuleError, rule_from_table


class RuleSyntaxError(RuleError):
    def __init__(self, line: int, message: str):
        super().__init__(f"line {line}: {message}")
        self.line = line


# output as a function of (middle, right); the left neighbor is ignored
_FS_MIDDLE_RIGHT = {
    (0, 0): 0, (0, 1): 1, (0, 2): 0,
    (1, 0): 0, (1, 1): 1, (1, 2): 0,
    (2, 0): 2, (2, 1): 0, (2, 2): 2,
}


def gilman_fs() -> LocalRule:
    """Three-symbol radius-1 rule: 2s stay put, 1s move left, a 1 meeting a 2 annihilates both."""
    table = [
        _FS_MIDDLE_RIGHT[(b, c)]
        for a in range(3)
        for b in range(3)
        for c in range(3)
    ]
    return rule_from_table(3, 1, table)


def eca(code: int) -> LocalRule:
    """Elementary CA in Wolfram numbering: neighborhood value v maps to bit v of ``code``."""
    if not 0 <= code <= 255:
        raise RuleError(f"elementary rule code must be in [0, 255], got {code}")
    return rule_from_table(2, 1, [(code >> v) & 1 for v in range(8)])


def eca_code(rule: LocalRule) -> int:
    if rule.k != 2 or rule.r != 1:
        raise RuleError("only k=2, r=1 rules have an elementary code")
    return sum(bit << v for v, bit in enumerate(rule.table))


def shift_rule(k: int) -> LocalRule:
    """``f(a, b, c) = c``, i.e. ``F(x)_i = x_(i+1)``."""
    if k < 2:
        raise RuleError("alphabet size must be at least 2")
    return rule_from_table(k, 1, [c for _a in range(k) for _b in range(k) for c in range(k)])


def identity_rule(k: int) -> LocalRule:
    if k < 2:
        raise RuleError("alphabet size must be at least 2")
    return rule_from_table(k, 0, list(range(k)))


def serialize_rule(rule: LocalRule) -> str:
    return f"k {rule.k}\nr {rule.r}\ntable {' '.join(map(str, rule.table))}\n"


def parse_rule_file(text: str) -> LocalRule:
    lines = [(i, ln.split("#", 1)[0].strip()) for i, ln in enumerate(text.splitlines(), start=1)]
    lines = [(i, ln) for i, ln in lines if ln]
    if len(lines) != 3:
        last = lines[-1][0] if lines else 1
        raise RuleSyntaxError(last, f"expected 3 lines (k, r, table), found {len(lines)}")
    values = {}
    for (lineno, line), key in zip(lines, ("k", "r", "table")):
        head, _, rest = line.partition(" ")
        if head != key:
            raise RuleSyntaxError(lineno, f"expected '{key}', found {head!r}")
        try:
            nums = [int(tok) for tok in rest.split()]
        except ValueError:
            raise RuleSyntaxError(lineno, f"non-integer value in {line!r}") from None
        if key != "table" and len(nums) != 1:
            raise RuleSyntaxError(lineno, f"'{key}' takes exactly one integer")
        values[key] = nums if key == "table" else nums[0]
    return rule_from_table(values["k"], values["r"], values["table"])


@dataclass(frozen=True)
class RuleSpec:
    id: str
    rule: LocalRule
    provenance: str


def builtin_rules() -> dict[str, RuleSpec]:
    specs = [
        RuleSpec("fs", gilman_fs(),
                 "three-symbol particle rule: 1s move left, 2s stay, a 1 meeting a 2 annihilates both"),
        RuleSpec("shift:2", shift_rule(2), "left shift on two symbols"),
        RuleSpec("shift:3", shift_rule(3), "left shift on three symbols"),
        RuleSpec("identity:2", identity_rule(2), "identity on two symbols"),
        RuleSpec("identity:3", identity_rule(3), "identity on three symbols"),
        RuleSpec("eca:90", eca(90), "XOR of outer neighbors"),
        RuleSpec("eca:110", eca(110), "elementary rule 110"),
    ]
    return {s.id: s for s in specs}


def resolve_rule(source: str) -> RuleSpec:
    """Look up ``fs``, ``identity:k``, ``shift:k``, ``eca:code`` or read a rule file."""
    name, _, arg = source.partition(":")
    try:
        if source == "fs":
            return RuleSpec("fs", gilman_fs(), "builtin")
        if name in ("identity", "shift", "eca") and arg:
            n = int(arg)
            make = {"identity": identity_rule, "shift": shift_rule, "eca": eca}[name]
            return RuleSpec(f"{name}:{n}", make(n), "builtin")
    except ValueError as exc:
        raise RuleError(f"bad rule id {source!r}: {exc}") from exc
    path = Path(source)
    if path.is_file():
        return RuleSpec(path.stem, parse_rule_file(path.read_text()), f"file {path}")
    raise RuleError(f"unknown rule {source!r}: not a builtin id and not a file")
