"""Mechanical verification and search for equational derivations.

A single derivation step rewrites ``l·theta(p)·r`` to ``l·theta(q)·r`` for a
rule ``p = q`` used in either direction (equational semantics: rules are
symmetric, not oriented).  ``check_derivation`` verifies a chain of words
step by step; ``derive_bounded`` searches for a chain with a bidirectional
breadth-first search over the (symmetric) one-step relation.

The module also implements the canonical-word machinery: canonical words
factor as blocks of distinct squares separated by once-occurring letters,
lambda identities are the two-square-tail identities over such prefixes,
``lambda_reduce`` rewrites a canonical pair into the lambda identities it
generates, and ``sigma_classify`` places a lambda identity in the
alternating-squares chain (some finite stage, or its limit).
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from typing import Iterable, Iterator, Mapping, Sequence

from .words import (
    EMPTY,
    Identity,
    Word,
    format_identity,
    format_word,
    match_pattern,
    parse_identity,
    parse_word,
    sigma,
    sigma_infinity,
)

__all__ = [
    "E1_BASIS",
    "DerivationError",
    "DerivationStep",
    "DerivationScript",
    "directly_deducible",
    "check_derivation",
    "successors",
    "DeriveOutcome",
    "derive_bounded",
    "CanonicalDecomposition",
    "canonical_decomposition",
    "is_canonical",
    "to_canonical",
    "PREFIX_CHOICES",
    "LambdaIdentity",
    "lambda_reduce",
    "SigmaClass",
    "sigma_classify",
]


#: Defining identities of the variety generated by the catalog monoid E^1:
#: cube collapse, two one-sided square absorptions, and the square-pull rule.
E1_BASIS: tuple[Identity, ...] = (
    parse_identity("x^3 = x^2"),
    parse_identity("x^2 y x = x y x"),
    parse_identity("x y x^2 = x y x"),
    parse_identity("x y^2 x = x^2 y^2"),
)


class DerivationError(ValueError):
    """A derivation chain or canonicalization request is invalid."""


# ---------------------------------------------------------------------------
# Single steps and chains
# ---------------------------------------------------------------------------


@dataclass
class DerivationStep:
    source: Word
    target: Word
    rule_index: int
    forward: bool
    theta: dict[str, Word]
    left: Word
    right: Word

    def describe(self, rules: Sequence[Identity] | None = None) -> str:
        arrow = "->" if self.forward else "<-"
        sub = " ".join(f"{v}={format_word(w)}" for v, w in sorted(self.theta.items()))
        rule = f"rule {self.rule_index} ({arrow})"
        if rules is not None:
            rule += f" {format_identity(rules[self.rule_index])}"
        return (
            f"{format_word(self.source)} => {format_word(self.target)} via {rule}"
            f" with [{sub}] in context ({format_word(self.left)}, {format_word(self.right)})"
        )


def _occurrences(text: tuple[str, ...], factor: tuple[str, ...]) -> Iterator[int]:
    n, m = len(text), len(factor)
    for i in range(n - m + 1):
        if text[i : i + m] == factor:
            yield i


def _rule_applications(
    u: Word, p: Word, q: Word, *, max_length: int | None = None
) -> Iterator[tuple[Word, dict[str, Word], int]]:
    """All (result, theta, position) with u = u[:pos]·theta(p)·... rewritten
    to u[:pos]·theta(q)·..., in deterministic (theta, position) order."""
    for theta in match_pattern(p, u):
        image_p = p.substitute(theta)
        full = {v: theta.get(v, EMPTY) for v in (p.content() | q.content())}
        image_q = q.substitute(full)
        if max_length is not None and len(u) - len(image_p) + len(image_q) > max_length:
            continue
        for pos in _occurrences(u.letters, image_p.letters):
            yield (
                Word(u.letters[:pos] + image_q.letters + u.letters[pos + len(image_p):]),
                full,
                pos,
            )


def directly_deducible(
    u: Word, v: Word, rules: Sequence[Identity]
) -> DerivationStep | None:
    """The first single derivation step turning u into v, or None.

    Deterministic search order: rules in the given order, each used forward
    then backward, substitutions in the sorted order produced by the
    matcher, occurrence positions left to right.  Variables occurring only
    on the replacement side are solved against the target word, so the
    check is exact for arbitrary rules.
    """
    if u == v:
        return None
    from .words import match_exact

    for idx, rule in enumerate(rules):
        for forward in (True, False):
            p, q = (rule.lhs, rule.rhs) if forward else (rule.rhs, rule.lhs)
            delta = len(v) - len(u)
            one_sided = q.content() - p.content()
            for theta_p in match_pattern(p, u):
                image_p = p.substitute(theta_p)
                qlen = len(image_p) + delta
                if qlen < 0:
                    continue
                for pos in _occurrences(u.letters, image_p.letters):
                    if v.letters[:pos] != u.letters[:pos]:
                        continue
                    if v.letters[pos + qlen:] != u.letters[pos + len(image_p):]:
                        continue
                    factor = Word(v.letters[pos : pos + qlen])
                    if not one_sided:
                        if q.substitute(theta_p) != factor:
                            continue
                        theta = dict(theta_p)
                    else:
                        theta = None
                        for theta_q in match_exact(q, factor):
                            if all(
                                theta_q[c] == theta_p[c]
                                for c in q.content() & p.content()
                            ):
                                theta = {**theta_p, **theta_q}
                                break
                        if theta is None:
                            continue
                    return DerivationStep(
                        source=u,
                        target=v,
                        rule_index=idx,
                        forward=forward,
                        theta=theta,
                        left=u[:pos],
                        right=u[pos + len(image_p):],
                    )
    return None


def check_derivation(
    words: Sequence[Word], rules: Sequence[Identity]
) -> list[DerivationStep]:
    """Verify that consecutive words are each one rule application apart.

    Words must be pairwise distinct.  Raises DerivationError naming the
    first failing link; returns the verified steps.
    """
    words = list(words)
    if not words:
        raise DerivationError("empty derivation")
    if len(set(words)) != len(words):
        raise DerivationError("derivation words must be pairwise distinct")
    steps = []
    for i in range(len(words) - 1):
        step = directly_deducible(words[i], words[i + 1], rules)
        if step is None:
            raise DerivationError(
                f"step {i}: {format_word(words[i])} => {format_word(words[i + 1])} "
                "is not a single application of any rule"
            )
        steps.append(step)
    return steps


def successors(
    u: Word, rules: Sequence[Identity], *, max_length: int | None = None
) -> list[Word]:
    """All words one rule application away from u (either direction),
    de-duplicated, sorted, excluding u itself.

    Variables occurring only on the replacement side of a rule are
    instantiated with the empty word (their image is otherwise unbounded);
    the bounded search makes no completeness claim in that case."""
    out: set[Word] = set()
    for rule in rules:
        for p, q in ((rule.lhs, rule.rhs), (rule.rhs, rule.lhs)):
            for result, _theta, _pos in _rule_applications(u, p, q, max_length=max_length):
                if result != u:
                    out.add(result)
    return sorted(out)


# ---------------------------------------------------------------------------
# Scripts
# ---------------------------------------------------------------------------


@dataclass
class DerivationScript:
    """A rule list plus the full word chain of a derivation."""

    rules: tuple[Identity, ...]
    words: tuple[Word, ...]
    meta: dict = field(default_factory=dict)

    def identity(self) -> Identity:
        return Identity(self.words[0], self.words[-1])

    def check(self) -> list[DerivationStep]:
        return check_derivation(self.words, self.rules)

    def to_dict(self) -> dict:
        d = {
            "rules": [format_identity(r) for r in self.rules],
            "words": [format_word(w) for w in self.words],
        }
        if self.meta:
            d["meta"] = self.meta
        return d

    @classmethod
    def from_dict(cls, d: Mapping) -> "DerivationScript":
        return cls(
            rules=tuple(parse_identity(r) for r in d["rules"]),
            words=tuple(parse_word(w) for w in d["words"]),
            meta=dict(d.get("meta", {})),
        )

    def to_json(self, **kwargs) -> str:
        kwargs.setdefault("indent", 2)
        return json.dumps(self.to_dict(), **kwargs)

    @classmethod
    def from_json(cls, text: str) -> "DerivationScript":
        return cls.from_dict(json.loads(text))


def bundled_scripts() -> dict[str, DerivationScript]:
    """The derivation scripts shipped with the package, keyed by name."""
    from importlib import resources

    out: dict[str, DerivationScript] = {}
    root = resources.files("monoidlab").joinpath("data/scripts")
    for entry in sorted(root.iterdir(), key=lambda e: e.name):
        if entry.name.endswith(".json"):
            out[entry.name[: -len(".json")]] = DerivationScript.from_json(
                entry.read_text()
            )
    return out


# ---------------------------------------------------------------------------
# Bounded derivation search
# ---------------------------------------------------------------------------


@dataclass
class DeriveOutcome:
    script: DerivationScript | None
    status: str  # "found" | "space_exhausted" | "cap_reached"
    explored: int

    def __bool__(self) -> bool:
        return self.script is not None


def derive_bounded(
    u: Word,
    v: Word,
    rules: Sequence[Identity],
    *,
    max_words: int = 100_000,
    max_length: int | None = None,
) -> DeriveOutcome:
    """Bidirectional breadth-first search for a derivation of u = v.

    The one-step relation is symmetric, so the search grows frontiers from
    both endpoints (always expanding the smaller one) until they meet.
    ``space_exhausted`` means the whole component of words within
    ``max_length`` was explored without meeting — no derivation exists
    within that length bound; ``cap_reached`` means the word budget ran out
    first and the result is inconclusive.  Found chains are re-verified.
    """
    if max_length is None:
        max_length = max(len(u), len(v)) + 4
    rules = tuple(rules)
    if u == v:
        raise DerivationError("endpoints must differ")
    if len(u) > max_length or len(v) > max_length:
        raise DerivationError("endpoint longer than max_length")

    parents: tuple[dict[Word, Word | None], dict[Word, Word | None]] = ({u: None}, {v: None})
    frontiers: tuple[list[Word], list[Word]] = ([u], [v])
    explored = 2
    meet: Word | None = None
    capped = False

    while frontiers[0] and frontiers[1] and meet is None and not capped:
        side = 0 if len(frontiers[0]) <= len(frontiers[1]) else 1
        new_frontier: list[Word] = []
        for word in frontiers[side]:
            for nxt in successors(word, rules, max_length=max_length):
                if nxt in parents[side]:
                    continue
                if explored >= max_words:
                    capped = True
                    break
                parents[side][nxt] = word
                explored += 1
                new_frontier.append(nxt)
                if nxt in parents[1 - side]:
                    meet = nxt
                    break
            if meet is not None or capped:
                break
        frontiers = (new_frontier, frontiers[1]) if side == 0 else (frontiers[0], new_frontier)

    if meet is None:
        status = "cap_reached" if capped else "space_exhausted"
        return DeriveOutcome(script=None, status=status, explored=explored)

    chain_u: list[Word] = []
    node: Word | None = meet
    while node is not None:
        chain_u.append(node)
        node = parents[0][node]
    chain_u.reverse()
    node = parents[1][meet]
    while node is not None:
        chain_u.append(node)
        node = parents[1][node]
    script = DerivationScript(rules=rules, words=tuple(chain_u))
    script.check()
    return DeriveOutcome(script=script, status="found", explored=explored)


# ---------------------------------------------------------------------------
# Canonical words
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class CanonicalDecomposition:
    """Blocks of distinct squared letters separated by once-occurring simple
    letters: the word is block_0 sep_1 block_1 ... sep_n block_n."""

    blocks: tuple[tuple[str, ...], ...]
    separators: tuple[str, ...]

    def word(self) -> Word:
        letters: list[str] = []
        for i, block in enumerate(self.blocks):
            if i > 0:
                letters.append(self.separators[i - 1])
            for c in block:
                letters.extend((c, c))
        return Word(letters)


def canonical_decomposition(w: Word) -> CanonicalDecomposition | None:
    """Decompose w into square blocks and simple separators, or None if w
    is not canonical (odd runs, in-block repeats, repeated separators)."""
    letters = w.letters
    occ = w.occurrences()
    blocks: list[list[str]] = [[]]
    separators: list[str] = []
    i = 0
    while i < len(letters):
        c = letters[i]
        if i + 1 < len(letters) and letters[i + 1] == c:
            if c in blocks[-1] or occ[c] % 2:
                return None
            blocks[-1].append(c)
            i += 2
        else:
            if occ[c] != 1:
                return None
            separators.append(c)
            blocks.append([])
            i += 1
    return CanonicalDecomposition(
        blocks=tuple(tuple(b) for b in blocks), separators=tuple(separators)
    )


def is_canonical(w: Word) -> bool:
    return canonical_decomposition(w) is not None


def to_canonical(
    w: Word,
    rules: Sequence[Identity] = E1_BASIS,
    *,
    max_words: int = 50_000,
    max_length: int | None = None,
    verify: bool = True,
) -> tuple[Word, DerivationScript]:
    """Find a canonical word derivable from w under the rules (breadth-first,
    shortlex-least among those at the first reachable level) and the
    derivation chain leading to it.

    When ``verify`` is set the result is checked to be equivalent to w in
    the catalog monoid E^1 (a sound consequence of the default rule set);
    oversized substitution spaces skip this check silently.
    """
    if max_length is None:
        max_length = len(w) + 4
    rules = tuple(rules)
    parent: dict[Word, Word | None] = {w: None}
    frontier = [w]
    found: Word | None = None
    if is_canonical(w):
        found = w
    while frontier and found is None and len(parent) < max_words:
        next_frontier: list[Word] = []
        level_hits: list[Word] = []
        for word in frontier:
            for nxt in successors(word, rules, max_length=max_length):
                if nxt in parent:
                    continue
                parent[nxt] = word
                next_frontier.append(nxt)
                if is_canonical(nxt):
                    level_hits.append(nxt)
                if len(parent) >= max_words:
                    break
            if len(parent) >= max_words:
                break
        if level_hits:
            found = min(level_hits)
        frontier = next_frontier
    if found is None:
        raise DerivationError(
            f"no canonical word reachable from {format_word(w)} within bounds"
        )
    chain: list[Word] = []
    node: Word | None = found
    while node is not None:
        chain.append(node)
        node = parent[node]
    chain.reverse()
    script = DerivationScript(rules=rules, words=tuple(chain))
    if len(chain) > 1:
        script.check()
    if verify:
        from .equations import BudgetExceededError, satisfies
        from .monoids import catalog

        try:
            result = satisfies(catalog("E^1"), Identity(w, found))
        except BudgetExceededError:
            result = None
        if result is not None and not result.holds:
            raise AssertionError("canonicalization produced a non-equivalent word")
    return found, script


# ---------------------------------------------------------------------------
# Lambda identities and the alternating-squares chain
# ---------------------------------------------------------------------------


#: Allowed prefix blocks of a lambda identity, as words over the template
#: variables x and y.
PREFIX_CHOICES: tuple[Word, ...] = (
    EMPTY,
    parse_word("x^2"),
    parse_word("y^2"),
    parse_word("x^2 y^2"),
    parse_word("y^2 x^2"),
)

_TWO_SQUARES = {parse_word("x^2 y^2"), parse_word("y^2 x^2")}
_X2 = parse_word("x^2")
_Y2 = parse_word("y^2")


@dataclass(frozen=True)
class LambdaIdentity:
    """The identity ``p_1 h_1 ... p_n h_n x^2 y^2 = p_1 h_1 ... p_n h_n
    y^2 x^2`` for prefix blocks p_i drawn from PREFIX_CHOICES."""

    prefixes: tuple[Word, ...]

    def __post_init__(self):
        for p in self.prefixes:
            if p not in PREFIX_CHOICES:
                raise ValueError(f"bad lambda prefix {format_word(p)}")

    @property
    def n(self) -> int:
        return len(self.prefixes)

    def identity(self) -> Identity:
        head: list[str] = []
        for i, p in enumerate(self.prefixes, start=1):
            head.extend(p.letters)
            head.append(f"h{i}")
        lhs = Word(head + ["x", "x", "y", "y"])
        rhs = Word(head + ["y", "y", "x", "x"])
        return Identity(lhs, rhs)

    @classmethod
    def from_identity(cls, ident: Identity) -> "LambdaIdentity":
        """Parse an identity of the lambda shape (up to renaming variables);
        raises DerivationError if it is not of that shape."""
        du = canonical_decomposition(ident.lhs)
        dv = canonical_decomposition(ident.rhs)
        if du is None or dv is None:
            raise DerivationError("lambda identities have canonical sides")
        if du.separators != dv.separators or len(du.blocks) != len(dv.blocks):
            raise DerivationError("sides must share separators")
        if du.blocks[:-1] != dv.blocks[:-1]:
            raise DerivationError("sides must agree before the final block")
        last_u, last_v = du.blocks[-1], dv.blocks[-1]
        if len(last_u) != 2 or last_u[0] == last_u[1] or last_v != (last_u[1], last_u[0]):
            raise DerivationError("final blocks must be a swapped pair of squares")
        xc, yc = last_u
        prefixes = []
        for block in du.blocks[:-1]:
            if any(c not in (xc, yc) for c in block):
                raise DerivationError("prefix blocks may only use the final-pair letters")
            prefixes.append(_project_block(block, xc, yc))
        return cls(tuple(prefixes))


def _project_block(block: Sequence[str], x: str, y: str) -> Word:
    letters: list[str] = []
    for c in block:
        if c == x:
            letters.extend(("x", "x"))
        elif c == y:
            letters.extend(("y", "y"))
    return Word(letters)


def lambda_reduce(u: Word, v: Word) -> list[LambdaIdentity]:
    """Rewrite a pair of distinct canonical words that agree in block
    structure, per-block content, and initial parts into the lambda
    identities generated by the pair.

    Working from the least differing block, the target word's block is
    rearranged toward the source block by interchanging the adjacent
    squares x^2 y^2 where x is the last square before the longest common
    block suffix; each interchange is justified by (and emits) one lambda
    identity whose prefixes are the earlier blocks projected onto the two
    letters involved.  Terminates because each interchange extends the
    common suffix.
    """
    du = canonical_decomposition(u)
    dv = canonical_decomposition(v)
    if du is None or dv is None:
        raise DerivationError("lambda_reduce needs canonical words")
    if u == v:
        return []
    if du.separators != dv.separators:
        raise DerivationError("words must share separator sequence")
    if any(set(a) != set(b) for a, b in zip(du.blocks, dv.blocks)):
        raise DerivationError("words must have blockwise equal content")
    if u.initial_part() != v.initial_part():
        raise DerivationError("words must have equal initial parts")

    ublocks = [list(b) for b in du.blocks]
    vblocks = [list(b) for b in dv.blocks]
    out: list[LambdaIdentity] = []
    seen: set[LambdaIdentity] = set()

    while vblocks != ublocks:
        ell = next(i for i, (a, b) in enumerate(zip(ublocks, vblocks)) if a != b)
        assert ell >= 1, "equal initial parts force equal leading blocks"
        ub, vb = ublocks[ell], vblocks[ell]
        suffix = 0
        while suffix < len(ub) and ub[-1 - suffix] == vb[-1 - suffix]:
            suffix += 1
        x = ub[len(ub) - 1 - suffix]
        pos = vb.index(x)
        between = vb[pos + 1 : len(vb) - suffix]
        assert between, "x sits strictly earlier in the differing block"
        for y in between:
            lam = LambdaIdentity(
                tuple(_project_block(vblocks[i], x, y) for i in range(ell))
            )
            assert any(p != EMPTY for p in lam.prefixes), (
                "equal initial parts guarantee a nonempty prefix"
            )
            if lam not in seen:
                seen.add(lam)
                out.append(lam)
            i = vb.index(x)
            assert vb[i + 1] == y
            vb[i], vb[i + 1] = vb[i + 1], vb[i]
    return out


@dataclass(frozen=True)
class SigmaClass:
    """Position of a lambda identity in the alternating-squares chain."""

    finite: bool
    n: int | None  # None when infinite

    def identity(self) -> Identity:
        if not self.finite:
            return sigma_infinity()
        if self.n == 0:
            return parse_identity("x^2 y^2 = y^2 x^2")
        return sigma(self.n)

    def describe(self) -> str:
        if not self.finite:
            return "limit"
        return f"stage {self.n}"


def sigma_classify(lam: LambdaIdentity) -> SigmaClass:
    """Classify a lambda identity up to equivalence modulo the basis:
    drop empty prefixes, a two-square prefix means the limit identity,
    collapse adjacent equal squares, and swap variable roles so the leading
    square is x^2.  The survivors alternate; their count is the stage."""
    seq = [p for p in lam.prefixes if p != EMPTY]
    if any(p in _TWO_SQUARES for p in seq):
        return SigmaClass(finite=False, n=None)
    collapsed: list[Word] = []
    for p in seq:
        if not collapsed or collapsed[-1] != p:
            collapsed.append(p)
    if collapsed and collapsed[0] == _Y2:
        collapsed = [_Y2 if p == _X2 else _X2 for p in collapsed]
    return SigmaClass(finite=True, n=len(collapsed))
