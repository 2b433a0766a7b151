"""Identity satisfaction, relatively free monoids, isoterms, membership.

Satisfaction is decided by exhaustive substitution with the Cayley table
applied as a vectorized gather over all assignments at once; the assignment
space is enumerated in mixed-radix order over the element order, variables
sorted lexicographically with the *first* variable most significant, and the
reported witness is always the first failing assignment in that order.

A *relatively free monoid* over a base monoid M on k generators is computed
as the monoid of evaluation maps: a word w in k variables is identified with
the tuple of its values under all n^k assignments, and the reachable tuples
are explored breadth-first (so each class representative is the shortlex
least word evaluating to it).  This powers both the isoterm certifier and
variety membership.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field
from typing import Iterable, Mapping, Sequence

import numpy as np

from .monoids import FiniteMonoid
from .words import EMPTY, Identity, Word

__all__ = [
    "DEFAULT_BUDGET",
    "BudgetExceededError",
    "RelFreeCapExceeded",
    "SatisfactionResult",
    "evaluate",
    "satisfies",
    "satisfies_all",
    "close_under_deletion",
    "RelFree",
    "rel_free",
    "IsotermBudget",
    "IsotermVerdict",
    "isoterm",
    "MemberVerdict",
    "member",
    "minimal_generating_set",
    "LQEquivalence",
    "lq_equiv_syntactic",
]

DEFAULT_BUDGET = 10_000_000


class BudgetExceededError(RuntimeError):
    """The substitution space exceeds the evaluation budget."""


class RelFreeCapExceeded(RuntimeError):
    """The relatively-free-monoid construction exceeds its caps."""


# ---------------------------------------------------------------------------
# Satisfaction
# ---------------------------------------------------------------------------


@dataclass
class SatisfactionResult:
    holds: bool
    witness: dict[str, str] | None = None
    lhs_value: str | None = None
    rhs_value: str | None = None
    checked: int = 0

    def __bool__(self) -> bool:
        return self.holds

    def witness_text(self) -> str:
        """Witness in ``x=b y=c`` form (variables in sorted order)."""
        if self.witness is None:
            return ""
        return " ".join(f"{v}={self.witness[v]}" for v in sorted(self.witness))


def evaluate(M: FiniteMonoid, word: Word, assignment: Mapping[str, str]) -> str:
    """Evaluate a word in M under a variable -> element-label assignment."""
    try:
        indices = [M.index(assignment[c]) for c in word.letters]
    except KeyError as exc:
        raise KeyError(f"assignment missing or bad for variable/element {exc}") from exc
    return M.elements[M.evaluate_indices(indices)]


def _assignment_columns(M: FiniteMonoid, variables: Sequence[str]) -> tuple[int, dict[str, np.ndarray]]:
    n = M.order
    k = len(variables)
    total = n ** k
    base = np.arange(total, dtype=np.int64)
    cols = {}
    for j, v in enumerate(variables):
        period = n ** (k - 1 - j)
        cols[v] = ((base // period) % n).astype(np.int32)
    return total, cols


def _run_word(M: FiniteMonoid, word: Word, total: int, cols: dict[str, np.ndarray]) -> np.ndarray:
    acc = np.full(total, M.require_identity(), dtype=np.int32)
    flat = M.flat
    n = M.order
    for c in word.letters:
        acc = flat[acc * n + cols[c]]
    return acc


def satisfies(M: FiniteMonoid, ident: Identity, *, budget: int = DEFAULT_BUDGET) -> SatisfactionResult:
    """Decide M |= ident by exhaustive substitution (vectorized).

    Raises BudgetExceededError when the assignment space n^k exceeds the
    budget.  On failure the witness is the first failing assignment in
    mixed-radix enumeration order (variables sorted, first most
    significant, element values in table order).
    """
    M.require_identity()
    variables = sorted(ident.variables())
    n = M.order
    total = n ** len(variables)
    if total > budget:
        raise BudgetExceededError(
            f"identity over {len(variables)} variables needs {total} "
            f"substitutions in {M.name or 'M'} (budget {budget})"
        )
    total, cols = _assignment_columns(M, variables)
    lhs = _run_word(M, ident.lhs, total, cols)
    rhs = _run_word(M, ident.rhs, total, cols)
    neq = lhs != rhs
    if not neq.any():
        return SatisfactionResult(holds=True, checked=total)
    first = int(np.argmax(neq))
    witness = {}
    k = len(variables)
    for j, v in enumerate(variables):
        period = n ** (k - 1 - j)
        witness[v] = M.elements[(first // period) % n]
    return SatisfactionResult(
        holds=False,
        witness=witness,
        lhs_value=M.elements[int(lhs[first])],
        rhs_value=M.elements[int(rhs[first])],
        checked=total,
    )


def satisfies_all(
    M: FiniteMonoid, idents: Iterable[Identity], *, budget: int = DEFAULT_BUDGET
) -> tuple[bool, list[SatisfactionResult]]:
    results = [satisfies(M, ident, budget=budget) for ident in idents]
    return all(r.holds for r in results), results


def close_under_deletion(idents: Iterable[Identity] | Identity) -> list[Identity]:
    """All identities obtained by deleting any subset of variables from the
    given ones (projecting both sides), trivial ones dropped, de-duplicated
    up to swapping sides, in deterministic shortlex order."""
    if isinstance(idents, Identity):
        idents = [idents]
    out: list[Identity] = []
    seen: set[frozenset] = set()
    for ident in idents:
        variables = sorted(ident.variables())
        for r in range(len(variables) + 1):
            for removed in itertools.combinations(variables, r):
                keep = set(variables) - set(removed)
                cand = Identity(ident.lhs.project(keep), ident.rhs.project(keep))
                if cand.is_trivial():
                    continue
                key = cand.unordered_key()
                if key not in seen:
                    seen.add(key)
                    out.append(cand)
    out.sort(key=lambda i: (i.lhs, i.rhs))
    return out


# ---------------------------------------------------------------------------
# Relatively free monoids (evaluation-tuple BFS)
# ---------------------------------------------------------------------------


@dataclass
class TupleConflict:
    """Two words with the same evaluation tuple in B but different tracked
    values in A; yields the separating identity for membership."""

    existing_word: Word
    new_word: Word
    existing_value: str
    new_value: str


@dataclass
class RelFree:
    base: FiniteMonoid
    generators: tuple[str, ...]
    complete: bool
    size: int
    transitions: np.ndarray  # (size, k) int32; -1 for unexpanded
    parent: np.ndarray  # (size,) int32; -1 at the root
    parent_letter: np.ndarray  # (size,) int32; -1 at the root
    conflict: TupleConflict | None = None
    tracked_values: np.ndarray | None = None

    def word_of(self, state: int) -> Word:
        letters: list[str] = []
        while state != 0:
            letters.append(self.generators[int(self.parent_letter[state])])
            state = int(self.parent[state])
        return Word(reversed(letters))

    def state_of(self, word: Word) -> int | None:
        state = 0
        gen_index = {g: i for i, g in enumerate(self.generators)}
        for c in word.letters:
            nxt = int(self.transitions[state, gen_index[c]])
            if nxt < 0:
                return None
            state = nxt
        return state

    def representative_words(self) -> list[Word]:
        return [self.word_of(s) for s in range(self.size)]


def rel_free(
    M: FiniteMonoid,
    k: int,
    *,
    generators: Sequence[str] | None = None,
    max_states: int = 300_000,
    max_dim: int = 20_000,
    track: FiniteMonoid | None = None,
    track_images: Sequence[str] | None = None,
    stop_on_conflict: bool = True,
) -> RelFree:
    """Build the monoid of k-variable evaluation maps over M.

    States are evaluation tuples in M^(n^k); the BFS from the identity tuple
    follows right multiplication by the generators, so state representatives
    are shortlex-minimal.  With ``track``/``track_images`` every state also
    carries the value of its representative word in the tracked monoid
    under generator i -> track_images[i]; the first tuple collision with a
    differing tracked value is reported as a conflict.

    Raises RelFreeCapExceeded if the tuple dimension n^k exceeds ``max_dim``.
    Returns ``complete=False`` (with whatever was found) if the state count
    would exceed ``max_states``.
    """
    e = M.require_identity()
    n = M.order
    if n > 255:
        raise RelFreeCapExceeded("base monoid too large for uint8 tuples")
    dim = n ** k
    if dim > max_dim:
        raise RelFreeCapExceeded(
            f"evaluation tuples have dimension {n}^{k} = {dim} > max_dim {max_dim}"
        )
    gen_names = tuple(generators) if generators is not None else tuple(
        f"x{i + 1}" for i in range(k)
    )
    if len(gen_names) != k:
        raise ValueError("generator name list must have length k")

    base = np.arange(dim, dtype=np.int64)
    gen_cols = []
    for j in range(k):
        period = n ** (k - 1 - j)
        gen_cols.append(((base // period) % n).astype(np.int32))
    flat = M.flat

    tracked = None
    images = None
    if track is not None:
        track.require_identity()
        if track_images is None or len(track_images) != k:
            raise ValueError("track_images must give one element of `track` per generator")
        images = [track.index(lbl) for lbl in track_images]
        tracked = [track.identity]

    root = np.full(dim, e, dtype=np.uint8)
    vectors: list[np.ndarray] = [root]
    index: dict[bytes, int] = {root.tobytes(): 0}
    parent = [-1]
    parent_letter = [-1]
    transitions: list[list[int]] = [[-1] * k]
    conflict: TupleConflict | None = None
    complete = True

    head = 0
    while head < len(vectors):
        cur = vectors[head]
        cur32 = cur.astype(np.int32) * n
        for j in range(k):
            nxt = flat[cur32 + gen_cols[j]].astype(np.uint8)
            key = nxt.tobytes()
            found = index.get(key)
            if found is None:
                if len(vectors) >= max_states:
                    complete = False
                    transitions[head][j] = -1
                    continue
                idx = len(vectors)
                index[key] = idx
                vectors.append(nxt)
                parent.append(head)
                parent_letter.append(j)
                transitions.append([-1] * k)
                transitions[head][j] = idx
                if tracked is not None:
                    tracked.append(int(track.table[tracked[head], images[j]]))
            else:
                transitions[head][j] = found
                if tracked is not None and conflict is None:
                    new_val = int(track.table[tracked[head], images[j]])
                    if new_val != tracked[found]:
                        rf_tmp = RelFree(
                            base=M,
                            generators=gen_names,
                            complete=False,
                            size=len(vectors),
                            transitions=np.array(transitions, dtype=np.int32),
                            parent=np.array(parent, dtype=np.int32),
                            parent_letter=np.array(parent_letter, dtype=np.int32),
                        )
                        conflict = TupleConflict(
                            existing_word=rf_tmp.word_of(found),
                            new_word=rf_tmp.word_of(head) * Word((gen_names[j],)),
                            existing_value=track.elements[tracked[found]],
                            new_value=track.elements[new_val],
                        )
                        if stop_on_conflict:
                            rf_tmp.conflict = conflict
                            return rf_tmp
        head += 1

    return RelFree(
        base=M,
        generators=gen_names,
        complete=complete,
        size=len(vectors),
        transitions=np.array(transitions, dtype=np.int32),
        parent=np.array(parent, dtype=np.int32),
        parent_letter=np.array(parent_letter, dtype=np.int32),
        conflict=conflict,
        tracked_values=np.array(tracked, dtype=np.int32) if tracked is not None else None,
    )


# ---------------------------------------------------------------------------
# Isoterm decision
# ---------------------------------------------------------------------------


@dataclass
class IsotermBudget:
    substitution_budget: int = DEFAULT_BUDGET
    enum_words: int = 200_000
    enum_extra_length: int = 1
    small_length: int = 12
    anagram_cap: int = 200_000
    max_states: int = 300_000
    max_dim: int = 20_000


@dataclass
class IsotermVerdict:
    kind: str  # "not_isoterm" | "certified" | "bounded_only"
    word: Word
    witness: Word | None = None
    bound: int | None = None
    details: dict = field(default_factory=dict)


def _equivalence_scan(
    M: FiniteMonoid, w: Word, candidates: Iterable[Word], *, budget: int
) -> Word | None:
    """First candidate != w with M |= w = candidate, else None.

    All candidates must use only variables of w; the assignment columns and
    the left-hand values are computed once and reused.
    """
    variables = sorted(w.content())
    n = M.order
    if n ** len(variables) > budget:
        raise BudgetExceededError("isoterm scan over budget")
    total, cols = _assignment_columns(M, variables)
    w_vals = _run_word(M, w, total, cols)
    flat = M.flat
    e = M.require_identity()
    for cand in candidates:
        if cand == w:
            continue
        acc = np.full(total, e, dtype=np.int32)
        for c in cand.letters:
            acc = flat[acc * n + cols[c]]
        if bool(np.array_equal(acc, w_vals)):
            return cand
    return None


def _perturbations(w: Word) -> list[Word]:
    """Adjacent transpositions, single-letter deletions, duplications."""
    letters = w.letters
    out: set[Word] = set()
    for i in range(len(letters) - 1):
        if letters[i] != letters[i + 1]:
            swapped = letters[:i] + (letters[i + 1], letters[i]) + letters[i + 2 :]
            out.add(Word(swapped))
    for i in range(len(letters)):
        out.add(Word(letters[:i] + letters[i + 1 :]))
        out.add(Word(letters[: i + 1] + letters[i:]))
    out.discard(w)
    return sorted(out)


def _anagram_witness(M: FiniteMonoid, w: Word, budget: IsotermBudget) -> Word | None:
    """Search same-multiset rearrangements of w for an M-equivalent word.

    Candidates are pruned by two-variable projections: the projection of a
    satisfied identity onto any variable pair is satisfied (delete the other
    variables), so any rearrangement whose pair projection is not
    M-equivalent to w's pair projection can be discarded prefix-first.
    Surviving candidates are verified in full.
    """
    counts = w.occurrences()
    letters = sorted(counts)
    if len(letters) < 2:
        return None
    perm_count = math.factorial(len(w))
    for c in counts.values():
        perm_count //= math.factorial(c)
    if perm_count > budget.anagram_cap:
        return None

    pairs = list(itertools.combinations(letters, 2))
    pair_id = {p: i for i, p in enumerate(pairs)}
    # For every pair: all M-equivalent same-multiset rearrangements of the
    # pair projection, stored as prefix sets of bitmasks (bit 1 = second
    # letter of the pair, appended at the bit position = length so far).
    allowed_prefixes: list[list[set[int]]] = []
    for a, b in pairs:
        proj = w.project({a, b})
        na, nb = counts[a], counts[b]
        length = na + nb
        arrangements: list[Word] = []
        for positions in itertools.combinations(range(length), nb):
            pos_set = set(positions)
            arrangements.append(Word(b if i in pos_set else a for i in range(length)))
        good: list[int] = []
        ok = _equivalence_scan_all(M, proj, arrangements, budget.substitution_budget)
        for arr, equivalent in zip(arrangements, ok):
            if equivalent:
                mask = 0
                for i, c in enumerate(arr.letters):
                    if c == b:
                        mask |= 1 << i
                good.append(mask)
        prefixes: list[set[int]] = [set() for _ in range(length + 1)]
        low_masks = [(1 << i) - 1 for i in range(length + 1)]
        for mask in good:
            for ell in range(length + 1):
                prefixes[ell].add(mask & low_masks[ell])
        allowed_prefixes.append(prefixes)

    # DFS over positions, maintaining per-pair (count, mask).
    remaining = dict(counts)
    pair_state = {p: (0, 0) for p in pairs}
    prefix: list[str] = []
    survivors: list[Word] = []
    survivor_cap = 4096

    def rec() -> bool:
        if len(survivors) >= survivor_cap:
            return True
        if not any(remaining[c] for c in letters):
            cand = Word(prefix)
            if cand != w:
                survivors.append(cand)
            return False
        for c in letters:
            if not remaining[c]:
                continue
            updates = []
            feasible = True
            for p in pairs:
                if c not in p:
                    continue
                cnt, mask = pair_state[p]
                new_mask = mask | (1 << cnt) if c == p[1] else mask
                if new_mask not in allowed_prefixes[pair_id[p]][cnt + 1]:
                    feasible = False
                    break
                updates.append((p, (cnt + 1, new_mask)))
            if not feasible:
                continue
            saved = [(p, pair_state[p]) for p, _ in updates]
            for p, st in updates:
                pair_state[p] = st
            remaining[c] -= 1
            prefix.append(c)
            stop = rec()
            prefix.pop()
            remaining[c] += 1
            for p, st in saved:
                pair_state[p] = st
            if stop:
                return True
        return False

    rec()
    if not survivors:
        return None
    return _equivalence_scan(M, w, sorted(survivors), budget=budget.substitution_budget)


def _equivalence_scan_all(
    M: FiniteMonoid, w: Word, candidates: Sequence[Word], budget: int
) -> list[bool]:
    """Vector of M |= w = candidate over a shared assignment space."""
    var_set = set(w.content())
    for c in candidates:
        var_set |= c.content()
    variables = sorted(var_set)
    if M.order ** len(variables) > budget:
        raise BudgetExceededError("pair-class scan over budget")
    total, cols = _assignment_columns(M, variables)
    w_vals = _run_word(M, w, total, cols)
    out = []
    for cand in candidates:
        vals = _run_word(M, cand, total, cols)
        out.append(bool(np.array_equal(vals, w_vals)))
    return out


def _exhaustive_witness(
    M: FiniteMonoid, w: Word, budget: IsotermBudget
) -> tuple[Word | None, int]:
    """Scan all words over content(w) by length; returns (witness, bound)
    where bound is the largest length fully scanned."""
    letters = sorted(w.content())
    k = len(letters)
    max_len = min(len(w) + budget.enum_extra_length, budget.small_length)
    bound = -1
    cumulative = 0
    for ell in range(0, max_len + 1):
        count = k ** ell if k else (1 if ell == 0 else 0)
        if count == 0 and ell > 0:
            break
        cumulative += count
        if cumulative > budget.enum_words:
            break
        cands = (Word(t) for t in itertools.product(letters, repeat=ell))
        hit = _equivalence_scan(M, w, cands, budget=budget.substitution_budget)
        if hit is not None:
            return hit, bound
        bound = ell
    return None, bound


def isoterm(M: FiniteMonoid, w: Word, *, budget: IsotermBudget | None = None) -> IsotermVerdict:
    """Decide whether w is an isoterm for M (no nontrivial identity with w
    on one side holds in M).

    Returns NotIsoterm with a verified witness word, Certified (via the
    relatively free monoid on content(w): the class of w is a singleton),
    or BoundedOnly with the exhaustively scanned length bound.  The
    certifier requires M to have a zero element so that any word equal to w
    under M must use exactly w's variables (substituting the zero for a
    missing/extra variable would otherwise escape the class).
    """
    budget = budget or IsotermBudget()
    M.require_identity()
    details: dict = {}

    hit = _equivalence_scan(M, w, _perturbations(w), budget=budget.substitution_budget)
    if hit is not None:
        return IsotermVerdict("not_isoterm", w, witness=hit, details={"phase": "perturbations"})

    anagram_hit = _anagram_witness(M, w, budget)
    if anagram_hit is not None:
        return IsotermVerdict("not_isoterm", w, witness=anagram_hit, details={"phase": "anagrams"})

    exhaustive_hit, bound = _exhaustive_witness(M, w, budget)
    if exhaustive_hit is not None:
        return IsotermVerdict("not_isoterm", w, witness=exhaustive_hit, details={"phase": "exhaustive"})
    details["exhausted_length"] = bound

    # Certifier via the relatively free monoid on content(w).
    zero = M.zero_index()
    if zero is None or zero == M.identity:
        details["certifier"] = "skipped: base monoid has no proper zero"
        return IsotermVerdict("bounded_only", w, bound=bound, details=details)
    gens = tuple(sorted(w.content()))
    try:
        rf = rel_free(
            M, len(gens), generators=gens,
            max_states=budget.max_states, max_dim=budget.max_dim,
        )
    except RelFreeCapExceeded as exc:
        details["certifier"] = f"skipped: {exc}"
        return IsotermVerdict("bounded_only", w, bound=bound, details=details)
    if not rf.complete:
        details["certifier"] = "skipped: state cap reached"
        return IsotermVerdict("bounded_only", w, bound=bound, details=details)
    details["free_monoid_size"] = rf.size

    target = rf.state_of(w)
    assert target is not None
    try:
        witness = _second_word_in_class(rf, target, w)
    except RelFreeCapExceeded as exc:
        details["certifier"] = f"skipped: {exc}"
        return IsotermVerdict("bounded_only", w, bound=bound, details=details)
    if witness is None:
        details["certifier"] = "class of w is a singleton"
        return IsotermVerdict("certified", w, details=details)
    check = satisfies(M, Identity(w, witness), budget=budget.substitution_budget)
    assert check.holds, "certifier produced a bad witness"
    details["certifier"] = "class of w contains other words"
    return IsotermVerdict("not_isoterm", w, witness=witness, details=details)


def _second_word_in_class(rf: RelFree, target: int, w: Word) -> Word | None:
    """A word other than w whose evaluation tuple is rf's target state, or
    None if the class is exactly {w}.

    Class words correspond to root-to-target paths through the trimmed
    automaton (states that can still reach the target; every state is
    reachable by construction).  If the trimmed part is acyclic the paths
    are streamed in lexicographic order — every descent step lies on some
    complete path, so the first two emissions cost O(path length).  A cycle
    in the trimmed part makes the class infinite; a bounded per-length count
    then locates a second word.

    Raises RelFreeCapExceeded if the cyclic-case scan exceeds its step cap.
    """
    k = len(rf.generators)
    size = rf.size
    trans = rf.transitions

    rev: list[list[int]] = [[] for _ in range(size)]
    for s in range(size):
        for j in range(k):
            t = int(trans[s, j])
            if t >= 0:
                rev[t].append(s)
    co = np.zeros(size, dtype=bool)
    stack = [target]
    co[target] = True
    while stack:
        s = stack.pop()
        for p in rev[s]:
            if not co[p]:
                co[p] = True
                stack.append(p)

    # cycle detection restricted to trimmed states (iterative DFS colors)
    WHITE, GRAY, BLACK = 0, 1, 2
    color = np.zeros(size, dtype=np.int8)
    cyclic = False
    for start in range(size):
        if not co[start] or color[start] != WHITE:
            continue
        stack2: list[tuple[int, int]] = [(start, 0)]
        color[start] = GRAY
        while stack2 and not cyclic:
            s, j = stack2[-1]
            if j == k:
                color[s] = BLACK
                stack2.pop()
                continue
            stack2[-1] = (s, j + 1)
            t = int(trans[s, j])
            if t < 0 or not co[t]:
                continue
            if color[t] == GRAY:
                cyclic = True
            elif color[t] == WHITE:
                color[t] = GRAY
                stack2.append((t, 0))
        if cyclic:
            break

    if not cyclic:
        # stream root-to-target paths in lexicographic order; need at most two
        emitted: list[Word] = []
        path: list[str] = []
        stack3: list[tuple[int, int]] = [(0, 0)]
        if target == 0:
            emitted.append(EMPTY)
        while stack3 and len(emitted) < 2:
            s, j = stack3[-1]
            if j == k:
                stack3.pop()
                if path:
                    path.pop()
                continue
            stack3[-1] = (s, j + 1)
            t = int(trans[s, j])
            if t < 0 or not co[t]:
                continue
            path.append(rf.generators[j])
            if t == target:
                emitted.append(Word(path))
                if len(emitted) >= 2:
                    break
            stack3.append((t, 0))
        for cand in emitted:
            if cand != w:
                return cand
        return None

    # cyclic: the class is infinite; find the least length != |w| (or = |w|
    # with a second word) carrying a class word, by saturated counting
    src_l, dst_l = [], []
    for s in range(size):
        if not co[s]:
            continue
        for j in range(k):
            t = int(trans[s, j])
            if t >= 0 and co[t]:
                src_l.append(s)
                dst_l.append(t)
    src = np.array(src_l, dtype=np.int64)
    dst = np.array(dst_l, dtype=np.int64)
    max_steps = min(len(w) + 3 * size + 2, 200_000)
    cnt = np.zeros(size, dtype=np.int64)
    cnt[0] = 1
    want = None
    if target == 0 and len(w) != 0:
        want = 0
    ell = 0
    while want is None and ell < max_steps:
        nxt = np.zeros(size, dtype=np.int64)
        np.add.at(nxt, dst, cnt[src])
        cnt = np.minimum(nxt, 4)
        ell += 1
        c = int(cnt[target])
        if c and (ell != len(w) or c >= 2):
            want = ell
    if want is None:
        raise RelFreeCapExceeded("cyclic class scan exceeded step cap")

    # backward table: reach[r, s] == state s reaches target in exactly r steps
    reach = np.zeros((want + 1, size), dtype=bool)
    reach[0, target] = True
    for r in range(1, want + 1):
        row = np.zeros(size, dtype=bool)
        np.logical_or.at(row, src, reach[r - 1][dst])
        reach[r] = row

    # greedy lex-least extraction with backtracking only along w's prefix
    skip = w.letters if want == len(w) else None
    acc: list[str] = []
    frames: list[tuple[int, int]] = [(0, 0)]
    while frames:
        s, j = frames[-1]
        r = want - len(acc)
        if r == 0:
            if skip is None or tuple(acc) != skip:
                return Word(acc)
            frames.pop()
            if acc:
                acc.pop()
            continue
        if j == k:
            frames.pop()
            if acc:
                acc.pop()
            continue
        frames[-1] = (s, j + 1)
        t = int(trans[s, j])
        if t < 0 or not reach[r - 1, t]:
            continue
        acc.append(rf.generators[j])
        frames.append((t, 0))
    return None


# ---------------------------------------------------------------------------
# Variety membership
# ---------------------------------------------------------------------------


def minimal_generating_set(M: FiniteMonoid) -> tuple[str, ...]:
    """Smallest generating set (as a monoid), deterministic: smallest size
    first, then the lexicographically earliest index combination."""
    e = M.require_identity()
    n = M.order
    candidates = [i for i in range(n) if i != e]

    def generates(combo: tuple[int, ...]) -> bool:
        closed = {e, *combo}
        frontier = list(closed)
        while frontier:
            new = []
            for i in list(closed):
                for j in frontier:
                    for p in (int(M.table[i, j]), int(M.table[j, i])):
                        if p not in closed:
                            closed.add(p)
                            new.append(p)
            frontier = new
        return len(closed) == n

    for size in range(0, len(candidates) + 1):
        for combo in itertools.combinations(candidates, size):
            if generates(combo):
                return tuple(M.elements[i] for i in combo)
    raise AssertionError("unreachable: full candidate set always generates")


@dataclass
class MemberVerdict:
    kind: str  # "member" | "not_member" | "unknown"
    witness: Identity | None = None
    details: dict = field(default_factory=dict)

    def __bool__(self) -> bool:
        return self.kind == "member"


def member(
    A: FiniteMonoid,
    B: FiniteMonoid,
    *,
    max_states: int = 300_000,
    max_dim: int = 20_000,
    fallback_max_vars: int = 3,
    fallback_max_length: int = 6,
    budget: int = DEFAULT_BUDGET,
) -> MemberVerdict:
    """Decide whether A lies in the variety generated by B.

    Route: take a minimal generating set a_1..a_k of A and build the
    relatively free monoid of B's variety on k generators while tracking
    the A-value of every representative word under x_i -> a_i.  A tuple
    collision with different A-values yields an identity of B's variety
    that A fails (NotMember, witness re-verifiable).  Completion without
    conflict proves the assignment x_i -> a_i factors through the free
    object, i.e. A is a quotient of a submonoid of a power of B (Member).
    Cap overflow falls back to a bounded identity search; if that also
    finds nothing the verdict is Unknown.
    """
    A.require_identity()
    B.require_identity()
    gens = minimal_generating_set(A)
    k = len(gens)
    details: dict = {"generators": list(gens)}
    try:
        rf = rel_free(
            B, k, max_states=max_states, max_dim=max_dim,
            track=A, track_images=gens,
        )
    except RelFreeCapExceeded as exc:
        details["relfree"] = f"capped: {exc}"
        rf = None
    if rf is not None and rf.conflict is not None:
        c = rf.conflict
        witness = Identity(c.existing_word, c.new_word)
        holds_b = satisfies(B, witness, budget=budget)
        holds_a = satisfies(A, witness, budget=budget)
        assert holds_b.holds and not holds_a.holds, "membership witness failed re-verification"
        details["a_values"] = (c.existing_value, c.new_value)
        return MemberVerdict("not_member", witness=witness, details=details)
    if rf is not None and rf.complete:
        details["free_monoid_size"] = rf.size
        return MemberVerdict("member", details=details)
    if rf is not None:
        details["relfree"] = "state cap reached"

    found = _bounded_identity_search(
        A, B, max_vars=fallback_max_vars, max_length=fallback_max_length, budget=budget
    )
    if found is not None:
        return MemberVerdict("not_member", witness=found, details=details)
    return MemberVerdict("unknown", details=details)


def _bounded_identity_search(
    A: FiniteMonoid, B: FiniteMonoid, *, max_vars: int, max_length: int, budget: int
) -> Identity | None:
    """First identity (in shortlex word order) over up to max_vars variables
    and sides up to max_length that holds in B and fails in A."""
    for nvars in range(1, max_vars + 1):
        variables = [f"x{i+1}" for i in range(nvars)]
        if B.order ** nvars > budget or A.order ** nvars > budget:
            break
        total_b, cols_b = _assignment_columns(B, variables)
        total_a, cols_a = _assignment_columns(A, variables)
        words: list[Word] = []
        for ell in range(0, max_length + 1):
            words.extend(Word(t) for t in itertools.product(variables, repeat=ell))
        buckets: dict[bytes, tuple[Word, bytes]] = {}
        for word in words:
            if word.content() != set(variables) and len(word.content()) < nvars:
                # only consider words using all nvars variables; fewer-variable
                # identities were covered at smaller nvars
                continue
            vb = _run_word(B, word, total_b, cols_b).astype(np.int32).tobytes()
            va = _run_word(A, word, total_a, cols_a).astype(np.int32).tobytes()
            if vb in buckets:
                w0, va0 = buckets[vb]
                if va0 != va:
                    return Identity(w0, word)
            else:
                buckets[vb] = (word, va)
    return None


# ---------------------------------------------------------------------------
# Syntactic equivalence criteria
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class LQEquivalence:
    """Results of the two syntactic criteria for canonical words: block
    structure equivalence (the Q^1 criterion) and initial-part equality
    (the L2^1 criterion)."""

    q_equivalent: bool
    l_equivalent: bool


def lq_equiv_syntactic(u: Word, v: Word) -> LQEquivalence:
    """Syntactic equivalence tests used for canonical words.

    The Q^1 criterion requires both words to be canonical (raises ValueError
    otherwise): same separator sequence and same per-block content.  The
    L2^1 criterion is initial-part equality and applies to any words.
    """
    from .deduction import canonical_decomposition

    du = canonical_decomposition(u)
    dv = canonical_decomposition(v)
    if du is None or dv is None:
        raise ValueError("lq_equiv_syntactic needs canonical words")
    q_ok = (
        du.separators == dv.separators
        and len(du.blocks) == len(dv.blocks)
        and all(set(x) == set(y) for x, y in zip(du.blocks, dv.blocks))
    )
    l_ok = u.initial_part() == v.initial_part()
    return LQEquivalence(q_equivalent=q_ok, l_equivalent=l_ok)
