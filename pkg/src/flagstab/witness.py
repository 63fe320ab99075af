"""Non-nilpotency witnesses for stabilizer elements with short exponent.

Given g in S(L) that stabilizes no short subseries and has small
unipotent exponent, the pipeline picks interleaved Jordan pairs along
the levels of L and produces h in S(L) with (h-1)^2 = 0 such that
(g g^h - 1)^(r-1) != 0 for r = floor((n-2)/k).  Every certificate is
re-verified by direct matrix powering before it is returned.
"""

from .errors import (
    AdaptationError,
    PreorderError,
    SelectionError,
    WitnessError,
)
from .linalg import Mat, Subspace, Vec, left_kernel_rows
from .series import Series, canonical_coarsening, in_stabilizer, is_adapted_basis
from .series import level_of as level
from .unipotent import jordan_chains, unipotent_exponent

__all__ = [
    "PreorderedBasis",
    "PairSelection",
    "WitnessCertificate",
    "level",
    "select_pairs",
    "validate_selection",
    "build_h",
    "construct_witness",
    "extend_witness",
    "invariant_core",
    "verify_witness",
    "adapted_jordan_chains",
]


class PreorderedBasis:
    """Finite preordered set, partitioned into blocks with level maps.

    Elements are 0..m-1.  `keys[e]` orders the preorder (ties allowed
    across blocks only) and `fvals[e]` is the value of the block's
    order-preserving injection into 1..n.  `k` is the largest block.
    """

    __slots__ = ("blocks", "fvals", "keys", "n", "k")

    def __init__(self, blocks, fvals, n, keys=None):
        self.blocks = tuple(tuple(b) for b in blocks)
        self.fvals = tuple(fvals)
        self.keys = tuple(keys) if keys is not None else self.fvals
        self.n = n
        self.k = max((len(b) for b in self.blocks), default=0)
        self._validate()

    @property
    def size(self):
        return len(self.fvals)

    def block_of(self, e):
        for i, b in enumerate(self.blocks):
            if e in b:
                return i
        raise PreorderError(f"element {e} is in no block")

    def _validate(self):
        m = self.size
        if len(self.keys) != m:
            raise PreorderError("keys and fvals disagree in length")
        seen = sorted(e for b in self.blocks for e in b)
        if seen != list(range(m)):
            raise PreorderError("blocks do not partition the element set")
        covered = set()
        for b in self.blocks:
            fs = [self.fvals[e] for e in b]
            if len(set(fs)) != len(fs):
                raise PreorderError("level map is not injective on a block")
            for x in b:
                for y in b:
                    if x == y:
                        continue
                    if self.keys[x] == self.keys[y]:
                        raise PreorderError("preorder ties inside a block")
                    if (self.keys[x] < self.keys[y]) != (self.fvals[x] < self.fvals[y]):
                        raise PreorderError("level map is not order-preserving")
            covered.update(fs)
        for f in covered:
            if not 1 <= f <= self.n:
                raise PreorderError("level value out of range")
        if covered != set(range(1, self.n + 1)):
            raise PreorderError("level images do not cover 1..n")
        for x in range(m):
            for y in range(m):
                if self.fvals[x] > self.fvals[y] and not self.keys[x] > self.keys[y]:
                    raise PreorderError("cross-block monotonicity fails")
        for a in range(2, self.n + 1):
            if not any(
                a in {self.fvals[e] for e in b} and a - 1 in {self.fvals[e] for e in b}
                for b in self.blocks
            ):
                raise PreorderError(f"no block carries the step {a-1} -> {a}")


class PairSelection:
    """Chosen pairs (x_l, y_l) with adjacent level values, one block each."""

    __slots__ = ("pairs",)

    def __init__(self, pairs):
        self.pairs = tuple(tuple(p) for p in pairs)

    @property
    def r(self):
        return len(self.pairs)

    def __iter__(self):
        return iter(self.pairs)

    def __repr__(self):
        return f"PairSelection(r={self.r})"


def validate_selection(pb, sel):
    """Independent checker for the three selection clauses."""
    r_expected = max(0, (pb.n - 2) // pb.k) if pb.k else 0
    if sel.r != r_expected:
        raise SelectionError(f"expected {r_expected} pairs, got {sel.r}")
    blocks_used = []
    for x, y, bi in sel.pairs:
        if x not in pb.blocks[bi] or y not in pb.blocks[bi]:
            raise SelectionError("pair does not lie in its block")
        if bi in blocks_used:
            raise SelectionError("block reused")
        blocks_used.append(bi)
        if pb.fvals[x] != pb.fvals[y] + 1:
            raise SelectionError("pair levels are not adjacent")
    for l in range(sel.r - 1):
        x_next = sel.pairs[l + 1][0]
        x_cur, y_cur = sel.pairs[l][0], sel.pairs[l][1]
        if not (pb.keys[x_next] < pb.keys[y_cur] < pb.keys[x_cur]):
            raise SelectionError("interleaving order fails")
    return True


def select_pairs(pb):
    """Greedy selection: take the top uncovered value, use a block
    carrying it together with its predecessor, retire that block's image.

    Ties between eligible blocks break to the lowest block index.
    """
    r = max(0, (pb.n - 2) // pb.k) if pb.k else 0
    by_block_f = [{pb.fvals[e]: e for e in b} for b in pb.blocks]
    covered = set()
    used = set()
    pairs = []
    for _ in range(r):
        d = max(v for v in range(1, pb.n + 1) if v not in covered)
        choice = None
        for bi, fmap in enumerate(by_block_f):
            if bi in used:
                continue
            if d in fmap and d - 1 in fmap:
                choice = bi
                break
        assert choice is not None, "greedy selection failed despite the clauses"
        fmap = by_block_f[choice]
        pairs.append((fmap[d], fmap[d - 1], choice))
        covered.update(fmap.keys())
        used.add(choice)
    sel = PairSelection(pairs)
    validate_selection(pb, sel)
    return sel


def _level_dependency(chains, s):
    """First level whose chain vectors are dependent modulo the member
    below; returns (support items, coefficients) or None."""
    items_by_level = {}
    for ci, chain in enumerate(chains):
        for j, v in enumerate(chain):
            items_by_level.setdefault(level(v, s), []).append((ci, j, v))
    for lvl in sorted(items_by_level):
        items = items_by_level[lvl]
        below = s.members[lvl]
        rows = [v.entries for (_, _, v) in items] + [list(r) for r in below.basis]
        got = Subspace.span(s.field, s.ambient_dim, rows)
        if got.dim == below.dim + len(items):
            continue
        # explicit dependency: kill the projections modulo `below`
        from .linalg import QuotientMap

        qm = QuotientMap(below, s.members[lvl - 1])
        proj = [qm.project(v).entries for (_, _, v) in items]
        for coeffs in left_kernel_rows(s.field, proj, qm.dim):
            support = [
                (ci, j, v, c)
                for (ci, j, v), c in zip(items, coeffs)
                if c != 0
            ]
            if support:
                return support
        raise AssertionError("rank drop without an explicit dependency")
    return None


def _apply_chain_move(chains, support, field):
    """Absorb a level dependency into one chain, keeping chain relations.

    The absorber must sit at the earliest position and carry the longest
    tail among the support; the move adds aligned shifted copies of the
    other chains, which keeps v_{j+1} = v_j (g-1) coherent.
    """
    star = None
    for cand in support:
        ci, j, _, _ = cand
        tail = len(chains[ci]) - j
        ok = True
        for other in support:
            oi, oj, _, _ = other
            otail = len(chains[oi]) - oj
            if oj < j or otail > tail:
                ok = False
                break
        if ok:
            star = cand
            break
    if star is None:
        raise AdaptationError("no valid absorbing chain for a level dependency")
    ci, j, _, c_star = star
    target = list(chains[ci])
    inv = field.inv(c_star)
    for oi, oj, _, c in support:
        if (oi, oj) == (ci, j):
            continue
        shift = oj - j
        lam = field.mul(c, inv)
        other = chains[oi]
        for m in range(len(target)):
            idx = m + shift
            if idx < len(other):
                target[m] = target[m] + other[idx].scale(lam)
    chains[ci] = target


def adapted_jordan_chains(g, s):
    """Jordan chains of g whose vectors form an s-adapted basis.

    Chain heads are preferred deep in the series; remaining level
    dependencies are absorbed by coherent chain moves.  Raises
    AdaptationError if no adapted system is reached.
    """

    def deep_first(height, target):
        cands = []
        seen = set()
        for member in reversed(s.members):
            inter = target.intersect(member)
            for row in inter.basis:
                if row not in seen:
                    seen.add(row)
                    cands.append(Vec(s.field, row))
        return cands

    chains = [list(c) for c in jordan_chains(g, candidate_order=deep_first)]
    chains = straighten_chains(chains, g, s)
    return chains


def straighten_chains(chains, g, s):
    """Absorb level dependencies until the chain vectors are s-adapted."""
    chains = [list(c) for c in chains]
    max_moves = 4 * s.ambient_dim * max(1, s.num_jumps)
    for _ in range(max_moves):
        dep = _level_dependency(chains, s)
        if dep is None:
            break
        _apply_chain_move(chains, dep, s.field)
    else:
        raise AdaptationError("level straightening did not converge")
    vecs = [v for chain in chains for v in chain]
    if not is_adapted_basis(vecs, s):
        raise AdaptationError("chains failed the adapted-basis check")
    nil = g - Mat.identity(g.field, g.nrows)
    for chain in chains:
        for a, b in zip(chain, chain[1:]):
            assert a @ nil == b
        assert (chain[-1] @ nil).is_zero()
    return chains


def _preordered_basis_from_chains(chains, s):
    n = s.num_jumps
    fvals = []
    blocks = []
    eid = 0
    for chain in chains:
        block = []
        for v in chain:
            fvals.append(n + 1 - level(v, s))
            block.append(eid)
            eid += 1
        blocks.append(block)
    try:
        return PreorderedBasis(blocks, fvals, n)
    except PreorderError as exc:
        raise AdaptationError(f"adapted chains violate a clause: {exc}") from exc


class WitnessCertificate:
    """Constructed h plus the exponent r and a verifying probe vector."""

    __slots__ = ("h", "r", "probe", "selection", "stronger_power_nonzero")

    def __init__(self, h, r, probe, selection, stronger_power_nonzero):
        self.h = h
        self.r = r
        self.probe = probe
        self.selection = selection
        self.stronger_power_nonzero = stronger_power_nonzero

    def __repr__(self):
        return f"WitnessCertificate(r={self.r})"


def build_h(sel, basis, s):
    """The square-zero stabilizer element sending y_l to y_l + x_{l+1}.

    `basis` lists the Jordan basis vectors that the selection indexes;
    every other basis vector is fixed.
    """
    seen_blocks = set()
    for _, _, bi in sel.pairs:
        if bi in seen_blocks:
            raise SelectionError("selection reuses a block")
        seen_blocks.add(bi)
    field = s.field
    n = s.ambient_dim
    basis = list(basis)
    if len(basis) != n:
        raise SelectionError("basis size differs from the ambient dimension")
    p = Mat.from_vecs(field, basis, ncols=n)
    coords = [[field.zero] * n for _ in range(n)]
    for i in range(n):
        coords[i][i] = field.one
    for l in range(sel.r - 1):
        y_cur = sel.pairs[l][1]
        x_next = sel.pairs[l + 1][0]
        coords[y_cur][x_next] = field.add(coords[y_cur][x_next], field.one)
    h = p.inverse() @ Mat(field, coords) @ p
    ident = Mat.identity(field, n)
    if not ((h - ident) @ (h - ident)).is_zero():
        raise WitnessError("h-square", "(h-1)^2 != 0; selection inconsistent")
    if not in_stabilizer(h, s):
        raise WitnessError(
            "h-not-in-stabilizer", "constructed h escapes the stabilizer"
        )
    return h


def _power_probe(m, r, candidates):
    """First candidate v with v @ m^(r-1) != 0, plus whether m^r != 0."""
    power = m.pow(r - 1) if r >= 1 else None
    probe = None
    for v in candidates:
        if not (v @ power).is_zero():
            probe = v
            break
    stronger = not (power @ m).is_zero()
    return probe, stronger


def construct_witness(g, s):
    """End-to-end witness for non-coarsenable g with small exponent.

    Preconditions, each reported separately: g stabilizes s, g
    stabilizes no proper subseries of s, and exponent(g) < n - 2 where
    n counts the jumps of s.
    """
    if not in_stabilizer(g, s):
        raise WitnessError("not-in-stabilizer", "g does not stabilize the series")
    n = s.num_jumps
    k = unipotent_exponent(g)
    assert k is not None
    coarse = canonical_coarsening(g, s)
    if len(coarse.members) < len(s.members):
        raise WitnessError("coarsenable", "g stabilizes a proper subseries")
    if not k < n - 2:
        raise WitnessError(
            "exponent-too-large", f"exponent {k} is not below n-2 = {n - 2}"
        )
    chains = adapted_jordan_chains(g, s)
    pb = _preordered_basis_from_chains(chains, s)
    sel = select_pairs(pb)
    basis = [v for chain in chains for v in chain]
    nil = g - Mat.identity(g.field, g.nrows)
    for x, y, _ in sel.pairs:
        assert basis[x] @ nil == basis[y], "pair is not a chain step"
    h = build_h(sel, basis, s)
    r = (n - 2) // k
    assert r == sel.r
    gg = g @ (h.inverse() @ g @ h)
    m = gg - Mat.identity(g.field, g.nrows)
    y1 = basis[sel.pairs[0][1]]
    probe, stronger = _power_probe(m, r, [y1] + basis)
    if probe is None:
        raise WitnessError("power-vanished", "(g g^h - 1)^(r-1) = 0 unexpectedly")
    cert = WitnessCertificate(h, r, probe, sel, stronger)
    assert verify_witness(g, s, cert)
    return cert


def verify_witness(g, s, cert):
    """Re-check a certificate by direct exact arithmetic."""
    ident = Mat.identity(g.field, g.nrows)
    try:
        if not in_stabilizer(cert.h, s):
            return False
    except Exception:
        return False
    if not ((cert.h - ident) @ (cert.h - ident)).is_zero():
        return False
    if cert.r < 1 or cert.probe.is_zero():
        return False
    gg = g @ (cert.h.inverse() @ g @ cert.h)
    power = (gg - ident).pow(cert.r - 1)
    return not (cert.probe @ power).is_zero()


def _series_split_complement(w, s):
    """Vectors completing w to V so that every member of s splits.

    Processes jumps from the deepest up, extending bottom + (top & w)
    to the top from the top's canonical basis.
    """
    field = s.field
    comp = []
    for jump in reversed(s.jumps()):
        current = jump.bottom.sum(jump.top.intersect(w))
        current = current.sum(Subspace.span(field, s.ambient_dim, [v.entries for v in comp]))
        for row in jump.top.basis:
            if not current.contains_vec(row):
                comp.append(Vec(field, row))
                current = current.sum(Subspace.span(field, s.ambient_dim, [row]))
    return comp


def invariant_core(g, s, n):
    """g-invariant subspace spanning n strict coarsening steps.

    Returns (core series of length n, core subspace W); one vector per
    step witnesses that the step cannot be skipped, and W collects their
    orbits under g - 1.
    """
    coarse = canonical_coarsening(g, s)
    if coarse.num_jumps < n:
        raise WitnessError(
            "coarsenable", f"g stabilizes a subseries of length {coarse.num_jumps} < {n}"
        )
    field = s.field
    dim = s.ambient_dim
    nil = g - Mat.identity(field, dim)
    zero = Subspace.zero(field, dim)
    core = Series(field, dim, list(coarse.members[:n]) + [zero])
    vs = []
    for i in range(1, n):
        target = core.members[i + 1]
        found = None
        for row in core.members[i - 1].basis:
            v = Vec(field, row)
            if not target.contains_vec(v @ nil):
                found = v
                break
        assert found is not None, "coarsening step lost its witness vector"
        vs.append(found)
    rows = []
    k = unipotent_exponent(g)
    for v in vs:
        cur = v
        for _ in range(k):
            rows.append(cur.entries)
            cur = cur @ nil
    return core, Subspace.span(field, dim, rows)


def extend_witness(g, s, n):
    """Witness through a finite-dimensional g-invariant core.

    Picks vectors realizing n strict coarsening steps, spans their
    g-orbit W, constructs the witness for the induced series inside W,
    and extends it by the identity on a complement of W that splits
    every member of s.  The certificate is verified on all of V.
    """
    if not in_stabilizer(g, s):
        raise WitnessError("not-in-stabilizer", "g does not stabilize the series")
    k = unipotent_exponent(g)
    assert k is not None
    if not k < n - 2:
        raise WitnessError(
            "exponent-too-large", f"exponent {k} is not below n-2 = {n - 2}"
        )
    field = s.field
    dim = s.ambient_dim
    ident = Mat.identity(field, dim)
    core, w = invariant_core(g, s, n)
    wb = w.basis_vecs()
    from .linalg import LinearSolver

    solver = LinearSolver(field, [v.entries for v in wb], dim)

    def coords(v):
        y = solver.solve(v)
        assert y is not None, "core subspace is not invariant"
        return y

    g_w = Mat(field, [coords(v @ g) for v in wb], ncols=w.dim)
    members_w = []
    for x in core.members:
        rows_w = [coords(Vec(field, r)) for r in x.intersect(w).basis]
        sub = Subspace.span(field, w.dim, rows_w)
        if sub not in members_w:
            members_w.append(sub)
    series_w = Series(field, w.dim, members_w)
    assert series_w.num_jumps == n, "induced series lost a jump"
    inner = construct_witness(g_w, series_w)
    # assemble h = t on W, identity on a splitting complement
    comp = _series_split_complement(w, s)
    p = Mat.from_vecs(field, wb + comp, ncols=dim)
    t = inner.h
    block = [[field.zero] * dim for _ in range(dim)]
    for i in range(w.dim):
        for j in range(w.dim):
            block[i][j] = t.rows[i][j]
    for i in range(w.dim, dim):
        block[i][i] = field.one
    h = p.inverse() @ Mat(field, block) @ p
    if not in_stabilizer(h, s):
        raise WitnessError("h-not-in-stabilizer", "extension escaped the stabilizer")
    r = (n - 2) // k
    probe_v = Vec(field, [field.zero] * dim)
    for c, v in zip(inner.probe.entries, wb):
        if c != 0:
            probe_v = probe_v + v.scale(c)
    gg = g @ (h.inverse() @ g @ h)
    m = gg - ident
    candidates = [probe_v] + wb
    probe, stronger = _power_probe(m, r, candidates)
    if probe is None:
        raise WitnessError("power-vanished", "(g g^h - 1)^(r-1) = 0 on V unexpectedly")
    cert = WitnessCertificate(h, r, probe, inner.selection, stronger)
    assert verify_witness(g, s, cert)
    return cert
