"""Unipotency tests, kernel chains and Jordan block data.

All computations run the kernel-chain pullback, so they are exact over
any supported field and deterministic through pivot-order choices.
"""

from .errors import NotUnipotentError, ShapeError
from .linalg import Mat, Subspace, kernel

__all__ = [
    "unipotent_exponent",
    "kernel_chain",
    "jordan_blocks",
    "KernelChain",
    "JordanData",
    "jordan_matrix",
]


def unipotent_exponent(g):
    """Minimal n with (g-1)^n = 0, or None when g is not unipotent."""
    if not g.is_square():
        raise ShapeError("exponent of a non-square matrix")
    n = g.nrows
    nil = g - Mat.identity(g.field, n)
    power = Mat.identity(g.field, n)
    for e in range(n + 1):
        if power.is_zero():
            return e
        power = power @ nil
    return None


class KernelChain:
    """Ascending chain ker(g-1) < ker(g-1)^2 < ... = V."""

    __slots__ = ("g", "chain")

    def __init__(self, g, chain):
        self.g = g
        self.chain = tuple(chain)

    @property
    def exponent(self):
        return len(self.chain)

    def dims(self):
        return tuple(x.dim for x in self.chain)

    def __repr__(self):
        return f"KernelChain{self.dims()}"


def kernel_chain(g):
    """Full chain of kernels of powers of g-1 for unipotent g."""
    e = unipotent_exponent(g)
    if e is None:
        raise NotUnipotentError("matrix is not unipotent")
    nil = g - Mat.identity(g.field, g.nrows)
    chain = []
    power = nil
    for _ in range(e):
        chain.append(kernel(power))
        power = power @ nil
    for a, b in zip(chain, chain[1:]):
        assert b.contains(a) and a.dim < b.dim
    assert chain[-1].is_full()
    return KernelChain(g, chain)


class JordanData:
    """Jordan chains of a unipotent element.

    Each block is a tuple of vectors v_1, ..., v_d with v_j (g-1) =
    v_{j+1} and v_d (g-1) = 0; the change-of-basis matrix stacks all
    chain vectors and conjugates g to the standard unitriangular form.
    """

    __slots__ = ("blocks", "change_of_basis")

    def __init__(self, blocks, change_of_basis):
        self.blocks = tuple(tuple(chain) for chain in blocks)
        self.change_of_basis = change_of_basis

    @property
    def sizes(self):
        return tuple(len(chain) for chain in self.blocks)

    @property
    def num_blocks(self):
        return len(self.blocks)

    def vectors(self):
        return [v for chain in self.blocks for v in chain]

    def __repr__(self):
        return f"JordanData(sizes={self.sizes})"


def jordan_matrix(field, sizes):
    """Block diagonal unitriangular matrix with the given chain sizes."""
    n = sum(sizes)
    one, z = field.one, field.zero
    rows = [[z] * n for _ in range(n)]
    for i in range(n):
        rows[i][i] = one
    offset = 0
    for d in sizes:
        for j in range(d - 1):
            rows[offset + j][offset + j + 1] = one
        offset += d
    return Mat(field, rows)


def _chains_from_heads(nil, heads_by_height):
    chains = []
    for height, heads in heads_by_height:
        for head in heads:
            chain = [head]
            for _ in range(height - 1):
                chain.append(chain[-1] @ nil)
            assert (chain[-1] @ nil).is_zero()
            chains.append(chain)
    return chains


def jordan_chains(g, candidate_order=None):
    """Jordan chains via kernel-chain pullback.

    New chain heads at each height complete the span of the lower kernel
    and the already-mapped vectors; `candidate_order(height, kernel)` may
    supply the candidate vectors to prefer, falling back to the canonical
    kernel basis.
    """
    kc = kernel_chain(g)
    e = kc.exponent
    field = g.field
    n = g.nrows
    nil = g - Mat.identity(field, n)
    chains = []
    for height in range(e, 0, -1):
        base_rows = []
        if height >= 2:
            base_rows += [list(r) for r in kc.chain[height - 2].basis]
        for chain in chains:
            # element of this chain with the current height
            base_rows.append(list(chain[len(chain) - height].entries))
        span = Subspace.span(field, n, base_rows)
        target = kc.chain[height - 1]
        if candidate_order is not None:
            candidates = candidate_order(height, target)
        else:
            candidates = target.basis_vecs()
        new_heads = []
        for cand in candidates:
            if span.dim == target.dim:
                break
            if not target.contains_vec(cand):
                continue
            if span.contains_vec(cand):
                continue
            new_heads.append(cand)
            span = span.sum(Subspace.span(field, n, [cand.entries]))
        assert span.dim == target.dim, "kernel completion failed"
        for head in new_heads:
            chain = [head]
            for _ in range(height - 1):
                chain.append(chain[-1] @ nil)
            chains.append(chain)
    assert sum(len(c) for c in chains) == n
    chains.sort(key=lambda c: -len(c))
    return chains


def jordan_blocks(g):
    """JordanData of a unipotent g; raises NotUnipotentError otherwise."""
    chains = jordan_chains(g)
    return _finish_jordan(g, chains)


def _finish_jordan(g, chains):
    field = g.field
    n = g.nrows
    rows = [v.entries for chain in chains for v in chain]
    basis = Mat(field, rows, ncols=n)
    standard = basis @ g @ basis.inverse()
    sizes = [len(c) for c in chains]
    assert standard == jordan_matrix(field, sizes), "chain relations broken"
    e = max(sizes)
    assert len(chains) >= n // e
    return JordanData(chains, basis)
