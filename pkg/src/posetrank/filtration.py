"""Simplicial complexes, poset-indexed filtrations, and their unfolding.

Simplices are tuples of strictly increasing non-negative vertex ids; chains
are dicts mapping simplices to nonzero field coefficients.  A ``PFiltration``
attaches a complex to every poset point, monotone along the order; unfolding
copies complexes along the folding map and expands each zigzag step into an
ordered list of single-simplex insertions or deletions.
"""

from __future__ import annotations

from itertools import combinations

from .errors import InputError, ValidationError
from .fplinalg import FieldSpec, GF2
from .poset import Poset, ZigzagPoset

__all__ = [
    "Simplex",
    "simplex",
    "faces",
    "closure",
    "chain_add",
    "chain_scale",
    "chain_boundary",
    "SimplicialComplex",
    "PFiltration",
    "SizeStats",
    "ZigzagFiltration",
    "validate_filtration",
    "size_stats",
    "unfold_filtration",
    "cone",
]

Simplex = tuple  # tuple of strictly increasing vertex ids


def simplex(vertices) -> Simplex:
    """Canonicalize a vertex collection into a simplex tuple."""
    vs = tuple(sorted(int(v) for v in vertices))
    if not vs:
        raise InputError("a simplex needs at least one vertex")
    if any(v < 0 for v in vs):
        raise InputError("vertex ids must be non-negative")
    for a, b in zip(vs, vs[1:]):
        if a == b:
            raise InputError(f"repeated vertex {a} in simplex")
    return vs


def faces(s: Simplex):
    """Codimension-1 faces of ``s`` (empty for vertices)."""
    if len(s) == 1:
        return []
    return [s[:i] + s[i + 1 :] for i in range(len(s))]


def closure(simplices):
    """All faces of all given simplices, of every dimension."""
    out = set()
    for s in simplices:
        for k in range(1, len(s) + 1):
            out.update(combinations(s, k))
    return out


def chain_add(a: dict, b: dict, field: FieldSpec, coeff: int = 1) -> dict:
    """Return ``a + coeff * b`` as a canonical chain (zero entries dropped)."""
    p = field.p
    out = dict(a)
    for s, c in b.items():
        v = (out.get(s, 0) + coeff * c) % p
        if v:
            out[s] = v
        else:
            out.pop(s, None)
    return out


def chain_scale(a: dict, coeff: int, field: FieldSpec) -> dict:
    p = field.p
    coeff %= p
    if coeff == 0:
        return {}
    return {s: (c * coeff) % p for s, c in a.items()}


def chain_boundary(ch: dict, field: FieldSpec) -> dict:
    """Signed simplicial boundary of a chain."""
    p = field.p
    out: dict = {}
    for s, c in ch.items():
        for i in range(len(s)):
            f = s[:i] + s[i + 1 :]
            if not f:
                continue
            sign = 1 if i % 2 == 0 else p - 1
            v = (out.get(f, 0) + c * sign) % p
            if v:
                out[f] = v
            else:
                out.pop(f, None)
    return out


class SimplicialComplex:
    """A finite simplicial complex, stored as a frozen set of simplices."""

    __slots__ = ("simplices", "_by_dim")

    def __init__(self, simplices=()):
        self.simplices = frozenset(simplex(s) for s in simplices)
        self._by_dim = None

    @classmethod
    def from_closure(cls, top_simplices) -> "SimplicialComplex":
        """The complex generated by the given simplices and all their faces."""
        return cls(closure(simplex(s) for s in top_simplices))

    def _dims(self):
        if self._by_dim is None:
            by_dim: dict = {}
            for s in self.simplices:
                by_dim.setdefault(len(s) - 1, []).append(s)
            self._by_dim = {d: sorted(v) for d, v in by_dim.items()}
        return self._by_dim

    def k_simplices(self, k: int):
        """Sorted list of k-dimensional simplices."""
        if k < 0:
            return []
        return self._dims().get(k, [])

    @property
    def dimension(self) -> int:
        return max((len(s) - 1 for s in self.simplices), default=-1)

    def __contains__(self, s):
        return tuple(s) in self.simplices

    def __len__(self):
        return len(self.simplices)

    def __le__(self, other):
        return self.simplices <= other.simplices

    def __eq__(self, other):
        return isinstance(other, SimplicialComplex) and other.simplices == self.simplices

    def __hash__(self):
        return hash(self.simplices)

    def missing_face(self):
        """A witness (simplex, face) pair violating face closure, or None."""
        for s in sorted(self.simplices):
            for f in faces(s):
                if f not in self.simplices:
                    return (s, f)
        return None

    def union(self, other) -> "SimplicialComplex":
        return SimplicialComplex(self.simplices | other.simplices)

    def max_vertex(self) -> int:
        return max((s[-1] for s in self.simplices), default=-1)

    def __repr__(self):
        return f"SimplicialComplex({sorted(self.simplices)})"


class PFiltration:
    """Simplicial complexes attached to poset points, monotone along edges."""

    __slots__ = ("poset", "complexes", "degree")

    def __init__(self, poset: Poset, complexes: dict, degree: int = 1):
        self.poset = poset
        self.complexes = {
            str(p): (c if isinstance(c, SimplicialComplex) else SimplicialComplex(c))
            for p, c in complexes.items()
        }
        for p in poset.points:
            self.complexes.setdefault(p, SimplicialComplex())
        if degree < 0:
            raise InputError("homology degree must be non-negative")
        self.degree = int(degree)

    @classmethod
    def from_birth_sets(cls, poset: Poset, births: dict, degree: int = 1) -> "PFiltration":
        """Build per-point complexes from birth sets inherited along edges.

        ``births[p]`` lists the simplices first appearing at ``p``; the complex
        at ``q`` is the face closure of everything born at any ``p <= q``.
        """
        order = poset.topological_order()
        acc = {p: set() for p in poset.points}
        births = {str(p): {simplex(s) for s in v} for p, v in births.items()}
        for p in order:
            own = set(births.get(p, set()))
            for r in poset.predecessors(p):
                own |= acc[r]
            acc[p] = own
        return cls(poset, {p: SimplicialComplex(closure(acc[p])) for p in poset.points}, degree)

    def complex_at(self, p) -> SimplicialComplex:
        return self.complexes[str(p)]

    def __repr__(self):
        sizes = {p: len(self.complexes[p]) for p in self.poset.points}
        return f"PFiltration(degree={self.degree}, sizes={sizes})"


def validate_filtration(f: PFiltration):
    """Return ``None`` if valid, else a diagnostic naming the first violation."""
    from .poset import validate_poset

    diag = validate_poset(f.poset)
    if diag is not None:
        return f"poset: {diag}"
    for p in f.poset.points:
        witness = f.complexes[p].missing_face()
        if witness is not None:
            s, face = witness
            return f"complex at {p} is not face-closed: {s} lacks face {face}"
    for p, q in f.poset.edges:
        extra = f.complexes[p].simplices - f.complexes[q].simplices
        if extra:
            s = sorted(extra)[0]
            return f"not monotone along edge ({p}, {q}): simplex {s} disappears"
    return None


def require_valid_filtration(f: PFiltration):
    diag = validate_filtration(f)
    if diag is not None:
        raise ValidationError(diag)


class SizeStats:
    """Input-size accounting: poset size m, insertion total e, t = max(m, e)."""

    __slots__ = ("m", "e", "t", "n")

    def __init__(self, m: int, e: int, n: int):
        self.m = m
        self.e = e
        self.t = max(m, e)
        self.n = n

    def __repr__(self):
        return f"SizeStats(m={self.m}, e={self.e}, t={self.t}, n={self.n})"

    def __eq__(self, other):
        return (
            isinstance(other, SizeStats)
            and (other.m, other.e, other.t, other.n) == (self.m, self.e, self.t, self.n)
        )


def size_stats(f: PFiltration) -> SizeStats:
    """Compute (m, e, t, n) for a valid filtration."""
    m = len(f.poset.points) + len(f.poset.edges)
    e = 0
    for p, q in f.poset.edges:
        e += len(f.complexes[q].simplices - f.complexes[p].simplices)
    n = max((len(f.complexes[p]) for p in f.poset.points), default=0)
    return SizeStats(m, e, n)


def _insertion_order(simplices):
    return sorted(simplices, key=lambda s: (len(s), s))


def _deletion_order(simplices):
    return sorted(simplices, key=lambda s: (-len(s), s))


class ZigzagFiltration:
    """A filtration over a zigzag poset, with simplex-wise expanded steps.

    ``elementary[i]`` lists the single-simplex operations carrying the complex
    at point ``i`` to the complex at point ``i+1``: ``('+', s)`` insertions in
    face-first order on forward arrows, ``('-', s)`` deletions in coface-first
    order on backward arrows.
    """

    __slots__ = ("zigzag", "complexes", "elementary", "degree")

    def __init__(self, zigzag: ZigzagPoset, complexes, elementary, degree: int):
        self.zigzag = zigzag
        self.complexes = list(complexes)
        self.elementary = list(elementary)
        self.degree = degree

    def __len__(self):
        return len(self.complexes)

    def complex_at(self, i: int) -> SimplicialComplex:
        return self.complexes[i]

    def replay(self):
        """Re-derive every complex by applying the elementary lists in order."""
        out = [self.complexes[0]]
        current = set(self.complexes[0].simplices)
        for ops in self.elementary:
            for op, s in ops:
                if op == "+":
                    current.add(s)
                else:
                    current.discard(s)
            out.append(SimplicialComplex(current))
        return out

    def __repr__(self):
        return f"ZigzagFiltration(points={len(self.complexes)}, degree={self.degree})"


def unfold_filtration(f: PFiltration, z: ZigzagPoset) -> ZigzagFiltration:
    """Copy complexes along the folding map and expand steps simplex-wise."""
    require_valid_filtration(f)
    if z.source is not f.poset and (
        z.source.points != f.poset.points or z.source.edges != f.poset.edges
    ):
        raise InputError("zigzag poset does not unfold the filtration's poset")
    complexes = [f.complexes[q] for q in z.fold]
    elementary = []
    for i in range(z.m):
        prev, nxt = complexes[i], complexes[i + 1]
        if z.forward[i]:
            added = nxt.simplices - prev.simplices
            elementary.append([("+", s) for s in _insertion_order(added)])
        else:
            removed = prev.simplices - nxt.simplices
            elementary.append([("-", s) for s in _deletion_order(removed)])
    return ZigzagFiltration(z, complexes, elementary, f.degree)


def cone(f: PFiltration, cycles: dict, omega: int | None = None, field: FieldSpec = GF2) -> PFiltration:
    """Cone a per-point family of cycles with a fresh apex vertex.

    For every poset point ``p``, the apex ``omega`` and the simplices
    ``tau + (omega,)`` for every ``tau`` in the face closure of the support of
    ``cycles[p]`` are added, which kills the class of ``cycles[p]`` at ``p``.
    The result is re-validated: a family of cycles that is not coherent along
    the order can break monotonicity, which is reported as an error.
    """
    require_valid_filtration(f)
    max_v = max((f.complexes[p].max_vertex() for p in f.poset.points), default=-1)
    if omega is None:
        omega = max_v + 1
    omega = int(omega)
    for p in f.poset.points:
        for s in f.complexes[p].simplices:
            if omega in s:
                raise InputError(f"apex vertex {omega} already used at point {p}")
    new_complexes = {}
    for p in f.poset.points:
        ch = cycles.get(p, {})
        if any(s not in f.complexes[p] for s in ch):
            raise InputError(f"cycle at {p} uses simplices outside the complex")
        if any(len(s) - 1 != f.degree for s in ch):
            raise InputError(f"cycle at {p} is not homogeneous of degree {f.degree}")
        if chain_boundary(ch, field):
            raise InputError(f"chain at {p} is not a cycle")
        cone_base = closure(ch.keys())
        added = {(omega,)}
        for tau in cone_base:
            added.add(simplex(tau + (omega,)))
        new_complexes[p] = SimplicialComplex(f.complexes[p].simplices | added)
    result = PFiltration(f.poset, new_complexes, f.degree)
    diag = validate_filtration(result)
    if diag is not None:
        raise ValidationError(f"coned filtration is not monotone: {diag}")
    return result
