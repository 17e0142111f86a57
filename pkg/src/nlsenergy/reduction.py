"""Signature sectors, integration-by-parts relations, and exact reduction.

Monomials split into *sectors* labelled by (#unconjugated factors,
#conjugated factors, total derivative order); every operation here works
inside one sector.  The integration-by-parts (IBP) span of a sector is
generated by total derivatives: for each product F one order lower, the
relation  integral d[F] = 0  expands by the Leibniz rule to a linear
combination of sector monomials.

Equivalence of densities modulo IBP plus a set of *allowed* monomials is
decided by exact linear algebra: allowed coordinates are projected away,
the generators are put in echelon form over the remaining coordinates with
a fixed monomial order, and membership is read off the unique remainder.
No directed rewriting is involved, so the residual does not depend on the
order in which generators are supplied.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass
from typing import Iterable, Sequence

from .algebra import Density, Monomial
from .rational import GaussianRational

Signature = tuple[int, int, int]


class SignatureMismatchError(ValueError):
    """Inputs of a sector computation mix different signatures."""


def bounded_partitions(total: int, count: int, cap: int):
    """Descending tuples of `count` ints in [0, cap] summing to `total`.

    Yielded in lexicographically decreasing order.
    """
    if count == 0:
        if total == 0:
            yield ()
        return
    hi = min(cap, total)
    for first in range(hi, -1, -1):
        if first * count < total:
            break
        for rest in bounded_partitions(total - first, count - 1, first):
            yield (first,) + rest


def enumerate_monomials(signature: Signature, max_order: int) -> list[Monomial]:
    """All sector monomials with every derivative order <= max_order.

    Deterministic order: unconjugated block descending first, then the
    conjugated block.
    """
    n_u, n_c, total = signature
    out = []
    for s_u in range(total, -1, -1):
        s_c = total - s_u
        for uo in bounded_partitions(s_u, n_u, max_order):
            for co in bounded_partitions(s_c, n_c, max_order):
                out.append(Monomial(uo, co))
    return out


def ibp_generators(signature: Signature, max_order: int) -> list[Density]:
    """Total-derivative relations spanning the IBP subspace of a sector.

    One generator per product of signature (n_u, n_c, total-1): the Leibniz
    expansion of its derivative, all coefficients +1.  With the default cap
    max_order = total this is the complete IBP span of the sector.
    """
    n_u, n_c, total = signature
    if total == 0:
        return []
    gens = []
    for base in enumerate_monomials((n_u, n_c, total - 1), max_order - 1):
        pairs = []
        for idx in range(n_u):
            lst = list(base.u_orders)
            lst[idx] += 1
            pairs.append((Monomial(tuple(lst), base.c_orders), 1))
        for idx in range(n_c):
            lst = list(base.c_orders)
            lst[idx] += 1
            pairs.append((Monomial(base.u_orders, tuple(lst)), 1))
        gens.append(Density.from_terms(pairs))
    return gens


class MonomialClass(enum.Enum):
    """Structural role of a sector monomial in the energy construction.

    QUARTIC_REMAINDER: produced by the dispersive substitution, at least
    four derivative-bearing factors, so it is controlled without further
    correction.  NONLINEAR_REMAINDER: produced by the power substitution,
    every order at most k-1.  CORRECTION: the class the energy corrections
    are drawn from.  Anything else is UNCLASSIFIED.
    """

    QUARTIC_REMAINDER = "quartic_remainder"
    NONLINEAR_REMAINDER = "nonlinear_remainder"
    CORRECTION = "correction"
    UNCLASSIFIED = "unclassified"


def classify(m: Monomial, k: int, p: int) -> MonomialClass:
    sig = m.signature
    if sig == (p + 1, p + 1, 2 * k) and m.derivative_factor_count >= 4:
        return MonomialClass.QUARTIC_REMAINDER
    if sig == (2 * p + 1, 2 * p + 1, 2 * k - 2) and m.max_order <= k - 1:
        return MonomialClass.NONLINEAR_REMAINDER
    if sig == (p + 1, p + 1, 2 * k - 2) and m.max_order <= k - 1:
        return MonomialClass.CORRECTION
    return MonomialClass.UNCLASSIFIED


@dataclass
class ReductionResult:
    """expr == sum(coeff * generator) + allowed_part + residual, exactly."""

    residual: Density
    generator_coefficients: dict[int, GaussianRational]
    allowed_part: Density

    def recombine(self, generators: Sequence[Density]) -> Density:
        """Re-expand the certificate; equals the reduced expression."""
        acc = self.allowed_part + self.residual
        for idx, c in self.generator_coefficients.items():
            acc = acc + generators[idx] * c
        return acc


class SectorReducer:
    """Echelon form of a generator span, reusable across many reductions.

    `allowed` monomials are coordinates that membership testing may use
    freely; they are projected out of the elimination and collected into
    the `allowed_part` of each result.  Pivoting is deterministic: the
    largest monomial in canonical order is eliminated first.
    """

    def __init__(self, generators: Sequence[Density], allowed: Iterable[Monomial] = ()):
        self.generators = list(generators)
        self.allowed = frozenset(allowed)
        sigs: set[Signature] = set()
        for g in self.generators:
            sigs |= g.signatures()
        for m in self.allowed:
            sigs.add(m.signature)
        if len(sigs) > 1:
            raise SignatureMismatchError(f"mixed signatures in sector inputs: {sorted(sigs)}")
        self.signature = next(iter(sigs)) if sigs else None
        # pivot monomial -> (normalized row, generator combination)
        self._rows: dict[Monomial, tuple[dict, dict]] = {}
        for idx, g in enumerate(self.generators):
            row = {m: c for m, c in g.terms() if m not in self.allowed}
            self._insert(row, {idx: GaussianRational(1)})

    @property
    def rank(self) -> int:
        return len(self._rows)

    def _insert(self, row: dict, combo: dict):
        while row:
            pivot = max(row, key=Monomial.sort_key)
            hit = self._rows.get(pivot)
            if hit is None:
                inv = GaussianRational(1) / row[pivot]
                self._rows[pivot] = (
                    {m: c * inv for m, c in row.items()},
                    {i: c * inv for i, c in combo.items()},
                )
                return
            erow, ecombo = hit
            factor = row[pivot]
            for m, c in erow.items():
                cur = row.get(m, _ZERO) - factor * c
                if cur:
                    row[m] = cur
                else:
                    row.pop(m, None)
            for i, c in ecombo.items():
                cur = combo.get(i, _ZERO) - factor * c
                if cur:
                    combo[i] = cur
                else:
                    combo.pop(i, None)

    def reduce(self, expr: Density) -> ReductionResult:
        if self.signature is not None:
            bad = expr.signatures() - {self.signature}
            if bad:
                raise SignatureMismatchError(
                    f"expression signatures {sorted(bad)} outside sector {self.signature}")
        row: dict[Monomial, GaussianRational] = {}
        direct_allowed: dict[Monomial, GaussianRational] = {}
        for m, c in expr.terms():
            (direct_allowed if m in self.allowed else row)[m] = c
        acc: dict[int, GaussianRational] = {}
        residual: dict[Monomial, GaussianRational] = {}
        while row:
            pivot = max(row, key=Monomial.sort_key)
            hit = self._rows.get(pivot)
            if hit is None:
                residual[pivot] = row.pop(pivot)
                continue
            erow, ecombo = hit
            factor = row[pivot]
            for m, c in erow.items():
                cur = row.get(m, _ZERO) - factor * c
                if cur:
                    row[m] = cur
                else:
                    row.pop(m, None)
            for i, c in ecombo.items():
                cur = acc.get(i, _ZERO) + factor * c
                if cur:
                    acc[i] = cur
                else:
                    acc.pop(i, None)
        # allowed part of expr - sum(coeff * generator)
        if acc:
            lift: dict[Monomial, GaussianRational] = {}
            for i, c in acc.items():
                for m, gc in self.generators[i].terms():
                    if m in self.allowed:
                        cur = lift.get(m, _ZERO) + c * gc
                        if cur:
                            lift[m] = cur
                        else:
                            lift.pop(m, None)
            for m, c in lift.items():
                cur = direct_allowed.get(m, _ZERO) - c
                if cur:
                    direct_allowed[m] = cur
                else:
                    direct_allowed.pop(m, None)
        return ReductionResult(Density(residual), acc, Density(direct_allowed))


_ZERO = GaussianRational(0)


def reduce_modulo(expr: Density, generators: Sequence[Density],
                  allowed: Iterable[Monomial] = ()) -> ReductionResult:
    """One-shot reduction; see :class:`SectorReducer` for the contract."""
    return SectorReducer(generators, allowed).reduce(expr)


def coordinates_in_span(targets: Sequence[Density], basis: Sequence[Density],
                        reducer: SectorReducer) -> list[dict[int, GaussianRational]]:
    """Exact coordinates of each target over `basis`, modulo the reducer span.

    The basis residuals must be linearly independent (unique coordinates);
    raises ValueError if they are not or if a target falls outside the span.
    """
    inner = SectorReducer([reducer.reduce(b).residual for b in basis])
    if inner.rank != len(basis):
        raise ValueError("basis is dependent modulo the reducer span")
    out = []
    for t in targets:
        res = inner.reduce(reducer.reduce(t).residual)
        if not res.residual.is_zero:
            raise ValueError("target outside the span of the basis")
        out.append(res.generator_coefficients)
    return out
