"""Butcher tableaux and exact symplecticity checks for partitioned RK methods.

A :class:`PartitionedScheme` assigns one method to each block of a product of
symplectic spaces. A block is either a single :class:`ButcherTableau`, applied
to every coordinate of a symplectic space with an arbitrary nondegenerate
form, or a :class:`TableauPair` acting on Darboux coordinates ``(q, p)`` with
one tableau for ``q`` and another for ``p``. The scheme is symplectic when

* each single tableau satisfies ``b_i b_j = b_i a_ij + b_j a_ji``;
* each pair satisfies ``bh_i b_j = bh_i a_ij + b_j ah_ji`` and ``b = bh``;
* all blocks share the same weights ``b``.

All checks run on :class:`fractions.Fraction` coefficients, so they are exact.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Sequence, Union

import numpy as np

from spinlattice.errors import NoConvergence, StageMismatch

__all__ = [
    "ButcherTableau",
    "TableauPair",
    "PartitionedScheme",
    "Violation",
    "Verdict",
    "check_rk_symplectic",
    "check_partitioned_pair",
    "check_scheme",
    "empirical_invariant_test",
    "midpoint",
    "two_stage_midpoint",
    "explicit_euler",
    "stormer_verlet",
    "production_scheme",
    "SchemeParseError",
    "parse_scheme",
    "load_scheme",
]


@dataclass(frozen=True)
class ButcherTableau:
    """Coefficients ``a`` (s x s) and ``b`` (s) of an s-stage Runge-Kutta method."""

    a: tuple[tuple[Fraction, ...], ...]
    b: tuple[Fraction, ...]

    def __init__(self, a, b):
        a = tuple(tuple(Fraction(x) for x in row) for row in a)
        b = tuple(Fraction(x) for x in b)
        s = len(b)
        if len(a) != s or any(len(row) != s for row in a):
            raise ValueError(f"a must be {s} x {s} to match b")
        object.__setattr__(self, "a", a)
        object.__setattr__(self, "b", b)

    @property
    def stages(self) -> int:
        return len(self.b)

    @property
    def c(self) -> tuple[Fraction, ...]:
        return tuple(sum(row, Fraction(0)) for row in self.a)

    def as_arrays(self) -> tuple[np.ndarray, np.ndarray]:
        return (
            np.array([[float(x) for x in row] for row in self.a]),
            np.array([float(x) for x in self.b]),
        )


@dataclass(frozen=True)
class TableauPair:
    """Tableau ``q`` for the positions and ``p`` for the momenta of one block."""

    q: ButcherTableau
    p: ButcherTableau


Component = Union[ButcherTableau, TableauPair]


@dataclass(frozen=True)
class PartitionedScheme:
    components: tuple[Component, ...]
    names: tuple[str, ...] = ()

    def __init__(self, components: Sequence[Component], names: Sequence[str] = ()):
        components = tuple(
            TableauPair(*c) if isinstance(c, tuple) else c for c in components
        )
        names = tuple(names) or tuple(f"component {k + 1}" for k in range(len(components)))
        if len(names) != len(components):
            raise ValueError("one name per component")
        object.__setattr__(self, "components", components)
        object.__setattr__(self, "names", names)

    @property
    def stages(self) -> int:
        """Common stage count.

        Raises:
            StageMismatch: if the tableaux differ in stage count.
        """
        counts = {t.stages for t in self._tableaux()}
        if len(counts) > 1:
            raise StageMismatch(f"tableaux have different stage counts {sorted(counts)}")
        return counts.pop() if counts else 0

    def _tableaux(self) -> list[ButcherTableau]:
        out = []
        for c in self.components:
            out.extend([c.q, c.p] if isinstance(c, TableauPair) else [c])
        return out


@dataclass(frozen=True)
class Violation:
    condition: str
    where: str
    indices: tuple[int, ...] = ()
    lhs: Fraction | None = None
    rhs: Fraction | None = None

    def __str__(self) -> str:
        idx = f" at (i, j) = {self.indices}" if self.indices else ""
        vals = f": {self.lhs} != {self.rhs}" if self.lhs is not None else ""
        return f"condition {self.condition} fails in {self.where}{idx}{vals}"


@dataclass(frozen=True)
class Verdict:
    violations: tuple[Violation, ...] = field(default_factory=tuple)

    @property
    def passed(self) -> bool:
        return not self.violations

    def __bool__(self) -> bool:
        return self.passed

    def failed_conditions(self) -> set[str]:
        return {v.condition for v in self.violations}


def _symplectic_cells(b, a, bh, ah, condition, where) -> list[Violation]:
    s = len(b)
    out = []
    for i in range(s):
        for j in range(s):
            lhs = bh[i] * b[j]
            rhs = bh[i] * a[i][j] + b[j] * ah[j][i]
            if lhs != rhs:
                out.append(Violation(condition, where, (i + 1, j + 1), lhs, rhs))
    return out


def check_rk_symplectic(t: ButcherTableau, where: str = "tableau") -> Verdict:
    """Exact check of ``b_i b_j = b_i a_ij + b_j a_ji`` for all stage pairs (1-based indices)."""
    return Verdict(tuple(_symplectic_cells(t.b, t.a, t.b, t.a, "(i)", where)))


def check_partitioned_pair(pair: TableauPair, where: str = "pair") -> Verdict:
    """Exact check of the two conditions on a position/momentum tableau pair.

    Raises:
        StageMismatch: if the two tableaux have different stage counts.
    """
    if isinstance(pair, tuple):
        pair = TableauPair(*pair)
    if pair.q.stages != pair.p.stages:
        raise StageMismatch(
            f"{where}: position tableau has {pair.q.stages} stages, "
            f"momentum tableau has {pair.p.stages}"
        )
    out = _symplectic_cells(pair.q.b, pair.q.a, pair.p.b, pair.p.a, "(i)", where)
    for i, (b, bh) in enumerate(zip(pair.q.b, pair.p.b)):
        if b != bh:
            out.append(Violation("(ii)", where, (i + 1,), b, bh))
    return Verdict(tuple(out))


def check_scheme(scheme: PartitionedScheme) -> Verdict:
    """Per-block checks plus equality of weights across blocks.

    Raises:
        StageMismatch: if the blocks do not share one stage count.
    """
    scheme.stages
    out: list[Violation] = []
    for comp, name in zip(scheme.components, scheme.names):
        if isinstance(comp, TableauPair):
            out.extend(check_partitioned_pair(comp, name).violations)
        else:
            out.extend(check_rk_symplectic(comp, name).violations)

    tableaux = scheme._tableaux()
    if tableaux:
        ref = tableaux[0].b
        labels = []
        for comp, name in zip(scheme.components, scheme.names):
            if isinstance(comp, TableauPair):
                labels += [(comp.q, name + " (q)"), (comp.p, name + " (p)")]
            else:
                labels.append((comp, name))
        for t, name in labels[1:]:
            for i, (x, y) in enumerate(zip(ref, t.b)):
                if x != y:
                    out.append(Violation("(iii)", name, (i + 1,), y, x))
    return Verdict(tuple(out))


def _random_skew(rng: np.random.Generator, dim: int) -> np.ndarray:
    while True:
        a = rng.normal(size=(dim, dim))
        j = a - a.T
        if abs(np.linalg.det(j)) > 1e-2:
            return j


def _prk_step(parts, A, y, h, tol, max_iter):
    """One step of a partitioned RK method for the linear system ``y' = A y``.

    ``parts`` is a list of ``(index array, a, b)``. ``y`` may hold several
    solutions as columns.
    """
    s = parts[0][1].shape[0]
    K = np.zeros((s,) + y.shape)
    for it in range(max_iter):
        Y = np.repeat(y[None], s, axis=0)
        for idx, a, _ in parts:
            Y[:, idx] += h * np.tensordot(a, K[:, idx], axes=1)
        K_new = np.einsum("ij,sj...->si...", A, Y)
        change = np.max(np.abs(K_new - K), initial=0.0)
        K = K_new
        if change <= tol:
            break
    else:
        raise NoConvergence("stage iteration did not converge", max_iter, change)
    out = y.copy()
    for idx, _, b in parts:
        out[idx] += h * np.tensordot(b, K[:, idx], axes=1)
    return out


def empirical_invariant_test(
    scheme: PartitionedScheme,
    trials: int = 100,
    h: float = 0.1,
    seed: int = 0,
    hamiltonian_scale: float = 1.0,
    tol: float = 1e-14,
    max_iterations: int = 500,
) -> float:
    """Largest one-step drift of a block-separable quadratic invariant.

    Each trial draws a linear Hamiltonian system ``y' = Pi S y``: ``S`` is a
    random symmetric matrix coupling all blocks, and ``Pi`` is block diagonal.
    Single-tableau blocks get a random nondegenerate skew ``J_k`` with
    ``Pi_k = J_k^{-1}``; pair blocks are canonical ``(q, p)``. ``||Pi S||`` is
    normalized to ``hamiltonian_scale``.

    Two solutions ``u, v`` are stepped together, which is the same as stepping
    the doubled system ``(u, v)``. The measured invariant is
    ``I = sum_k u_k^T J_k v_k``, a sum of one symmetric bilinear form per
    doubled block. The return value is ``max |I(step) - I(start)|``.

    Raises:
        StageMismatch: if the scheme's blocks have different stage counts.
        NoConvergence: if an implicit stage iteration fails.
    """
    scheme.stages
    rng = np.random.default_rng(seed)
    worst = 0.0
    for _ in range(trials):
        blocks, parts, offset = [], [], 0
        for comp in scheme.components:
            if isinstance(comp, TableauPair):
                d = int(rng.integers(1, 3))
                eye = np.eye(d)
                zero = np.zeros((d, d))
                omega = np.block([[zero, -eye], [eye, zero]])
                blocks.append(omega)
                qa, qb = comp.q.as_arrays()
                pa, pb = comp.p.as_arrays()
                parts.append((np.arange(offset, offset + d), qa, qb))
                parts.append((np.arange(offset + d, offset + 2 * d), pa, pb))
                offset += 2 * d
            else:
                d = 2 * int(rng.integers(1, 3))
                blocks.append(_random_skew(rng, d))
                a, b = comp.as_arrays()
                parts.append((np.arange(offset, offset + d), a, b))
                offset += d
        dim = offset
        omega = np.zeros((dim, dim))
        pi = np.zeros((dim, dim))
        k = 0
        for blk in blocks:
            n = blk.shape[0]
            omega[k : k + n, k : k + n] = blk
            pi[k : k + n, k : k + n] = np.linalg.inv(blk)
            k += n
        S = rng.normal(size=(dim, dim))
        S = S + S.T
        A = pi @ S
        norm = np.linalg.norm(A, 2)
        A = A * (hamiltonian_scale / norm) if norm > 0 else A

        y = rng.normal(size=(dim, 2))
        y_new = _prk_step(parts, A, y, h, tol, max_iterations)
        before = y[:, 0] @ omega @ y[:, 1]
        after = y_new[:, 0] @ omega @ y_new[:, 1]
        worst = max(worst, abs(after - before))
    return worst


def midpoint() -> ButcherTableau:
    return ButcherTableau([[Fraction(1, 2)]], [1])


def two_stage_midpoint() -> ButcherTableau:
    """Implicit midpoint written with two identical stages."""
    q = Fraction(1, 4)
    return ButcherTableau([[q, q], [q, q]], [Fraction(1, 2), Fraction(1, 2)])


def explicit_euler() -> ButcherTableau:
    return ButcherTableau([[0]], [1])


def stormer_verlet() -> TableauPair:
    """Lobatto IIIA for positions, Lobatto IIIB for momenta."""
    h = Fraction(1, 2)
    return TableauPair(
        ButcherTableau([[0, 0], [h, h]], [h, h]),
        ButcherTableau([[h, 0], [h, 0]], [h, h]),
    )


def production_scheme() -> PartitionedScheme:
    """Two-stage midpoint on the lifted spins, Verlet on the lattice."""
    return PartitionedScheme([two_stage_midpoint(), stormer_verlet()], ["spins", "lattice"])


class SchemeParseError(ValueError):
    def __init__(self, message: str, line: int):
        super().__init__(f"line {line}: {message}")
        self.line = line


_ROW_KEYS = ("a", "b", "ahat", "bhat")


def parse_scheme(text: str) -> PartitionedScheme:
    """Read a scheme description.

    The format is line based; ``#`` starts a comment::

        component spins
        a 1/4 1/4
        a 1/4 1/4
        b 1/2 1/2

        component lattice
        a 0 0
        a 1/2 1/2
        b 1/2 1/2
        ahat 1/2 0
        ahat 1/2 0
        bhat 1/2 1/2

    Each ``a``/``ahat`` line is one row. A component with ``ahat``/``bhat``
    is a position/momentum pair.

    Raises:
        SchemeParseError: with the offending line number.
    """
    blocks: list[tuple[str, int, dict[str, list]]] = []
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        key, *rest = line.split()
        if key == "component":
            name = " ".join(rest) or f"component {len(blocks) + 1}"
            blocks.append((name, lineno, {k: [] for k in _ROW_KEYS}))
            continue
        if key not in _ROW_KEYS:
            raise SchemeParseError(f"unknown keyword {key!r}", lineno)
        if not blocks:
            raise SchemeParseError(f"{key!r} before any 'component' line", lineno)
        if not rest:
            raise SchemeParseError(f"{key!r} needs at least one coefficient", lineno)
        try:
            row = [Fraction(x) for x in rest]
        except (ValueError, ZeroDivisionError):
            raise SchemeParseError(f"bad coefficient in {' '.join(rest)!r}", lineno) from None
        rows = blocks[-1][2][key]
        if key in ("b", "bhat") and rows:
            raise SchemeParseError(f"{key!r} given twice", lineno)
        rows.append((lineno, row))

    if not blocks:
        raise SchemeParseError("no components", 1)
    components, names = [], []
    for name, lineno, rows in blocks:
        tab = _build_tableau(rows["a"], rows["b"], name, lineno)
        if rows["ahat"] or rows["bhat"]:
            components.append(TableauPair(tab, _build_tableau(rows["ahat"], rows["bhat"], name, lineno)))
        else:
            components.append(tab)
        names.append(name)
    return PartitionedScheme(components, names)


def _build_tableau(a_rows, b_rows, name, lineno) -> ButcherTableau:
    if not b_rows or not a_rows:
        raise SchemeParseError(f"component {name!r} needs matching a and b rows", lineno)
    b_line, b = b_rows[0]
    s = len(b)
    if len(a_rows) != s:
        raise SchemeParseError(f"component {name!r}: {len(a_rows)} a-rows for {s} stages", b_line)
    for line, row in a_rows:
        if len(row) != s:
            raise SchemeParseError(f"row has {len(row)} entries, expected {s}", line)
    return ButcherTableau([row for _, row in a_rows], b)


def load_scheme(path) -> PartitionedScheme:
    with open(path) as f:
        return parse_scheme(f.read())
