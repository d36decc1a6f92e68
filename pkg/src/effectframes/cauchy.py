"""Additive functions on an interval, in exact rational arithmetic.

Additivity f(x) + f(y) = f(x + y) on a rational grid forces linearity, and
the forced solution extends first to all nonnegative rationals through
f_plus(x) = n f(x/n) and then to the whole line through the odd-symmetry
rule f_real(-x) = -f_real(x).  Dropping every regularity assumption admits
wildly non-linear additive functions; an explicit two-dimensional model
lives on the numbers p + q sqrt(2) with rational p, q, where f(p + q
sqrt(2)) = alpha p + beta q is additive for every choice of alpha, beta
yet linear only when both vanish.  Walking the solutions of Pell's
equation P^2 - 2 Q^2 = 1 produces points arbitrarily close to zero with
arbitrarily large f, the executable refutation of boundedness for the
non-linear models.

Everything here is exact: values are `fractions.Fraction`, points of the
quadratic model are exact (p, q) pairs, and comparisons go through integer
arithmetic only.  No floats enter any decision.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import NamedTuple, Union

__all__ = [
    "ConditionReport",
    "ExtensionView",
    "GridAdditiveFunction",
    "GridInvariantError",
    "NotRepresentableError",
    "QSqrt2",
    "QSqrt2Additive",
    "WitnessResult",
    "as_fraction",
    "check_condition",
    "check_linear",
    "fraction_str",
    "grid_from_unit",
    "grid_from_jsonable",
    "grid_to_jsonable",
    "model_from_jsonable",
    "qsqrt2_additive_from_jsonable",
    "qsqrt2_additive_to_jsonable",
    "unboundedness_witness",
]

RationalLike = Union[Fraction, int, str]

CONDITIONS = ("bounded_above", "bounded_below", "continuous_at_zero", "monotone")


class GridInvariantError(ValueError):
    """A grid table violates f(0) = 0 or additivity on the grid."""


class NotRepresentableError(ValueError):
    """Requested point lies outside the exact domain of the base function."""


def as_fraction(x: RationalLike) -> Fraction:
    """Exact rational from an int, a Fraction, or a 'p/q' string."""
    if isinstance(x, Fraction):
        return x
    if isinstance(x, int):
        return Fraction(x)
    if isinstance(x, str):
        return Fraction(x)
    raise TypeError(f"expected an exact rational, got {type(x).__name__}")


def fraction_str(x: Fraction) -> str:
    """Serialize as 'p/q' with the denominator always present."""
    return f"{x.numerator}/{x.denominator}"


def _sign(x: Fraction) -> int:
    return (x > 0) - (x < 0)


def _sqrt2_convergent(steps: int) -> Fraction:
    p, q = 1, 1
    for _ in range(steps):
        p, q = p + 2 * q, p + q
    return Fraction(p, q)


# Rational approximation of sqrt(2) good to ~1e-92, used only to seed
# integer-part estimates that are then corrected by exact sign checks.
_SQRT2_APPROX = _sqrt2_convergent(120)


@dataclass(frozen=True)
class QSqrt2:
    """Exact element p + q*sqrt(2) of the rational quadratic field."""

    p: Fraction
    q: Fraction

    def __post_init__(self) -> None:
        object.__setattr__(self, "p", as_fraction(self.p))
        object.__setattr__(self, "q", as_fraction(self.q))

    @staticmethod
    def from_rational(x: RationalLike) -> "QSqrt2":
        return QSqrt2(as_fraction(x), Fraction(0))

    def __add__(self, other: "QSqrt2") -> "QSqrt2":
        return QSqrt2(self.p + other.p, self.q + other.q)

    def __sub__(self, other: "QSqrt2") -> "QSqrt2":
        return QSqrt2(self.p - other.p, self.q - other.q)

    def __neg__(self) -> "QSqrt2":
        return QSqrt2(-self.p, -self.q)

    def scale(self, r: RationalLike) -> "QSqrt2":
        r = as_fraction(r)
        return QSqrt2(self.p * r, self.q * r)

    def sign(self) -> int:
        """Exact sign, decided by integer arithmetic only.

        With p and q of opposite signs the comparison p + q*sqrt(2) vs 0
        squares to p**2 vs 2*q**2, which is never a tie since sqrt(2) is
        irrational.
        """
        sp, sq = _sign(self.p), _sign(self.q)
        if sq == 0:
            return sp
        if sp == 0:
            return sq
        if sp == sq:
            return sp
        # Opposite signs: the larger square wins, carrying its sign.
        if self.p * self.p > 2 * self.q * self.q:
            return sp
        return sq

    def is_zero(self) -> bool:
        return self.p == 0 and self.q == 0

    def __lt__(self, other: "QSqrt2") -> bool:
        return (self - other).sign() < 0

    def __le__(self, other: "QSqrt2") -> bool:
        return (self - other).sign() <= 0

    def __gt__(self, other: "QSqrt2") -> bool:
        return (self - other).sign() > 0

    def __ge__(self, other: "QSqrt2") -> bool:
        return (self - other).sign() >= 0

    def approx(self) -> float:
        """Float approximation, for display only; never used in decisions."""
        return float(self.p) + float(self.q) * math.sqrt(2.0)

    def __str__(self) -> str:
        return f"{fraction_str(self.p)} + {fraction_str(self.q)}*sqrt(2)"


def _floor_qsqrt2(x: QSqrt2) -> int:
    if x.q == 0:
        return math.floor(x.p)
    est = math.floor(x.p + x.q * _SQRT2_APPROX)
    while QSqrt2(x.p - (est + 1), x.q).sign() >= 0:
        est += 1
    while QSqrt2(x.p - est, x.q).sign() < 0:
        est -= 1
    return est


def _ceil_qsqrt2(x: QSqrt2) -> int:
    return -_floor_qsqrt2(-x)


# ---------------------------------------------------------------------------
# Additive functions on a rational grid
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class GridAdditiveFunction:
    """Table of values on the grid k*a/n for k = 0..n, exact rationals.

    Construction checks shapes only; `invariant_violations` reports breaks
    of f(0) = 0 and grid additivity, so tampered tables can be represented
    and then rejected by the checkers.
    """

    a: Fraction
    n: int
    values: tuple[Fraction, ...]

    def __post_init__(self) -> None:
        a = as_fraction(self.a)
        if a <= 0:
            raise ValueError(f"interval endpoint must be positive, got {a}")
        object.__setattr__(self, "a", a)
        n = int(self.n)
        if n < 1:
            raise ValueError(f"grid needs at least one step, got n = {n}")
        object.__setattr__(self, "n", n)
        values = tuple(as_fraction(v) for v in self.values)
        if len(values) != n + 1:
            raise ValueError(f"expected {n + 1} values, got {len(values)}")
        object.__setattr__(self, "values", values)

    @property
    def step(self) -> Fraction:
        return self.a / self.n

    def point(self, k: int) -> Fraction:
        return k * self.step

    def __call__(self, k: int) -> Fraction:
        """Value at the k-th grid point."""
        return self.values[k]

    def invariant_violations(self) -> list[str]:
        """Exact check of f(0) = 0 and pairwise grid additivity.

        Additivity over all index pairs is equivalent to constant unit
        increments, which is what gets scanned; the reported witness names
        the violating pair (k, 1).
        """
        out: list[str] = []
        if self.values[0] != 0:
            out.append(f"f(0) = {fraction_str(self.values[0])}, expected 0/1")
        unit = self.values[1] if self.n >= 1 else Fraction(0)
        for k in range(1, self.n):
            if self.values[k + 1] - self.values[k] != unit:
                out.append(
                    f"additivity fails for pair ({k}, 1): "
                    f"f({k}) + f(1) = {fraction_str(self.values[k] + unit)} "
                    f"but f({k + 1}) = {fraction_str(self.values[k + 1])}"
                )
                break
        return out


def grid_from_unit(a: RationalLike, n: int, v: RationalLike) -> GridAdditiveFunction:
    """The unique grid-additive table with f(a/n) = v, namely f(k a/n) = k v."""
    v = as_fraction(v)
    return GridAdditiveFunction(
        a=as_fraction(a), n=n, values=tuple(k * v for k in range(n + 1))
    )


class LinearityResult(NamedTuple):
    is_linear: bool
    slope: Fraction


def check_linear(g: GridAdditiveFunction) -> LinearityResult:
    """Decide f(k a/n) = k f(a/n) exactly; slope is f(a)/a.

    Grid invariants are verified first and a violation raises
    `GridInvariantError` before any linearity judgment.
    """
    violations = g.invariant_violations()
    if violations:
        raise GridInvariantError("; ".join(violations))
    unit = g.values[1]
    is_linear = all(g.values[k] == k * unit for k in range(g.n + 1))
    return LinearityResult(is_linear=is_linear, slope=g.values[g.n] / g.a)


# ---------------------------------------------------------------------------
# The quadratic-field model
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class QSqrt2Additive:
    """f(p + q sqrt(2)) = alpha p + beta q, additive for any alpha, beta.

    Linearity would force beta = alpha*sqrt(2); over the rationals the
    exact proxy beta**2 == 2*alpha**2 (with matching signs) admits only
    alpha = beta = 0, so every other parameter choice is a genuinely
    non-linear additive function.
    """

    alpha: Fraction
    beta: Fraction

    def __post_init__(self) -> None:
        object.__setattr__(self, "alpha", as_fraction(self.alpha))
        object.__setattr__(self, "beta", as_fraction(self.beta))

    def __call__(self, x: QSqrt2) -> Fraction:
        return self.alpha * x.p + self.beta * x.q

    @property
    def is_linear(self) -> bool:
        squares_match = self.beta * self.beta == 2 * self.alpha * self.alpha
        signs_match = _sign(self.beta) == _sign(self.alpha)
        return squares_match and signs_match


class WitnessResult(NamedTuple):
    x: QSqrt2
    value: Fraction
    steps: int


def _pell_candidates(max_steps: int):
    """Yield (step, z) for z in (0, 1) built from Pell pairs P^2 - 2Q^2 = 1.

    Each Pell pair (P, Q) gives two positive numbers shrinking to zero:
    P - Q sqrt(2) = 1/(P + Q sqrt(2)) and its sqrt(2) multiple
    -2Q + P sqrt(2).  Successive pairs come from the fundamental solution
    (3, 2) via (P, Q) -> (3P + 4Q, 2P + 3Q).
    """
    p, q = 3, 2
    for step in range(max_steps):
        yield step, QSqrt2(Fraction(p), Fraction(-q))
        yield step, QSqrt2(Fraction(-2 * q), Fraction(p))
        p, q = 3 * p + 4 * q, 2 * p + 3 * q


def unboundedness_witness(
    f: QSqrt2Additive,
    bound: RationalLike,
    a: RationalLike = Fraction(1),
    max_steps: int = 20000,
) -> WitnessResult:
    """Exact point x in (0, a] with f(x) > bound, for any non-linear model.

    Walks the Pell solutions: along one of the two candidate families the
    value grows like |beta - alpha*sqrt(2)| times the Pell denominator
    while the point shrinks toward zero, so a witness always appears.
    Raises ValueError for the degenerate linear model alpha = beta = 0.
    """
    bound = as_fraction(bound)
    a = as_fraction(a)
    if a <= 0:
        raise ValueError(f"interval endpoint must be positive, got {a}")
    if f.is_linear:
        raise ValueError(
            "model is linear (alpha = beta = 0); its only bound witness would "
            "need a non-linear model"
        )
    upper = QSqrt2.from_rational(a)
    for step, z in _pell_candidates(max_steps):
        if z <= upper and f(z) > bound:
            return WitnessResult(x=z, value=f(z), steps=step)
    raise RuntimeError(f"no witness within {max_steps} Pell steps")


# ---------------------------------------------------------------------------
# Extensions to the half line and the whole line
# ---------------------------------------------------------------------------

def _min_divisor_at_least(j: int, lower: int) -> int:
    """Smallest divisor of j that is >= lower (j >= 1, 1 <= lower <= j)."""
    if lower <= 1:
        return 1
    best = j
    i = 1
    while i * i <= j:
        if j % i == 0:
            for div in (i, j // i):
                if lower <= div < best:
                    best = div
        i += 1
    return best


@dataclass(frozen=True)
class ExtensionView:
    """Half-line extension f_plus(x) = n f(x/n) and its odd completion.

    For a grid base the admissible inputs are the multiples of the grid
    step; the modulus n must place x/n back on the grid, and the smallest
    such n is chosen unless one is supplied.  For the quadratic-field base
    any exact point works and n must merely satisfy 0 <= x/n <= a.  Both
    extensions are independent of the admissible modulus, which is
    testable by passing two different ones.

    The whole-line extension applies f_real(-x) = -f_real(x).
    """

    base: Union[GridAdditiveFunction, QSqrt2Additive]
    a: Fraction | None = None

    def __post_init__(self) -> None:
        if isinstance(self.base, GridAdditiveFunction):
            violations = self.base.invariant_violations()
            if violations:
                raise GridInvariantError("; ".join(violations))
            object.__setattr__(self, "a", self.base.a)
        elif isinstance(self.base, QSqrt2Additive):
            a = as_fraction(self.a) if self.a is not None else Fraction(1)
            if a <= 0:
                raise ValueError(f"interval endpoint must be positive, got {a}")
            object.__setattr__(self, "a", a)
        else:
            raise TypeError(f"unsupported base {type(self.base).__name__}")

    # -- grid-base helpers ---------------------------------------------------

    def _grid_index(self, x: Fraction) -> int:
        j = x * self.base.n / self.base.a
        if j.denominator != 1:
            raise NotRepresentableError(
                f"{fraction_str(x)} is not a multiple of the grid step "
                f"{fraction_str(self.base.step)}"
            )
        return j.numerator

    def minimal_modulus(self, x: RationalLike) -> int:
        """Smallest n with x/n in the base domain (grid point, or in [0, a])."""
        if isinstance(self.base, GridAdditiveFunction):
            x = as_fraction(x)
            if x < 0:
                raise ValueError("minimal modulus is defined for nonnegative inputs")
            j = self._grid_index(x)
            if j == 0:
                return 1
            return _min_divisor_at_least(j, -(-j // self.base.n))
        z = _as_qsqrt2(x)
        if z.sign() < 0:
            raise ValueError("minimal modulus is defined for nonnegative inputs")
        return max(1, _ceil_qsqrt2(z.scale(1 / self.a)))

    def f_plus(self, x, n: int | None = None) -> Fraction:
        """n f(x/n) on nonnegative inputs, with the minimal n by default."""
        if isinstance(self.base, GridAdditiveFunction):
            x = as_fraction(x)
            if x < 0:
                raise ValueError(f"f_plus is defined on [0, inf), got {fraction_str(x)}")
            j = self._grid_index(x)
            if n is None:
                n = self.minimal_modulus(x)
            else:
                n = int(n)
                if n < 1 or j % n != 0 or j // n > self.base.n:
                    raise ValueError(
                        f"modulus {n} does not place {fraction_str(x)} / n on the grid"
                    )
            return n * self.base.values[j // n]
        z = _as_qsqrt2(x)
        if z.sign() < 0:
            raise ValueError(f"f_plus is defined on [0, inf), got {z}")
        if n is None:
            n = self.minimal_modulus(z)
        else:
            n = int(n)
            if n < 1 or QSqrt2.from_rational(self.a) < z.scale(Fraction(1, n)):
                raise ValueError(f"modulus {n} does not bring {z} into [0, a]")
        return n * self.base(z.scale(Fraction(1, n)))

    def f_real(self, x, n: int | None = None) -> Fraction:
        """Odd extension to the whole line: f_real(-x) = -f_real(x)."""
        if isinstance(self.base, GridAdditiveFunction):
            x = as_fraction(x)
            if x < 0:
                return -self.f_plus(-x, n)
            return self.f_plus(x, n)
        z = _as_qsqrt2(x)
        if z.sign() < 0:
            return -self.f_plus(-z, n)
        return self.f_plus(z, n)


def _as_qsqrt2(x) -> QSqrt2:
    if isinstance(x, QSqrt2):
        return x
    return QSqrt2.from_rational(as_fraction(x))


# ---------------------------------------------------------------------------
# Condition checkers
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class ConditionReport:
    """Evidence over a searched region, never a proof.

    `holds_on_searched` refers strictly to the set described by
    `searched`; a witness, when present, is an exact refutation.
    """

    condition: str
    holds_on_searched: bool
    witness: dict | None
    searched: str


def _point_witness(x_str: str, x_approx: float, value: Fraction) -> dict:
    return {
        "x": x_str,
        "x_approx": x_approx,
        "value": fraction_str(value),
        "value_approx": float(value),
    }


def _check_grid_condition(
    g: GridAdditiveFunction, which: str, bound, eps
) -> ConditionReport:
    searched = f"all {g.n + 1} grid points of [0, {fraction_str(g.a)}]"
    if which == "bounded_above":
        b = as_fraction(bound)
        for k in range(g.n + 1):
            if g.values[k] > b:
                return ConditionReport(
                    which, False,
                    _point_witness(fraction_str(g.point(k)), float(g.point(k)), g.values[k]),
                    searched,
                )
        return ConditionReport(which, True, None, searched)
    if which == "bounded_below":
        c = as_fraction(bound)
        for k in range(g.n + 1):
            if g.values[k] < c:
                return ConditionReport(
                    which, False,
                    _point_witness(fraction_str(g.point(k)), float(g.point(k)), g.values[k]),
                    searched,
                )
        return ConditionReport(which, True, None, searched)
    if which == "continuous_at_zero":
        e = as_fraction(eps)
        if abs(g.values[1]) > e:
            return ConditionReport(
                which, False,
                _point_witness(fraction_str(g.step), float(g.step), g.values[1]),
                searched + " (no grid radius keeps |f| within eps)",
            )
        m = 1
        while m + 1 <= g.n and abs(g.values[m + 1]) <= e:
            m += 1
        delta = g.point(m)
        return ConditionReport(
            which, True, None,
            searched + f"; |f| <= {fraction_str(e)} holds up to delta = {fraction_str(delta)}",
        )
    if which == "monotone":
        for k in range(g.n):
            if g.values[k + 1] < g.values[k]:
                return ConditionReport(
                    which, False,
                    {
                        "x": fraction_str(g.point(k)),
                        "y": fraction_str(g.point(k + 1)),
                        "f_x": fraction_str(g.values[k]),
                        "f_y": fraction_str(g.values[k + 1]),
                    },
                    searched,
                )
        return ConditionReport(which, True, None, searched)
    raise ValueError(f"unknown condition {which!r}")


def _check_qsqrt2_condition(
    f: QSqrt2Additive, which: str, bound, eps, interval, budget: int
) -> ConditionReport:
    a = as_fraction(interval) if interval is not None else Fraction(1)
    upper = QSqrt2.from_rational(a)
    searched = (
        f"Pell candidates of the first {budget} steps inside (0, {fraction_str(a)}]"
    )
    if which == "bounded_above":
        b = as_fraction(bound)
        for _, z in _pell_candidates(budget):
            if z <= upper and f(z) > b:
                return ConditionReport(
                    which, False, _point_witness(str(z), z.approx(), f(z)), searched
                )
        return ConditionReport(which, True, None, searched)
    if which == "bounded_below":
        c = as_fraction(bound)
        for _, z in _pell_candidates(budget):
            if z <= upper and f(z) < c:
                return ConditionReport(
                    which, False, _point_witness(str(z), z.approx(), f(z)), searched
                )
        return ConditionReport(which, True, None, searched)
    if which == "continuous_at_zero":
        e = as_fraction(eps)
        for _, z in _pell_candidates(budget):
            if z <= upper and abs(f(z)) > e:
                return ConditionReport(
                    which, False, _point_witness(str(z), z.approx(), f(z)),
                    searched + " (witness can be made arbitrarily small)",
                )
        return ConditionReport(which, True, None, searched)
    if which == "monotone":
        points = [upper.scale(Fraction(k, 8)) for k in range(9)]
        points.extend(z for _, z in _pell_candidates(budget) if z <= upper)
        points.sort()
        for left, right in zip(points, points[1:]):
            if left < right and f(left) > f(right):
                return ConditionReport(
                    which, False,
                    {
                        "x": str(left),
                        "y": str(right),
                        "f_x": fraction_str(f(left)),
                        "f_y": fraction_str(f(right)),
                    },
                    searched + " plus 9 rational points",
                )
        return ConditionReport(
            which, True, None, searched + " plus 9 rational points"
        )
    raise ValueError(f"unknown condition {which!r}")


def check_condition(
    f: Union[GridAdditiveFunction, QSqrt2Additive],
    which: str,
    *,
    bound: RationalLike | None = None,
    eps: RationalLike = Fraction(1),
    interval: RationalLike | None = None,
    budget: int = 64,
) -> ConditionReport:
    """Search-based evidence for one of the four regularity conditions.

    `which` is one of bounded_above, bounded_below, continuous_at_zero,
    monotone.  Boundedness checks need `bound`; continuity uses `eps`; the
    quadratic-field model searches Pell candidates inside (0, interval]
    with the given step budget.  Measurability has no finite check and is
    covered through the monotone condition, which implies it.
    """
    if which not in CONDITIONS:
        raise ValueError(f"unknown condition {which!r}; choose from {CONDITIONS}")
    if which in ("bounded_above", "bounded_below") and bound is None:
        raise ValueError(f"condition {which} needs a bound")
    if isinstance(f, GridAdditiveFunction):
        return _check_grid_condition(f, which, bound, eps)
    if isinstance(f, QSqrt2Additive):
        return _check_qsqrt2_condition(f, which, bound, eps, interval, budget)
    raise TypeError(f"unsupported model {type(f).__name__}")


# ---------------------------------------------------------------------------
# JSON wire format
# ---------------------------------------------------------------------------

def grid_to_jsonable(g: GridAdditiveFunction) -> dict:
    return {
        "kind": "grid",
        "a": fraction_str(g.a),
        "n": g.n,
        "values": [fraction_str(v) for v in g.values],
    }


def grid_from_jsonable(obj: dict) -> GridAdditiveFunction:
    if not isinstance(obj, dict) or obj.get("kind") != "grid":
        raise ValueError("grid JSON must carry kind = 'grid'")
    return GridAdditiveFunction(
        a=as_fraction(obj["a"]),
        n=int(obj["n"]),
        values=tuple(as_fraction(v) for v in obj["values"]),
    )


def qsqrt2_additive_to_jsonable(f: QSqrt2Additive) -> dict:
    return {
        "kind": "qsqrt2",
        "alpha": fraction_str(f.alpha),
        "beta": fraction_str(f.beta),
    }


def qsqrt2_additive_from_jsonable(obj: dict) -> QSqrt2Additive:
    if not isinstance(obj, dict) or obj.get("kind") != "qsqrt2":
        raise ValueError("model JSON must carry kind = 'qsqrt2'")
    return QSqrt2Additive(alpha=as_fraction(obj["alpha"]), beta=as_fraction(obj["beta"]))


def model_from_jsonable(obj: dict) -> Union[GridAdditiveFunction, QSqrt2Additive]:
    kind = obj.get("kind") if isinstance(obj, dict) else None
    if kind == "grid":
        return grid_from_jsonable(obj)
    if kind == "qsqrt2":
        return qsqrt2_additive_from_jsonable(obj)
    raise ValueError(f"unknown model kind {kind!r}")
