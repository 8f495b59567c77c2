"""The linear program that bounds how far the chirp construction beats sqrt(M).

For an even m, the 𝒜 construction fixes alpha = 1/(2m(4m-1)) and the ℬ
construction (with beta = alpha) fixes t = 2 tau - 1 for M = 2^(1/alpha - 1).
What remains is linear in (eps1, ell, gamma, alpha1, alpha2, eps, x, y);
maximizing eps1 over the closure of the feasible set gives the supremum, and
eps0 = eps1 / 2 is the exponent gain in ExRIP[1/2 + eps0].
"""

from dataclasses import dataclass, field
from fractions import Fraction

import mpmath

from . import simplex
from .addcomb import TAU_BRANCH_LOG2M, solve_t_asymptotic, solve_tau

C0_DEFAULT = Fraction(1, 10430)
VARIABLES = ("eps1", "ell", "gamma", "alpha1", "alpha2", "eps", "x", "y")
CONSTRAINT_NAMES = ("A", "B", "D", "E", "F", "G", "H1", "H2", "I", "ell_gamma")


def alpha_of_m(m):
    return Fraction(1, 2 * m * (4 * m - 1))


def t_rational(K, digits=40):
    """2 tau - 1 for M = 2^K as a Fraction, rounded down at ``digits`` significant digits."""
    bits = int(digits * 3.33) + 64
    t = solve_t_asymptotic(K, precision_bits=bits) if K >= TAU_BRANCH_LOG2M else _t_direct(K, bits)
    with mpmath.workprec(bits):
        e = int(mpmath.floor(mpmath.log10(t)))
        scale = digits - 1 - e
        if scale >= 0:
            num = int(mpmath.floor(t * mpmath.mpf(10) ** scale))
            return Fraction(num, 10**scale)
        num = int(mpmath.floor(t / mpmath.mpf(10) ** (-scale)))
        return Fraction(num * 10 ** (-scale))


def _t_direct(K, bits):
    # polish the double-precision root of (1/M)^(2 tau) + (1 - 1/M)^tau = 1
    with mpmath.workprec(bits + 20):
        M = mpmath.mpf(2) ** K
        f = lambda tau: M ** (-2 * tau) + (1 - 1 / M) ** tau - 1
        tau = mpmath.findroot(f, mpmath.mpf(solve_tau(2**K)))
        return 2 * tau - 1


@dataclass(frozen=True)
class MachineParams:
    m: int
    c0: Fraction
    alpha: Fraction
    t: Fraction

    def __post_init__(self):
        if self.m < 2 or self.m % 2:
            raise ValueError(f"m must be a positive even integer, got {self.m}")
        if not 0 < self.alpha < 1 or not 0 < self.t < 1 or not 0 < self.c0 < 1:
            raise ValueError("need 0 < alpha, t, c0 < 1")

    @classmethod
    def for_m(cls, m, c0=C0_DEFAULT, digits=40):
        if m < 2 or m % 2:
            raise ValueError(f"m must be a positive even integer, got {m}")
        alpha = alpha_of_m(m)
        # log2 M = 1/beta - 1 with beta = alpha
        log2M = 2 * m * (4 * m - 1) - 1
        return cls(m, Fraction(c0), alpha, t_rational(log2M, digits))

    @property
    def log2M(self):
        return int(1 / self.alpha) - 1


@dataclass(frozen=True)
class FeasibleTuple:
    eps1: Fraction
    ell: Fraction
    gamma: Fraction
    alpha1: Fraction
    alpha2: Fraction
    eps: Fraction
    x: Fraction
    y: Fraction

    def as_list(self):
        return [getattr(self, v) for v in VARIABLES]

    def replace(self, **kw):
        vals = dict(zip(VARIABLES, self.as_list()))
        vals.update(kw)
        return FeasibleTuple(**vals)


@dataclass(frozen=True)
class Constraint:
    """sum_j coeffs[j] * v_j <= rhs."""

    name: str
    coeffs: tuple
    rhs: Fraction

    def slack(self, values):
        return self.rhs - sum(c * v for c, v in zip(self.coeffs, values))


def build_constraints(params):
    """Closure of constraints (A)-(I) and the (ell, gamma) condition, in <= form.

    Strict inequalities become non-strict. Variables are ordered as
    ``VARIABLES``; nonnegativity is implicit.
    """
    m, c0, a, t = params.m, params.c0, params.alpha, params.t
    F = Fraction
    half = F(1, 2)
    # eps1, ell, gamma, alpha1, alpha2, eps, x, y
    rows = [
        # eps1 + 2 eps <= alpha1 - alpha - (4/3) x
        ("A", (1, 0, 0, -1, 0, 2, F(4, 3), 0), -a),
        # ell <= 1/2 + (4/3) x - alpha1 + eps/2
        ("B", (0, 1, 0, 1, 0, -half, -F(4, 3), 0), half),
        # eps1 + 2 eps <= gamma/4 - y/4
        ("D", (1, 0, -F(1, 4), 0, 0, 2, 0, F(1, 4)), 0),
        # alpha2 >= 9x + eps
        ("E", (0, 0, 0, 0, -1, 1, 9, 0), 0),
        # c0 y/8 - (alpha1/4 + 9 alpha2/8)/m <= x/8 - alpha/4
        ("F", (0, 0, 0, -F(1, 4 * m), -F(9, 8 * m), 0, -F(1, 8), c0 / 8), -a / 4),
        # eps1 + eps <= c0 y/8 - (alpha1/4 + 9 alpha2/8)/m
        ("G", (1, 0, 0, F(1, 4 * m), F(9, 8 * m), 1, 0, -c0 / 8), 0),
        # m y <= 1/2 - alpha1, m y <= 1/2 - alpha2
        ("H1", (0, 0, 0, 1, 0, 0, 0, m), half),
        ("H2", (0, 0, 0, 0, 1, 0, 0, m), half),
        # 3 alpha2 - 2 alpha1 <= (2 - c0) m y
        ("I", (0, 0, 0, -2, 3, 0, 0, -(2 - c0) * m), 0),
        # t (ell - gamma) >= 10 gamma
        ("ell_gamma", (0, -t, t + 10, 0, 0, 0, 0, 0), 0),
    ]
    return [Constraint(n, tuple(F(c) for c in co), F(r)) for n, co, r in rows]


def violations(params, tup):
    """Names of the constraints (or sign conditions) that ``tup`` violates, exactly."""
    vals = tup.as_list()
    bad = [c.name for c in build_constraints(params) if c.slack(vals) < 0]
    bad += [f"{v}>=0" for v, x in zip(VARIABLES, vals) if x < 0]
    return bad


def verify_tuple(params, tup):
    return not violations(params, tup)


@dataclass
class LpResult:
    params: MachineParams
    status: str
    optimum: FeasibleTuple = None
    eps1_sup: Fraction = None
    duals: dict = field(default_factory=dict)
    reduced_costs: dict = field(default_factory=dict)
    pivots: int = 0

    @property
    def eps0(self):
        return None if self.eps1_sup is None else self.eps1_sup / 2

    @property
    def exrip_z(self):
        """Exponent z in ExRIP[z] implied by the optimum."""
        return None if self.eps1_sup is None else Fraction(1, 2) + self.eps0

    def to_json(self):
        def q(v):
            return None if v is None else {"rational": f"{v.numerator}/{v.denominator}", "decimal": _dec(v)}

        p = self.params
        out = {
            "params": {"m": p.m, "c0": q(p.c0), "alpha": q(p.alpha), "t": q(p.t)},
            "status": self.status,
            "eps1_sup": q(self.eps1_sup),
            "eps0": q(self.eps0),
            "exrip_z": q(self.exrip_z),
            "optimum": None,
        }
        if self.optimum is not None:
            out["optimum"] = {v: q(getattr(self.optimum, v)) for v in VARIABLES}
            out["duals"] = {k: q(v) for k, v in self.duals.items()}
        return out


def _dec(v, digits=12):
    if v == 0:
        return "0"
    with mpmath.workdps(digits + 10):
        return mpmath.nstr(mpmath.mpf(v.numerator) / v.denominator, digits)


def maximize_eps1(params):
    cons = build_constraints(params)
    c = [1] + [0] * (len(VARIABLES) - 1)
    sol = simplex.maximize(c, [k.coeffs for k in cons], [k.rhs for k in cons])
    if sol.status != simplex.OPTIMAL:
        return LpResult(params, sol.status, pivots=sol.pivots)
    tup = FeasibleTuple(*sol.x)
    return LpResult(
        params,
        sol.status,
        tup,
        sol.objective,
        dict(zip(CONSTRAINT_NAMES, sol.duals)),
        dict(zip(VARIABLES, sol.reduced_costs)),
        sol.pivots,
    )


def sweep_m(m_list, c0=C0_DEFAULT, digits=40):
    """(m, LpResult) for each m, in the given order."""
    if not m_list:
        raise ValueError("empty m grid")
    return [(m, maximize_eps1(MachineParams.for_m(m, c0, digits))) for m in m_list]


def geometric_grid(start, stop, factor):
    """Even integers nearest start * factor^k for every k keeping the value <= stop."""
    if start <= 0 or factor <= 1:
        raise ValueError("grid needs start > 0 and factor > 1")
    out = []
    k = 0
    while True:
        v = start * factor**k
        if v > stop * (1 + 1e-12):
            break
        m = max(2, 2 * round(v / 2))
        if not out or m != out[-1]:
            out.append(m)
        k += 1
    return out


def default_grid(points=30, lo=1e6, hi=1e9):
    """The 30-point logarithmic grid over [1e6, 1e9]."""
    factor = (hi / lo) ** (1.0 / (points - 1))
    return geometric_grid(lo, hi, factor)
