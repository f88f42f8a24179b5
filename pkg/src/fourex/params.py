"""Problem sizing: the (n, m, T, L) bookkeeping behind every solve.

An approximant with N = 2n+1 Fourier modes on the extended interval
[-T, T] is fitted to M = 2m+1 equispaced samples of f on [-1, 1].  All
fast paths run FFTs of length L = 2Tm, so L must be an exact integer;
T is therefore carried as an exact rational.
"""

import math
from dataclasses import dataclass
from fractions import Fraction

from .errors import DomainError, Infeasible, TleOne

DEFAULT_TAU = 1e-14

_M_LIMIT = 10**9


def as_ratio(T):
    """Coerce T to an exact Fraction.

    Strings may be "p/q" or decimal ("1.1"); floats are snapped to the
    shortest decimal they print as, then limited to denominator 1000 (the
    CLI convention).  Fractions and integers pass through exactly.
    """
    if isinstance(T, Fraction):
        return T
    if isinstance(T, int):
        return Fraction(T)
    if isinstance(T, float):
        return Fraction(str(T)).limit_denominator(1000)
    return Fraction(str(T).strip())


@dataclass(frozen=True)
class ProblemConfig:
    """Immutable sizing of one discrete FE problem.

    Attributes
    ----------
    n : int
        Half-bandwidth; the basis has N = 2n+1 modes k = -n..n.
    m : int
        Half sample count; samples sit at x_l = l/m, l = -m..m.
    T : Fraction
        Extension half-length, > 1.
    gamma : float
        The oversampling that was requested (m/n >= gamma after rounding).
    tau : float
        Truncation threshold for the TSVD regularization.
    """

    n: int
    m: int
    T: Fraction
    gamma: float
    tau: float = DEFAULT_TAU

    def __post_init__(self):
        if self.T <= 1:
            raise TleOne(f"extension parameter T must exceed 1, got {self.T}")
        if self.n < 1:
            raise DomainError(f"need n >= 1, got {self.n}")
        if not 0 < self.tau < 1:
            raise DomainError(f"need 0 < tau < 1, got {self.tau}")
        L2 = 2 * self.T * self.m
        if L2.denominator != 1:
            raise DomainError(f"L = 2*T*m = {L2} is not an integer")
        if self.M < self.N:
            raise DomainError(f"oversampled regime requires M >= N, got M={self.M} N={self.N}")
        if self.L < self.M:
            raise DomainError(f"sample count M={self.M} exceeds FFT length L={self.L}")

    @property
    def N(self):
        return 2 * self.n + 1

    @property
    def M(self):
        return 2 * self.m + 1

    @property
    def L(self):
        return int(2 * self.T * self.m)

    @property
    def gamma_effective(self):
        """Realized oversampling m/n (>= the requested gamma)."""
        return self.m / self.n


def resolve(T, n, gamma=2.0, tau=DEFAULT_TAU):
    """Pick the smallest admissible m and return the full configuration.

    m is the smallest integer >= gamma*n such that L = 2Tm is an integer
    (i.e. m is a multiple of q/gcd(q,2) for T = p/q in lowest terms) and
    L >= M holds.

    Parameters
    ----------
    T : Fraction, int, float or str
        Extension parameter, > 1.  See `as_ratio` for accepted spellings.
    n : int
        Half-bandwidth, >= 1.
    gamma : float
        Requested oversampling, >= 1.
    tau : float
        Truncation threshold, in (0, 1).

    Returns
    -------
    ProblemConfig

    Raises
    ------
    TleOne
        If T <= 1.
    Infeasible
        If no m <= 10^9 satisfies the integrality constraint.
    """
    T = as_ratio(T)
    if T <= 1:
        raise TleOne(f"extension parameter T must exceed 1, got {T}")
    if n < 1:
        raise DomainError(f"need n >= 1, got {n}")
    if gamma < 1:
        raise DomainError(f"need gamma >= 1, got {gamma}")
    if not 0 < tau < 1:
        raise DomainError(f"need 0 < tau < 1, got {tau}")

    q = T.denominator
    step = q if q % 2 else q // 2
    if step > _M_LIMIT:
        raise Infeasible(f"denominator of T = {T} forces m > {_M_LIMIT}")

    # guard the ceil against float fuzz when gamma*n is an exact integer
    target = gamma * n
    lo = math.ceil(target - 1e-9 * max(1.0, abs(target)))
    m = max(lo, n, 1)
    m = -(-m // step) * step
    # L >= M can fail for the first multiples when T is close to 1
    while 2 * T * m < 2 * m + 1:
        m += step
        if m > _M_LIMIT:
            raise Infeasible(f"no m <= {_M_LIMIT} gives L >= M for T = {T}")
    if m > _M_LIMIT:
        raise Infeasible(f"no m <= {_M_LIMIT} satisfies integrality for T = {T}")
    return ProblemConfig(n=n, m=m, T=T, gamma=gamma, tau=tau)


def extension_constant(T):
    """Fourier extension constant E(T) = cot^2(pi/(4T)), T >= 1.

    Governs the geometric convergence rate attainable on [-1, 1]; equals
    1 at T = 1 and grows monotonically with T.
    """
    if T < 1:
        raise DomainError(f"need T >= 1, got {T}")
    x = math.pi / (4.0 * T)
    return (math.cos(x) / math.sin(x)) ** 2


def resolution_bound(T):
    """Resolution constant bound r(T) = 2T sin(pi/(2T)), T >= 1.

    Degrees of freedom needed per wavelength; 2 at T = 1, approaching pi
    as T grows.
    """
    if T < 1:
        raise DomainError(f"need T >= 1, got {T}")
    return 2.0 * T * math.sin(math.pi / (2.0 * T))


def optimal_T(N, eps_tol):
    """Extension parameter that balances resolution against accuracy eps_tol.

    Returns (pi/4) / arctan(eps_tol^(1/(2N))); decreases to 1 as N grows,
    so large problems want T barely above 1.
    """
    if N < 1:
        raise DomainError(f"need N >= 1, got {N}")
    if not 0 < eps_tol <= 1:
        raise DomainError(f"need 0 < eps_tol <= 1, got {eps_tol}")
    return (math.pi / 4.0) / math.atan(eps_tol ** (1.0 / (2.0 * N)))
