"""
Copyright (c) 2024 The pauliflow authors.

A circuit of majority-vote gates whose truncated Pauli-path estimate
fails for any cutoff that does not grow with the observable size.

Rows of a 3 x n/3 lattice each carry one V gate. The observable O_k is
the product of Z on the first qubit of the first k rows (qubit 3i with
0-based row i), so F_w(O_k) is the k-fold convolution of the single-gate
polynomial {2: 3/2, 4: -1/2}.
"""
import logging
import math
from dataclasses import dataclass, field
from typing import Dict, Iterable, List, Optional

import torch

from . import gates as G
from .accumulate import ExactSum
from .circuit import Circuit, Gate
from .pauli import Observable, PauliString
from .polynomial import WeightPolynomial

logger = logging.getLogger(__name__)

MAGNITUDE_P_MAX = 1.0 - math.sqrt(2.0 / 3.0)


def v_gate() -> torch.Tensor:
    """Permutation with V|100> = |011>, V|011> = |100>, other states fixed."""
    perm = list(range(8))
    perm[0b100], perm[0b011] = 0b011, 0b100
    v = torch.zeros(8, 8, dtype=G.DTYPE)
    for src, dst in enumerate(perm):
        v[dst, src] = 1.0
    assert G.is_unitary(v), "V must be unitary."
    return v


def counterexample_circuit(n: int) -> Circuit:
    """One layer with a V gate on every row of the 3 x n/3 lattice."""
    if n <= 0 or n % 3 != 0:
        raise ValueError(f"n={n} must be a positive multiple of 3.")
    v = v_gate()
    rows = n // 3
    layer = tuple(Gate("U", ((0, y), (1, y), (2, y)), v, label="V") for y in range(rows))
    return Circuit((3, rows), (layer,))


def observable_ok(n: int, k: int) -> PauliString:
    """Z on qubit 3i for each of the first k rows."""
    if not 1 <= k <= n // 3:
        raise ValueError(f"k={k} must lie in [1, n/3={n // 3}].")
    return PauliString.from_sparse(n, {3 * i: "Z" for i in range(k)})


def analytic_fw(k: int, w: int) -> float:
    """(3/2)^(2k - w/2) (-1/2)^(w/2 - k) C(k, 2k - w/2) for even 2k <= w <= 4k."""
    if k < 1:
        raise ValueError(f"k={k} must be positive.")
    if w % 2 or not 2 * k <= w <= 4 * k:
        return 0.0
    j = w // 2 - k
    return 1.5 ** (k - j) * (-0.5) ** j * math.comb(k, j)


def analytic_polynomial(k: int) -> WeightPolynomial:
    return WeightPolynomial({w: analytic_fw(k, w) for w in range(2 * k, 4 * k + 1, 2)})


def hyp2f1_terminating(a: float, b: int, c: float, z: float) -> float:
    """2F1(a, b; c; z) for a non-positive integer b, as a finite sum."""
    assert b <= 0 and b == int(b), "The series terminates only for integer b <= 0."
    term, acc = 1.0, ExactSum([1.0])
    for i in range(-int(b)):
        term *= (a + i) * (b + i) / ((c + i) * (1 + i)) * z
        acc.add(term)
    return acc.value


def hypergeometric_tail(k: int, ell: int, p: float) -> Optional[float]:
    """E^(ell) through the terminating hypergeometric closed form.

    Returns None at p = 1, where the closed form divides by zero.
    """
    x2 = (1.0 - p) ** 2
    j0 = max(0, ell // 2 - k + 1)
    if j0 > k:
        return 0.0
    if x2 == 0.0:
        return None
    lead = math.comb(k, j0) * (1.5 * x2) ** (k - j0) * (-0.5 * x2 * x2) ** j0
    return lead * hyp2f1_terminating(1.0, j0 - k, j0 + 1.0, x2 / 3.0)


def _tail_sum(k: int, ell: int, x: float) -> float:
    start = max(2 * k, ell + 1)
    start += start % 2
    return ExactSum(analytic_fw(k, w) * x**w for w in range(start, 4 * k + 1, 2)).value


def truncation_error(k: int, ell: int, p: float, cross_check: bool = False) -> float:
    """E^(ell) = sum over even w in (ell, 4k] of F_w (1 - p)^w."""
    if not 0.0 <= p <= 1.0:
        raise ValueError(f"Noise rate p={p} is outside [0, 1].")
    x = 1.0 - p
    if ell < 2 * k:
        # whole polynomial; avoids cancellation between huge terms at large k
        value = (1.5 * x * x - 0.5 * x**4) ** k
    else:
        value = _tail_sum(k, ell, x)
    if cross_check:
        other = hypergeometric_tail(k, ell, p)
        if other is not None:
            assert math.isclose(value, other, rel_tol=1e-10, abs_tol=1e-300), (
                f"Tail sum {value} and closed form {other} disagree."
            )
    return value


def sign_of_tail(k: int, ell: int) -> int:
    """Sign of E^(ell) for even ell in [2k, 4k)."""
    return -1 if ((ell + 2 - 2 * k) // 2) % 2 else 1


def magnitude_floor(k: int, p: float) -> float:
    """(3 (1-p)^2 / 2)^k - 1."""
    return (1.5 * (1.0 - p) ** 2) ** k - 1.0


@dataclass
class PropertyReport:
    """Checks of the tail properties over an ell grid.

    Attributes:
        passed: Property name -> whether it held.
        failures: Human-readable failed cases.
        skipped: Properties not checked and why.
    """

    k: int
    p: float
    passed: Dict[str, bool] = field(default_factory=dict)
    failures: List[str] = field(default_factory=list)
    skipped: List[str] = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return all(self.passed.values())


def verify_properties(
    k: int, ells: Optional[Iterable[int]] = None, p: float = 0.1
) -> PropertyReport:
    """Check the five tail properties for one k.

    1. F_w = 0 for w < 2k.
    2. E^(ell) = (3x^2/2 - x^4/2)^k for ell < 2k.
    3. E^(ell) = 0 for ell >= 4k.
    4. sign E^(ell) = (-1)^((ell + 2 - 2k)/2) for even ell in [2k, 4k).
    5. |E^(ell)| >= (3x^2/2)^k - 1 for 2k <= ell <= 9k/4, when
       p < 1 - sqrt(2/3).
    """
    x = 1.0 - p
    ells = list(range(0, 4 * k + 3)) if ells is None else list(ells)
    report = PropertyReport(k, p)

    def check(name: str, ok: bool, what: str) -> None:
        report.passed[name] = report.passed.get(name, True) and ok
        if not ok:
            report.failures.append(f"{name}: {what}")

    for w in range(2 * k):
        check("zero-below-2k", analytic_fw(k, w) == 0.0, f"F_{w} != 0")
    full = (1.5 * x * x - 0.5 * x**4) ** k
    for ell in ells:
        e = _tail_sum(k, ell, x)
        if ell < 2 * k:
            check("value-below-2k", math.isclose(e, full, rel_tol=1e-10, abs_tol=1e-300), f"ell={ell}")
        if ell >= 4 * k:
            check("zero-above-4k", e == 0.0, f"ell={ell}")
        if ell % 2 == 0 and 2 * k <= ell < 4 * k and x > 0:
            check("sign-alternation", math.copysign(1, e) == sign_of_tail(k, ell) and e != 0, f"ell={ell}")
    if p < MAGNITUDE_P_MAX:
        floor = magnitude_floor(k, p)
        for ell in ells:
            if 2 * k <= ell <= 9 * k / 4:
                e = truncation_error(k, ell, p)
                check("magnitude", abs(e) >= floor - 1e-12, f"ell={ell}: {abs(e)} < {floor}")
    else:
        report.skipped.append(f"magnitude: p={p} >= {MAGNITUDE_P_MAX:.6f}")
    return report


def default_g(n: int) -> int:
    """g(n) = ceil(log2(n)^2)."""
    return math.ceil(math.log2(n) ** 2)


def mixed_observable(n: int, g: Optional[int] = None) -> Observable:
    """(1/g) sum_{k=1..g} O_{4k}."""
    g = default_g(n) if g is None else g
    if n % 3 != 0 or 12 * g > n:
        raise ValueError(f"n={n} is too small for g={g} (need 12 g <= n, n % 3 == 0).")
    return Observable(tuple((1.0 / g, observable_ok(n, 4 * k)) for k in range(1, g + 1)))


@dataclass
class MixedError:
    """Truncation error of the mixed observable.

    Attributes:
        value: E_C^(ell), signed.
        g: Number of terms.
        witness_k: k in (ell/9, ell/8) maximizing |E^(ell)(O_{4k})| / g.
        witness_value: That maximum, a lower bound on the error scale.
    """

    ell: int
    value: float
    g: int
    witness_k: Optional[int]
    witness_value: Optional[float]

    @property
    def magnitude(self) -> float:
        return abs(self.value)


def mixed_observable_error(
    n: int, ell: int, p: float, g: Optional[int] = None
) -> MixedError:
    """E_C^(ell) = (1/g) sum_k E^(ell)(O_{4k}) from the analytic tails."""
    g = default_g(n) if g is None else g
    if n % 3 != 0 or 12 * g > n:
        raise ValueError(f"n={n} is too small for g={g} (need 12 g <= n, n % 3 == 0).")
    tails = [truncation_error(4 * k, ell, p) for k in range(1, g + 1)]
    value = ExactSum(t / g for t in tails).value
    candidates = [
        (abs(tails[k - 1]) / g, k) for k in range(1, g + 1) if 8 * k < ell < 9 * k
    ]
    witness_value, witness_k = max(candidates) if candidates else (None, None)
    return MixedError(ell, value, g, witness_k, witness_value)


def error_sweep(
    n: int, ells: Iterable[int], p: float, g: Optional[int] = None
) -> List[MixedError]:
    return [mixed_observable_error(n, ell, p, g) for ell in ells]


def per_term_error(
    n: int, p: float, g: Optional[int] = None, cutoffs: Optional[Dict[int, int]] = None
) -> float:
    """Error when O_{4k} gets its own cutoff (default 16k, which is exact)."""
    g = default_g(n) if g is None else g
    cutoffs = {k: 16 * k for k in range(1, g + 1)} if cutoffs is None else cutoffs
    return ExactSum(
        truncation_error(4 * k, cutoffs[k], p) / g for k in range(1, g + 1)
    ).value

