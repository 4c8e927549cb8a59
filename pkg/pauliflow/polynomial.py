"""
Copyright (c) 2024 The pauliflow authors.

The noisy expectation value as a polynomial in x = 1 - p.
"""
import logging
import math
from dataclasses import dataclass, field
from typing import Dict, List, Optional, Sequence, Tuple, Union

import torch

logger = logging.getLogger(__name__)

REAL_RTOL = 1e-8


@dataclass
class WeightPolynomial:
    """Coefficients F_w of <O> = sum_w F_w (1 - p)^w.

    Args:
        coeffs: Map weight w -> F_w. Zero coefficients may be omitted.
        counts: Optional. Map weight w -> number of nonzero paths N_w that
            contributed to F_w.
    """

    coeffs: Dict[int, float]
    counts: Dict[int, int] = field(default_factory=dict)

    def __post_init__(self):
        for w in self.coeffs:
            if w < 0:
                raise ValueError(f"Negative weight {w}.")

    @classmethod
    def from_dense(cls, values: Sequence[float]) -> "WeightPolynomial":
        return cls({w: float(v) for w, v in enumerate(values) if v != 0.0})

    @property
    def degree(self) -> int:
        """Largest w with F_w != 0, or -1 for the zero polynomial."""
        nz = [w for w, v in self.coeffs.items() if v != 0.0]
        return max(nz) if nz else -1

    @property
    def is_zero(self) -> bool:
        return self.degree < 0

    def get(self, w: int) -> float:
        return self.coeffs.get(w, 0.0)

    def dense(self) -> List[float]:
        return [self.get(w) for w in range(self.degree + 1)]

    def truncated(self, ell: Optional[int]) -> "WeightPolynomial":
        if ell is None:
            return self
        return WeightPolynomial(
            {w: v for w, v in self.coeffs.items() if w <= ell},
            {w: c for w, c in self.counts.items() if w <= ell},
        )

    def __call__(self, x: float) -> float:
        value = 0.0
        for c in reversed(self.dense()):
            value = value * x + c
        return value


def evaluate(poly: WeightPolynomial, p: float) -> float:
    """Horner evaluation at x = 1 - p."""
    if not 0.0 <= p <= 1.0:
        raise ValueError(f"Noise rate p={p} is outside [0, 1].")
    return poly(1.0 - p)


def l2_norm(poly: WeightPolynomial) -> float:
    return math.sqrt(math.fsum(v * v for v in poly.coeffs.values()))


@dataclass
class RootProfile:
    """Roots of a weight polynomial in the variable x = 1 - p.

    Roots are sorted by (|r|, Re r, Im r).
    """

    roots: torch.Tensor
    leading: float
    all_real: bool
    count_within_R: Dict[float, int]

    @property
    def degree(self) -> int:
        return int(self.roots.numel())

    def magnitudes(self) -> List[float]:
        return self.roots.abs().tolist()

    def reconstruct(self) -> torch.Tensor:
        """Ascending coefficients of leading * prod (x - r_i)."""
        coeffs = torch.ones(1, dtype=torch.complex128)
        for r in self.roots:
            shifted = torch.zeros(coeffs.numel() + 1, dtype=torch.complex128)
            shifted[1:] = coeffs
            shifted[:-1] -= r * coeffs
            coeffs = shifted
        return (coeffs * self.leading).real


def find_roots(
    poly: WeightPolynomial, radii: Sequence[float] = (0.5, 1.0, 2.0)
) -> RootProfile:
    """All complex roots via companion matrix eigenvalues."""
    dense = poly.dense()
    if not dense:
        raise ValueError("The zero polynomial has no root profile.")
    if len(dense) < 2:
        raise ValueError("Root finding needs degree >= 1.")

    low = next(w for w, v in enumerate(dense) if v != 0.0)
    core = torch.tensor(dense[low:], dtype=torch.float64)
    r = core.numel() - 1
    parts = [torch.zeros(low, dtype=torch.complex128)]
    if r > 0:
        monic = core[:-1] / core[-1]
        companion = torch.zeros(r, r, dtype=torch.float64)
        if r > 1:
            companion[1:, :-1] = torch.eye(r - 1, dtype=torch.float64)
        companion[:, -1] = -monic
        parts.append(torch.linalg.eigvals(companion).to(torch.complex128))
    values = sorted(
        torch.cat(parts).tolist(), key=lambda z: (abs(z), z.real, z.imag)
    )
    roots = torch.tensor(values, dtype=torch.complex128)
    all_real = bool(
        (roots.imag.abs() < REAL_RTOL * (1.0 + roots.real.abs())).all().item()
    )
    mags = roots.abs()
    within = {float(R): int((mags <= R).sum().item()) for R in radii}
    return RootProfile(roots, dense[-1], all_real, within)


@dataclass
class RadiusBound:
    """The bound (||F||_2/|F_M|)^(1/(M-k-1)) and the roots it covers."""

    k: int
    bound: float
    checked: List[float]
    holds: bool


def root_radius_bound(
    poly: WeightPolynomial, k: int, profile: Optional[RootProfile] = None
) -> RadiusBound:
    """Radius bound on the k-th smallest root magnitude (k is 1-based).

    `checked` holds the k smallest magnitudes; since they are sorted, the
    bound holds for all of them exactly when it holds for the k-th.
    """
    M = poly.degree
    if M < 0 or poly.get(M) == 0.0:
        raise ValueError("Leading coefficient must be nonzero.")
    if k < 1 or k >= M - 1:
        raise ValueError(f"Root index k={k} must satisfy 1 <= k < M-1={M - 1}.")
    bound = (l2_norm(poly) / abs(poly.get(M))) ** (1.0 / (M - k - 1))
    if profile is None:
        profile = find_roots(poly)
    checked = profile.magnitudes()[:k]
    holds = checked[-1] <= bound * (1.0 + 1e-9) + 1e-12
    return RadiusBound(k, bound, checked, holds)


@dataclass
class Inapplicable:
    reason: str


@dataclass
class FragilityCertificate:
    """Numerical decay envelope of |Q(x)| on [1 - eps, 1).

    Attributes:
        grid: Sample points x.
        values: |Q(x)| on the grid.
        envelope: Upper envelope on the grid (the tighter of the two
            branches where both apply).
        y1_prime: d/dx log|Q| at x = 1.
        x_star: Critical point of log|Q| inside the interval, if any.
        concavity_ok: Y'' <= -g/(x+R)^2 on every grid point.
        envelope_ok: |Q(x)| <= envelope(x) on every grid point.
    """

    R: float
    epsilon: float
    g_threshold: int
    grid: List[float]
    values: List[float]
    envelope: List[float]
    y1_prime: float
    x_star: Optional[float]
    concavity_ok: bool
    envelope_ok: bool

    @property
    def holds(self) -> bool:
        return self.concavity_ok and self.envelope_ok


def log_derivatives(roots: torch.Tensor, x: torch.Tensor) -> Tuple[torch.Tensor, torch.Tensor]:
    """Y'(x) and Y''(x) of Y = log|Q| from real roots."""
    diff = x.unsqueeze(-1) - roots.real.unsqueeze(0)
    return (1.0 / diff).sum(-1), -(1.0 / diff**2).sum(-1)


def fragility_certificate(
    poly: WeightPolynomial,
    R: float,
    epsilon: float,
    g_threshold: int,
    num_points: int = 256,
    floor: float = 1e-12,
) -> Union[FragilityCertificate, Inapplicable]:
    """Check the premises and verify the decay envelope on a grid.

    Premises: all roots real, at least `g_threshold` roots with |r| <= R,
    no root in [1 - eps, 1), |Q(1)| above `floor`.
    """
    if not 0.0 < epsilon <= 1.0:
        return Inapplicable(f"epsilon={epsilon} must lie in (0, 1]")
    if poly.degree < 1:
        return Inapplicable("degree below 1")
    profile = find_roots(poly, radii=(R,))
    if not profile.all_real:
        return Inapplicable("roots not all real")
    if profile.count_within_R[float(R)] < g_threshold:
        return Inapplicable(
            f"only {profile.count_within_R[float(R)]} roots within R={R}, "
            f"need {g_threshold}"
        )
    real = profile.roots.real
    lo = 1.0 - epsilon
    if bool(((real >= lo) & (real < 1.0)).any().item()):
        return Inapplicable(f"root inside [{lo}, 1)")
    q1 = abs(poly(1.0))
    if q1 <= floor:
        return Inapplicable(f"|Q(1)|={q1} below floor {floor}")

    grid = lo + epsilon * torch.arange(num_points, dtype=torch.float64) / num_points
    values = torch.tensor([abs(poly(x)) for x in grid.tolist()], dtype=torch.float64)
    _, ypp = log_derivatives(profile.roots, grid)
    concavity_ok = bool(
        (ypp <= -g_threshold / (grid + R) ** 2 + 1e-9 * ypp.abs()).all().item()
    )

    c = g_threshold / (1.0 + R) ** 2
    y1p = log_derivatives(profile.roots, torch.tensor([1.0], dtype=torch.float64))[0]
    y1p = y1p.item()
    envelope = q1 * torch.exp(-0.5 * c * (1.0 - grid) ** 2 - y1p * (1.0 - grid))

    x_star = None
    if y1p < 0.0:
        x_star = _critical_point(profile.roots, lo, 1.0)
        if x_star is not None:
            qs = abs(poly(x_star))
            star = qs * torch.exp(-0.5 * c * (grid - x_star) ** 2)
            envelope = torch.minimum(envelope, star)

    envelope_ok = bool((values <= envelope * (1.0 + 1e-9) + 1e-300).all().item())
    if not (concavity_ok and envelope_ok):
        logger.warning(
            "Fragility check failed on the grid (concavity=%s, envelope=%s).",
            concavity_ok,
            envelope_ok,
        )
    return FragilityCertificate(
        R=R,
        epsilon=epsilon,
        g_threshold=g_threshold,
        grid=grid.tolist(),
        values=values.tolist(),
        envelope=envelope.tolist(),
        y1_prime=y1p,
        x_star=x_star,
        concavity_ok=concavity_ok,
        envelope_ok=envelope_ok,
    )


def _critical_point(roots: torch.Tensor, lo: float, hi: float) -> Optional[float]:
    """Zero of the decreasing function Y' on [lo, hi], by bisection."""

    def yp(x: float) -> float:
        return log_derivatives(roots, torch.tensor([x], dtype=torch.float64))[0].item()

    if yp(lo) < 0.0:
        return None
    for _ in range(200):
        mid = 0.5 * (lo + hi)
        if yp(mid) >= 0.0:
            lo = mid
        else:
            hi = mid
    return lo
