"""
Real eigenvalues of generalized Sturm-Liouville problems by Prufer shooting.

The weighted classical problem -(R y')' + Q y = lambda W y is written in scaled
Prufer variables
    y = rho sin(theta) / sqrt(S),   u = R y' = rho sqrt(S) cos(theta)
    theta'    = (S / R) cos^2 + ((lambda W - Q) / S) sin^2
    (ln rho)' = (S / R - (lambda W - Q) / S) sin cos
with S = sqrt(max(|lambda|, 1)). The n-th eigenvalue of a branch is where the
terminal angle reaches n pi minus the scaled boundary angle at b. Both ends and
every interior singular point are crossed by an eta-wide first-order jump that
uses the integrals of 1/R, Q and W over the jump.
"""
import logging
import math
import time
from dataclasses import dataclass
from typing import Dict, List, Optional, Tuple

import numpy as np
from scipy import integrate, optimize

from gencalc.core.config import settings
from gencalc.core.errors import (
    BracketError,
    IntegrationError,
    NonInvertibleTimeChangeError,
    QuadratureError,
    SLProblemError,
)
from gencalc.core.logging import get_metrics_logger, monitor_performance
from gencalc.core.models import Spectrum
from gencalc.services.sturm_liouville_service.problem import SLProblem
from gencalc.utils.quadrature import integrate_split, require_integral

logger = logging.getLogger(__name__)

SIDES = ("plus", "minus")
# root-weight integrals at or below this mean the weight has no part of that sign
EMPTY_SIDE_INTEGRAL = 1e-14
_SCAN_POINTS = 401
_WINDING_SLACK = 1e-8


@dataclass(frozen=True)
class _Jump:
    lo: float
    hi: float
    inv_R: float
    Q: float
    W: float


@dataclass(frozen=True)
class _Segment:
    lo: float
    hi: float


@dataclass(frozen=True, eq=False)
class EigenFunction:
    """
    Eigenfunction samples normalised to max |y| = 1.

    Attributes:
        lam: Eigenvalue
        t: Sample points, a and b included
        y: y(t)
        Dy: Generalized derivative p_h y' at t
        residual: Sup of the integral-form residuals
            u(t) - u(t0) - int (Q - lambda W) y and y(t) - y(t0) - int u / R,
            scaled by max(1, max |u|)
        oscillations: Interior zeros counted from the Prufer angle
    """

    lam: float
    t: np.ndarray
    y: np.ndarray
    Dy: np.ndarray
    residual: float
    oscillations: int


def _scale(lam: float) -> float:
    return math.sqrt(max(abs(lam), 1.0))


def _scaled_angle(angle: float, S: float) -> float:
    return math.atan2(S * math.sin(angle), math.cos(angle))


def oscillation_count(theta_b: float) -> int:
    """Interior zeros of y for a terminal Prufer angle theta_b."""
    return max(math.ceil(theta_b / math.pi - _WINDING_SLACK) - 1, 0)


class PruferShooter:
    """
    Shooting in the scaled Prufer angle for one problem.

    Terminal angles are cached per lambda, so scanning and bracketing several
    eigenvalues reuse integrations.
    """

    def __init__(self, prob: SLProblem):
        """
        Prepare the integration path of a problem.

        Raises:
            NonInvertibleTimeChangeError: If P p_h is not positive on (a, b)
            SLProblemError: If a coefficient cannot be integrated over a jump
        """
        self.prob = prob
        self._check_positive()
        self.path = self._build_path()
        self.definite, self.weight_sign = self._classify_weight()
        self._cache: Dict[float, Tuple[float, float]] = {}

    def _interior_samples(self) -> np.ndarray:
        prob = self.prob
        ts = np.linspace(prob.a, prob.b, _SCAN_POINTS + 2)[1:-1]
        return ts[~np.isin(ts, prob.split_points)]

    def _check_positive(self) -> None:
        prob = self.prob
        with np.errstate(all="ignore"):
            R = np.array([float(prob.P(t)) * prob.ph(t) for t in self._interior_samples()])
        if not np.all(R > 0.0):
            raise NonInvertibleTimeChangeError(
                f"P p_h changes sign or vanishes for {prob.pm.label}; the time change is "
                "not one-to-one and shooting is not available",
                details={"negative_fraction": float(np.mean(~(R > 0.0)))},
            )

    def _classify_weight(self) -> Tuple[bool, int]:
        with np.errstate(all="ignore"):
            W = np.array([self.prob.W(t) for t in self._interior_samples()])
        if np.all(W >= 0.0) and np.any(W > 0.0):
            return True, 1
        if np.all(W <= 0.0) and np.any(W < 0.0):
            return True, -1
        if not np.any(W != 0.0):
            raise SLProblemError("The weight w vanishes identically")
        return False, 0

    def _jump(self, lo: float, hi: float) -> _Jump:
        prob = self.prob
        values = {}
        for name, func in (("inv_R", prob.inv_R), ("Q", prob.Q), ("W", prob.W)):
            result = integrate_split(func, lo, hi, prob.singular_points)
            if not result.converged:
                raise SLProblemError(
                    f"Coefficient {name} cannot be integrated over [{lo:.3g}, {hi:.3g}]",
                    details={"message": result.message},
                )
            values[name] = result.value
        return _Jump(lo, hi, **values)

    def _build_path(self) -> List[object]:
        prob, eta = self.prob, settings.SL_ETA
        singular = set(prob.singular_points)
        nodes = [prob.a] + list(prob.split_points) + [prob.b]
        if min(np.diff(nodes)) <= 2.0 * eta:
            raise SLProblemError("Breakpoints are closer than the jump width", details={"eta": eta})

        path: List[object] = [self._jump(prob.a, prob.a + eta)]
        start = prob.a + eta
        for s in prob.split_points:
            if s in singular:
                path.append(_Segment(start, s - eta))
                path.append(self._jump(s - eta, s + eta))
                start = s + eta
            else:
                path.append(_Segment(start, s))
                start = s
        path.append(_Segment(start, prob.b - eta))
        path.append(self._jump(prob.b - eta, prob.b))
        return path

    def _rhs(self, t: float, state, lam: float, S: float, amplitude: bool):
        prob = self.prob
        theta = state[0]
        c, s = math.cos(theta), math.sin(theta)
        inv_r = prob.inv_R(t)
        g = (lam * prob.W(t) - prob.Q(t)) / S
        dtheta = S * inv_r * c * c + g * s * s
        if not amplitude:
            return [dtheta]
        return [dtheta, (S * inv_r - g) * s * c]

    @staticmethod
    def _apply_jump(jump: _Jump, theta: float, log_rho: float, lam: float, S: float):
        c, s = math.cos(theta), math.sin(theta)
        g = (lam * jump.W - jump.Q) / S
        return (
            theta + S * jump.inv_R * c * c + g * s * s,
            log_rho + (S * jump.inv_R - g) * s * c,
        )

    def _solve(self, segment: _Segment, state, lam: float, S: float, amplitude: bool):
        sol = integrate.solve_ivp(
            self._rhs,
            (segment.lo, segment.hi),
            state,
            method="DOP853",
            rtol=settings.ODE_RTOL,
            atol=settings.ODE_ATOL,
            args=(lam, S, amplitude),
            dense_output=amplitude,
        )
        if sol.status < 0:
            raise IntegrationError(
                f"Prufer integration failed on [{segment.lo:.6g}, {segment.hi:.6g}] "
                f"for lambda={lam:.10g}: {sol.message}",
                details={"lambda": lam, "segment": [segment.lo, segment.hi]},
            )
        return sol

    def initial_angle(self, S: float) -> float:
        return _scaled_angle(self.prob.mu, S)

    def target(self, n: int, S: float) -> float:
        """Terminal angle of the n-th eigenfunction (n - 1 interior zeros)."""
        return n * math.pi - _scaled_angle(self.prob.nu, S)

    def terminal_angle(self, lam: float) -> Tuple[float, float]:
        """(theta(b), S) for the given lambda."""
        lam = float(lam)
        if lam in self._cache:
            return self._cache[lam]
        S = _scale(lam)
        theta, log_rho = self.initial_angle(S), 0.0
        for piece in self.path:
            if isinstance(piece, _Jump):
                theta, log_rho = self._apply_jump(piece, theta, log_rho, lam, S)
            else:
                theta = float(self._solve(piece, [theta], lam, S, False).y[0, -1])
        self._cache[lam] = (theta, S)
        return theta, S

    def mismatch(self, lam: float, n: int) -> float:
        theta, S = self.terminal_angle(lam)
        return theta - self.target(n, S)

    def branch(
        self, direction: int, count: int, whole_line: bool, offset: int = 0
    ) -> Tuple[List[float], List[int]]:
        """
        count eigenvalues of lambda = direction * s as s grows, after skipping
        the first offset ones.

        Raises:
            BracketError: If the scan reaches SL_LAMBDA_MAX before bracketing
        """
        lam_max = settings.SL_LAMBDA_MAX

        def at(s: float) -> float:
            return direction * s

        scan = [0.0]
        first = 1
        if whole_line:
            s = -1.0
            while self.mismatch(at(scan[0]), 1) >= 0.0:
                if abs(s) > lam_max:
                    raise BracketError(
                        "No lambda below the first eigenvalue was found",
                        details={"window": [at(scan[0]), at(0.0)]},
                    )
                scan.insert(0, s)
                s *= 2.0
        else:
            theta0, S0 = self.terminal_angle(0.0)
            while self.target(first, S0) <= theta0:
                first += 1
        first += offset
        last = first + count - 1

        s = 1.0
        while self.mismatch(at(scan[-1]), last) < 0.0:
            if s > lam_max:
                raise BracketError(
                    f"Eigenvalue {last} not bracketed below |lambda| = {lam_max:g}",
                    details={"window": [at(scan[0]), at(scan[-1])]},
                )
            scan.append(s)
            s *= 2.0

        eigenvalues, counts = [], []
        for n in range(first, last + 1):
            values = [self.mismatch(at(x), n) for x in scan]
            root = None
            for (x0, m0), (x1, m1) in zip(zip(scan[:-1], values[:-1]), zip(scan[1:], values[1:])):
                if m0 < 0.0 <= m1:
                    root = x1 if m1 == 0.0 else optimize.brentq(
                        lambda x, n=n: self.mismatch(at(x), n), x0, x1, xtol=1e-12, rtol=1e-13
                    )
                    break
            if root is None:
                raise BracketError(
                    f"Eigenvalue {n} of the {'plus' if direction > 0 else 'minus'} branch "
                    "was not bracketed",
                    details={"window": [at(scan[0]), at(scan[-1])], "index": n},
                )
            lam = at(root)
            eigenvalues.append(lam)
            counts.append(oscillation_count(self.terminal_angle(lam)[0]))
        return eigenvalues, counts

    def eigenfunction(self, lam: float, samples: int = 200) -> EigenFunction:
        """
        Reconstruct the eigenfunction of lam from the Prufer amplitude and angle.

        Raises:
            IntegrationError: If an integration segment fails
        """
        prob = self.prob
        S = _scale(lam)
        theta, log_rho = self.initial_angle(S), 0.0
        width = prob.b - prob.a
        pieces = []  # (ts, theta, log_rho, dense solution or None)
        pieces.append((np.array([prob.a]), np.array([theta]), np.array([log_rho]), None))
        for piece in self.path:
            if isinstance(piece, _Jump):
                theta, log_rho = self._apply_jump(piece, theta, log_rho, lam, S)
                if piece.hi == prob.b:
                    end = (np.array([prob.b]), np.array([theta]), np.array([log_rho]), None)
                    pieces.append(end)
                continue
            sol = self._solve(piece, [theta, log_rho], lam, S, True)
            m = max(3, int(math.ceil(samples * (piece.hi - piece.lo) / width)))
            ts = np.linspace(piece.lo, piece.hi, m)
            states = sol.sol(ts)
            pieces.append((ts, states[0], states[1], sol.sol))
            theta, log_rho = float(sol.y[0, -1]), float(sol.y[1, -1])

        shift = max(float(np.max(p[2])) for p in pieces)
        y_parts, u_parts = [], []
        for ts, th, lr, _ in pieces:
            rho = np.exp(lr - shift)
            y_parts.append(rho * np.sin(th) / math.sqrt(S))
            u_parts.append(rho * math.sqrt(S) * np.cos(th))
        norm = max(float(np.max(np.abs(part))) for part in y_parts)
        t_all = np.concatenate([p[0] for p in pieces])
        y_all = np.concatenate(y_parts) / norm
        u_all = np.concatenate(u_parts) / norm
        P_all = np.array([float(prob.P(t)) for t in t_all])
        u_scale = max(1.0, float(np.max(np.abs(u_all))))

        residual = 0.0
        for (ts, _, _, dense) in pieces:
            if dense is None:
                continue

            def y_of(s, dense=dense):
                th, lr = dense(s)
                return math.exp(lr - shift) * math.sin(th) / math.sqrt(S) / norm

            def u_of(s, dense=dense):
                th, lr = dense(s)
                return math.exp(lr - shift) * math.sqrt(S) * math.cos(th) / norm

            def source(s):
                return (prob.Q(s) - lam * prob.W(s)) * y_of(s)

            def slope(s):
                return u_of(s) * prob.inv_R(s)

            acc_u = acc_y = 0.0
            for lo, hi in zip(ts[:-1], ts[1:]):
                acc_u += require_integral(source, lo, hi, (), "eigenfunction residual")
                acc_y += require_integral(slope, lo, hi, (), "eigenfunction residual")
                residual = max(
                    residual,
                    abs(u_of(hi) - u_of(ts[0]) - acc_u) / u_scale,
                    abs(y_of(hi) - y_of(ts[0]) - acc_y),
                )
        return EigenFunction(
            lam=lam,
            t=t_all,
            y=y_all,
            Dy=u_all / P_all,
            residual=residual,
            oscillations=oscillation_count(theta),
        )


def _root_weight_integral(prob: SLProblem, side: str, weyl: bool) -> float:
    sign = 1.0 if side == "plus" else -1.0

    def integrand(s: float) -> float:
        if weyl:
            value = sign * float(prob.w(s)) / float(prob.P(s))
            return math.sqrt(max(value, 0.0)) / abs(prob.ph(s))
        return math.sqrt(max(sign * prob.W(s), 0.0))

    return require_integral(integrand, prob.a, prob.b, prob.split_points, "asymptotic constant")


def _check_side(side: str) -> None:
    if side not in SIDES:
        raise SLProblemError(f"side must be one of {SIDES}, got {side!r}")


def _estimate(prob: SLProblem, n: int, side: str, weyl: bool) -> float:
    _check_side(side)
    if n < 1:
        raise SLProblemError(f"n must be positive, got {n}")
    denominator = _root_weight_integral(prob, side, weyl)
    if denominator <= EMPTY_SIDE_INTEGRAL:
        raise SLProblemError(
            f"The {side} side has no asymptotic sequence: the weight has no {side} part",
            details={"side": side, "integral": denominator},
        )
    sign = 1.0 if side == "plus" else -1.0
    return sign * (n * math.pi) ** 2 / denominator**2


def asymptotic_estimate(prob: SLProblem, n: int, side: str) -> float:
    """
    +-n^2 pi^2 / (int_a^b sqrt((w / p_h)_+-) ds)^2.

    Raises:
        SLProblemError: If the integral vanishes, so the side has no sequence
    """
    return _estimate(prob, n, side, weyl=False)


def weyl_estimate(prob: SLProblem, n: int, side: str) -> float:
    """
    +-n^2 pi^2 / (int_a^b sqrt((w / P)_+-) / |p_h| ds)^2, the Weyl law of the
    weighted classical problem.

    Raises:
        SLProblemError: If the integral vanishes
    """
    return _estimate(prob, n, side, weyl=True)


def _estimates(prob: SLProblem, count: int, side: str, weyl: bool) -> List[Optional[float]]:
    try:
        return [_estimate(prob, n, side, weyl) for n in range(1, count + 1)]
    except SLProblemError:
        return [None] * count


@monitor_performance("shoot_eigenvalues")
def shoot_eigenvalues(prob: SLProblem, n_per_side: int = 5) -> Spectrum:
    """
    The first n_per_side real eigenvalues of each branch.

    A definite weight has one branch, scanned over the whole real line. An
    indefinite weight is scanned on lambda > 0 for the plus branch and
    lambda < 0 for the minus branch.

    Raises:
        NonInvertibleTimeChangeError: If P p_h is not positive
        BracketError: If an eigenvalue cannot be bracketed below SL_LAMBDA_MAX
        IntegrationError: If the Prufer integration fails
    """
    if n_per_side < 1:
        raise SLProblemError(f"n_per_side must be positive, got {n_per_side}")
    shooter = PruferShooter(prob)
    spectrum = Spectrum(definite=shooter.definite)
    metrics = get_metrics_logger()

    for side, direction in (("plus", 1), ("minus", -1)):
        if shooter.definite and shooter.weight_sign != direction:
            continue
        start = time.perf_counter()
        values, counts = shooter.branch(direction, n_per_side, whole_line=shooter.definite)
        duration_ms = (time.perf_counter() - start) * 1000
        metrics.log_eigenvalue_search(
            side, len(values), n_per_side, [values[0], values[-1]], duration_ms
        )
        if side == "plus":
            spectrum.lambda_plus, spectrum.oscillation_counts_plus = values, counts
        else:
            spectrum.lambda_minus, spectrum.oscillation_counts_minus = values, counts

    for side in SIDES:
        for key, weyl in ((side, False), (f"weyl_{side}", True)):
            try:
                constant = _root_weight_integral(prob, side, weyl)
            except QuadratureError as e:
                logger.warning(f"Asymptotic constant {key} unavailable: {e}")
                continue
            # a side whose weight has no part of that sign has no constant
            if constant > EMPTY_SIDE_INTEGRAL:
                spectrum.asymptotic_constants[key] = constant
        spectrum.asymptotic[side] = _estimates(prob, n_per_side, side, weyl=False)
        spectrum.weyl[side] = _estimates(prob, n_per_side, side, weyl=True)
    logger.info(
        f"Spectrum of {prob.pm.label} on [{prob.a:g}, {prob.b:g}]: "
        f"{len(spectrum.lambda_plus)} plus, {len(spectrum.lambda_minus)} minus"
    )
    return spectrum


def eigenfunction(prob: SLProblem, lam: float, samples: int = 200) -> EigenFunction:
    """Eigenfunction samples (t, y, Dy) for a computed eigenvalue."""
    return PruferShooter(prob).eigenfunction(lam, samples)
