from dataclasses import dataclass

from stablesim.models import ProcessKind


@dataclass(frozen=True)
class FeasibilityReport:
    process: ProcessKind
    H: float
    lower: float
    upper: float
    range_ok: bool
    regime: str

    def as_dict(self):
        return {
            'process': self.process.value,
            'H': float(self.H),
            'lower': float(self.lower),
            'upper': float(self.upper),
            'range_ok': bool(self.range_ok),
            'regime': self.regime,
        }


def feasibility_check(spec, subordinator, process=ProcessKind.IFSM):
    """Self-similarity exponent of the process and the range it must fall in.

    Reports only; never raises for an out-of-range H.
    """
    alpha = spec.alpha
    if process is ProcessKind.LEVY or subordinator is None:
        H = 1.0 / alpha
        return FeasibilityReport(ProcessKind.LEVY, H, H, H, True, 'SaS Levy motion (H = 1/alpha)')

    h_prime = subordinator.self_similarity_exponent
    if process is ProcessKind.IFSM:
        H = h_prime / alpha
        lower, upper = 0.0, 1.0 / alpha
        regime = 'fractional Brownian motion, H < 1/2' if alpha == 2.0 else 'indicator FSM'
    else:
        H = 1.0 - h_prime + h_prime / alpha
        lower, upper = sorted((1.0 / alpha, 1.0))
        if alpha == 2.0:
            regime = 'fractional Brownian motion, H > 1/2'
        elif alpha == 1.0:
            regime = 'local time FSM, degenerate range H = 1'
        else:
            regime = 'local time FSM'

    if lower == upper:
        range_ok = abs(H - lower) < 1e-12
    else:
        range_ok = lower < H < upper
    return FeasibilityReport(process, H, lower, upper, range_ok, regime)
