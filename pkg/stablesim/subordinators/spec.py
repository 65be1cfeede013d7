from dataclasses import dataclass

from stablesim.errors import ParameterError
from stablesim.models import SubordinatorKind


def subordinator_violations(kind, hurst=None, beta=None, sigma=1.0):
    """Every range violation of a subordinator description (empty when valid)"""
    problems = []
    if kind is SubordinatorKind.FBM:
        if hurst is None or not 0.0 < hurst < 1.0:
            problems.append(f"hurst must lie in (0,1) for a fractional Brownian subordinator, got {hurst}")
    elif kind is SubordinatorKind.STABLE_LEVY:
        if beta is None or not 1.0 < beta <= 2.0:
            problems.append(f"beta must lie in (1,2] for a stable Levy subordinator (finite first moment), got {beta}")
    else:
        problems.append(f"unknown subordinator kind {kind!r}")
    if sigma is None or not sigma > 0:
        problems.append(f"sigma must be positive, got {sigma}")
    return problems


@dataclass(frozen=True)
class SubordinatorSpec:
    kind: SubordinatorKind
    hurst: float = None
    beta: float = None
    sigma: float = 1.0

    def __post_init__(self):
        problems = subordinator_violations(self.kind, self.hurst, self.beta, self.sigma)
        if problems:
            raise ParameterError('; '.join(problems), problems)

    @classmethod
    def fbm(cls, hurst, sigma=1.0):
        return cls(SubordinatorKind.FBM, hurst=hurst, sigma=sigma)

    @classmethod
    def levy(cls, beta, sigma=1.0):
        return cls(SubordinatorKind.STABLE_LEVY, beta=beta, sigma=sigma)

    @property
    def self_similarity_exponent(self):
        if self.kind is SubordinatorKind.FBM:
            return self.hurst
        return 1.0 / self.beta

    @property
    def tail_index(self):
        """Polynomial tail exponent of A_1; Gaussian tails satisfy any such bound, 2 is used"""
        if self.kind is SubordinatorKind.FBM:
            return 2.0
        return self.beta

    def describe(self):
        return {
            'kind': self.kind.value,
            'hurst': self.hurst,
            'beta': self.beta,
            'sigma': float(self.sigma),
        }
