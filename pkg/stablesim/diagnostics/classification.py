from dataclasses import dataclass, field

from stablesim.models import ProcessKind

RECURRENCE_MIN_FRACTION = 0.9


@dataclass(frozen=True)
class FlowClassification:
    recurrent: bool
    conservative: bool
    null: bool
    excluded_classes: list = field(default_factory=list)
    notes: list = field(default_factory=list)

    @property
    def consistent(self):
        """Conservative null flow, as an indicator FSM must be"""
        return self.conservative and self.null

    def as_dict(self):
        return {
            'recurrent': self.recurrent,
            'conservative': self.conservative,
            'null': self.null,
            'excluded_classes': list(self.excluded_classes),
            'notes': list(self.notes),
        }


def classify_flow(recurrence, mixing_ok, conservativity_ok, feasibility, alpha,
                  min_fraction=RECURRENCE_MIN_FRACTION):
    """Place the generating flow from the outcomes of the noise diagnostics.

    A divergent occupation sum with a recurrent subordinator gives a
    conservative flow; mixing noise gives a null flow.
    """
    recurrent = min(recurrence.frac_exceed_up, recurrence.frac_exceed_down) >= min_fraction
    conservative = bool(conservativity_ok and recurrent)
    null = bool(mixing_ok)

    excluded = []
    notes = [f"recurrence at level {recurrence.level:g}: up {recurrence.frac_exceed_up:.3f}, "
             f"down {recurrence.frac_exceed_down:.3f}"]
    if null:
        excluded.append('real harmonizable FSM (positive flow)')
    if conservative:
        excluded.append('linear FSM (dissipative flow)')

    if feasibility.process is ProcessKind.IFSM:
        if 1.0 < alpha < 2.0:
            excluded.append('LT-FSM (exponent ranges (0, 1/alpha) and (1/alpha, 1) are disjoint)')
        elif alpha == 2.0:
            notes.append('alpha = 2: the process is fractional Brownian motion with H < 1/2')
    return FlowClassification(recurrent, conservative, null, excluded, notes)
