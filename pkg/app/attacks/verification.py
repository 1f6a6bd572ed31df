"""
Checking that an attack never produces an error or invalid outcome.
"""
import logging
from dataclasses import dataclass

from core.errors import DimensionMismatchError
from fockspace.constants import TOLERANCE
from attacks.constraints import build_constraint_system
from receivers.builders import alice_for
from receivers.reversal import reversed_space

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class ObliviousReport:
    oblivious: bool
    max_error_amplitude: float
    isometry_residual: float
    rows: tuple

    def as_dict(self):
        return {
            'oblivious': self.oblivious,
            'max_error_amplitude': self.max_error_amplitude,
            'isometry_residual': self.isometry_residual,
            'per_row_residuals': list(self.rows),
        }


def align(attack, receiver, alice=None):
    """Return the attack re-expressed over the receiver's H^P."""
    alice = alice_for(receiver) if alice is None else alice
    if list(attack.alice_labels) != alice.logical_labels:
        raise DimensionMismatchError(
            'Attack and source use different logical states.',
            {'attack': list(attack.alice_labels),
             'alice': alice.logical_labels},
        )
    return attack.rebase(reversed_space(receiver)), alice


def verify_oblivious(attack, receiver, alice=None, invalid_as_loss=False):
    """Report the Eve-vector norm left on every error and invalid outcome.

    oblivious only looks at those residuals. Whether the coefficient table
    is an isometry is a separate check reported as isometry_residual, so a
    zero or unnormalized table can still come out oblivious.
    """
    attack, alice = align(attack, receiver, alice)
    system = build_constraint_system(
        receiver, alice, attack.p_basis, invalid_as_loss)
    residuals = system.residuals(attack.coefficients)
    rows = tuple(
        dict(row.as_dict(), residual=float(value))
        for row, value in zip(system.rows, residuals)
    )
    largest = float(residuals.max(initial=0.0))
    report = ObliviousReport(
        oblivious=largest < TOLERANCE,
        max_error_amplitude=largest,
        isometry_residual=attack.isometry_residual(),
        rows=rows,
    )
    logger.info('Verified %s against %s: oblivious=%s max=%.3g',
                attack.name, receiver.kind, report.oblivious, largest)
    return report
