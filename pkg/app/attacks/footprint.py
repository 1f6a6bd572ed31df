"""
Footprint of a synthesized or library attack.
"""
from classify.footprint import (
    ANCILLA_IN,
    ANCILLA_OUT,
    H_A,
    H_B,
    H_B_OUTSIDE,
    SpaceFootprint,
)
from attacks.verification import align


def attack_footprint(attack, receiver, alice=None):
    """Spaces the attack reads and writes.

    The attack reads Alice's signal and writes H^P. Against a receiver that
    only measures H^P after blinding, the output also affects states outside
    the legitimately measured space.
    """
    align(attack, receiver, alice)
    writes = {H_B, ANCILLA_OUT}
    if receiver.requires_blinding:
        writes.add(H_B_OUTSIDE)
    return SpaceFootprint(frozenset({H_A, ANCILLA_IN}), frozenset(writes))
