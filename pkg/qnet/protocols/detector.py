"""
Photon detection with a single resonant node: the photon flips the node's qubit from |+> to |->.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass

import numpy as np

from qnet.protocols.base import MINUS, PLUS, resonant_node
from qnet.scatter import ideal_phase_gate

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class DetectorResponse:
    delta_p: float
    p_click: float
    p_no_click: float
    click_factor: complex
    no_click_factor: complex


def photon_detector(delta_p: float, gamma_r: float = 1.0) -> DetectorResponse:
    """Click probability |<-|sigma(delta_p)|+>|^2 and the spectral factors imprinted on the photon per outcome.

    The factors are given up to a common global phase; their squared moduli equal the two probabilities.
    """
    gate = ideal_phase_gate(resonant_node(gamma_r), delta_p)
    p_click = float(abs(MINUS @ gate @ PLUS) ** 2)
    p_no_click = float(abs(PLUS @ gate @ PLUS) ** 2)
    denominator = gamma_r**2 - 2j * gamma_r * delta_p - 2 * delta_p**2
    return DetectorResponse(
        delta_p=delta_p,
        p_click=p_click,
        p_no_click=p_no_click,
        click_factor=complex(-(gamma_r**2) / denominator),
        no_click_factor=complex(2j * delta_p**2 / denominator),
    )


def detection_probability(delta_p: float | np.ndarray, gamma_r: float = 1.0) -> float | np.ndarray:
    """Closed form gamma_r^4 / (gamma_r^4 + 4 delta_p^4)"""
    return gamma_r**4 / (gamma_r**4 + 4 * np.asarray(delta_p) ** 4)
