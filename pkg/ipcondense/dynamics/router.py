# ipcondense/dynamics/router.py
# Picks the dynamics implementation for a SimState by its kind (CG, TA ring, ZRP ring).

from __future__ import annotations

from typing import List

from ..schemas import DynamicsKind, ModelParams
from .base_dynamics import BaseDynamics, SimState
from .cg_dynamics import CGDynamics
from .ring_dynamics import TADynamics, ZRPDynamics


class DynamicsRouter:
    def __init__(self):
        self.dynamics: List[BaseDynamics] = [
            CGDynamics(),
            TADynamics(),
            ZRPDynamics(),
        ]

    def for_kind(self, kind: DynamicsKind) -> BaseDynamics:
        kind = DynamicsKind(kind)
        for dyn in self.dynamics:
            if dyn.can_handle(kind):
                return dyn
        raise ValueError(f"No dynamics registered for kind: {kind}")

    def run(self, state: SimState, t_target: float) -> SimState:
        return self.for_kind(state.kind).run(state, t_target)

    def burn_in(self, kind: DynamicsKind, p: ModelParams, factor: float) -> float:
        return self.for_kind(kind).burn_in(p, factor)


default_router = DynamicsRouter()
