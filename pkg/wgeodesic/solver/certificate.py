"""Optimality certificates for discrete geodesics

A dual path certifies a primal path when the velocity relation holds on
active edges, the Hamiltonian of every interval vanishes, jumps satisfy
the recession conditions, and the endpoint pairing of λ equals the
action. certify reports how far each of these is from holding.
"""

from dataclasses import asdict, dataclass
from logging import info, warning

import numpy as np

from wgeodesic.config import TAU_G
from wgeodesic.energy import (action, dual_h_batch, grad_phi_hg,
                              rho_gradients)
from wgeodesic.simplex import poincare
from wgeodesic.solver.paths import DualPath, energy_drift, energy_profile


@dataclass
class CertificateReport:
    """Residuals of the discrete optimality conditions"""

    action: float
    dual_value: float
    gap: float
    velocity_residual: float
    hj_residual: float
    pointwise_hj_residual: float
    jump_residual: float
    monotonicity_violation: float
    energy_drift: float
    momentum_bound_slack: float
    hj_certificate: str
    converged: bool = True
    iterations: int = 0

    @property
    def distance(self):
        """W_g = √(2𝒜)"""
        return float(np.sqrt(2.0 * self.action))


    def to_dict(self):
        """Return the report in the layout of the JSON report file"""
        fields = asdict(self)
        residuals = {name: fields.pop(name) for name in (
            "velocity_residual", "hj_residual", "pointwise_hj_residual",
            "jump_residual", "monotonicity_violation",
            "momentum_bound_slack")}
        fields["residuals"] = residuals
        fields["distance"] = self.distance
        return fields


def normalize_dual(dual):
    """Shift λ by a common function of time so that H = 0

    The common part max_i jumpᵏ_i is removed from every jump, so that
    H₀(jump) = 0, and each rate is shifted by -H(rateᵏ, ∇_G λ̄ᵏ), where
    λ̄ᵏ is the midpoint value. λ⁰ is kept. Both shifts move all
    coordinates together, so the gradients are unchanged.

    Return a new DualPath
    """

    jump = dual.jump.copy()
    jump -= np.where(np.any(jump != 0, axis=1), jump.max(axis=1), 0.0)[:, None]
    hamiltonians = dual_h_batch(dual.graph, dual.mobility, dual.abs_rate,
                                dual.midpoint_gradients())
    abs_rate = dual.abs_rate - hamiltonians[:, None]
    return DualPath.from_parts(dual.graph, dual.mobility, dual.lam[0], jump,
                               abs_rate)


def hamiltonian_system_residual(graph, g, path, dual, floor=1e-9):
    """Max residual of ρ̇ = ∇_φH_g(ρ, λ) and λ̇ = -∇_ρH_g(ρ, λ)

    Time derivatives are central differences at the interior nodes;
    nodes where some ρ_i ≤ floor are skipped.
    """

    rho, lam, dt = path.rho, dual.lam, path.dt
    residual = 0.0
    for k in range(1, path.K):
        if np.min(rho[k]) <= floor:
            continue
        rho_rate = (rho[k + 1] - rho[k - 1]) / (2.0 * dt)
        lam_rate = (lam[k + 1] - lam[k - 1]) / (2.0 * dt)
        residual = max(
            residual,
            float(np.max(np.abs(rho_rate
                                - grad_phi_hg(graph, g, rho[k], lam[k])))),
            float(np.max(np.abs(lam_rate + rho_gradients(
                graph, g, rho[k][None, :], lam[k][None, :])[0]))))
    return residual


def _jump_residual(dual, rho):
    residual = 0.0
    for k in np.nonzero(np.any(dual.jump != 0, axis=1))[0]:
        residual = max(residual, abs(float(dual.jump[k].max())),
                       abs(float(dual.jump[k] @ rho[k])))
    return residual


def certify(graph, g, path, dual, converged=True, iterations=0):
    """Evaluate the optimality conditions of (path, dual)

    path (DiscretePath)
    dual (DualPath): on the same time grid

    Return a CertificateReport
    """

    assert path.K == dual.K
    path_action = float(action(path))
    dual_value = dual.dual_value(path.rho0, path.rho1)

    rho_mid = path.rho_mid()
    mobility = g(rho_mid[:, graph.tails], rho_mid[:, graph.heads])
    gradients = dual.midpoint_gradients()
    active = mobility > TAU_G
    velocity = np.abs(path.m_edges() - mobility * gradients)
    velocity_residual = float(np.max(velocity[active], initial=0.0))

    hj = dual_h_batch(graph, g, dual.abs_rate, gradients)
    pointwise = np.sum(dual.abs_rate * rho_mid, axis=1) \
        + 0.5 * np.sum(mobility * gradients ** 2, axis=1)

    profile = energy_profile(path)
    momentum_slack = np.sqrt(2.0 * path_action) \
        * np.sqrt(g.max_on_unit_square()) \
        - float(np.max(np.abs(path.m_edges()), initial=0.0))

    binding = poincare(graph, g, path.rho0) > 0 \
        and poincare(graph, g, path.rho1) > 0
    if not binding:
        warning("An endpoint has gamma_P = 0; the Hamilton-Jacobi "
                "certificate is advisory")

    report = CertificateReport(
        action=path_action,
        dual_value=dual_value,
        gap=path_action - dual_value,
        velocity_residual=velocity_residual,
        hj_residual=float(np.max(np.abs(hj), initial=0.0)),
        pointwise_hj_residual=float(np.max(np.abs(pointwise), initial=0.0)),
        jump_residual=_jump_residual(dual, path.rho),
        monotonicity_violation=dual.monotonicity_violation(),
        energy_drift=energy_drift(profile),
        momentum_bound_slack=float(momentum_slack),
        hj_certificate="binding" if binding else "advisory",
        converged=converged,
        iterations=iterations)
    if report.gap < -1e-9:
        warning(f"Negative duality gap {report.gap:.3g}: the dual is not "
                "feasible")
    info(f"Certificate: action {report.action:.10g}, gap {report.gap:.3g}, "
         f"HJ residual {report.hj_residual:.3g}")
    return report
