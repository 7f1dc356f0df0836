#pragma once

#include "lieadj/integrator.hpp"
#include "lieadj/oracle.hpp"

#include <vector>

namespace lieadj {

/// Output of the discrete gradient algorithms.
struct SensitivityReport {
    /// Left-trivialized derivative (dual coordinates) for initial conditions, ∂C/∂u for parameters.
    Vector gradient;
    /// max_k |c_k − c_0| of the adjoint–variational invariant along this run.
    double conservation_drift = 0.0;
    std::vector<double> invariant;
    /// Forward trajectory with m (adjoint) and eta (probe variation) filled.
    Trajectory trajectory;
};

/// Exact gradient of the discrete terminal cost C(g_N) with respect to g_0.
SensitivityReport initial_condition_sensitivity(const TrivializedVectorField& vf, const CostFunction& cost,
                                                const GroupElem& g0, const TimeGrid& grid, const Retraction& r,
                                                const ParamVec& u = {});

/// Exact gradient of C(g_N) with respect to the parameters u. Throws NoParameters if m = 0.
SensitivityReport parameter_sensitivity(const TrivializedVectorField& vf, const CostFunction& cost,
                                        const GroupElem& g0, const ParamVec& u, const TimeGrid& grid,
                                        const Retraction& r);

/// Terminal momentum m_N solving dτ⁻¹(−dt ξ_N)ᵀ m_N = d_L C(g_N).
CoVec terminal_momentum(const CostFunction& cost, const Trajectory& traj, const Retraction& r);

struct SeriesAudit {
    std::vector<double> series;
    double drift = 0.0;  ///< max_k |series_k − series_0|
};

/// c_k = ⟨dτ⁻¹(−dt ξ_k)ᵀ m_k, η_k⟩. Throws MissingField unless m and eta are set.
SeriesAudit audit_quadratic_invariant(const Trajectory& traj, const Retraction& r);

/// n_k = ⟨dτ⁻¹(−dt ξ_k)ᵀ m_k, Ad_{g_k⁻¹} χ⟩, the discrete momentum of the right-invariant
/// field with generator χ. Throws NotLeftInvariant if d_gh_L is nonzero along traj.
SeriesAudit audit_noether(const TrivializedHamiltonian& h, const Trajectory& traj, const AlgVec& chi,
                          const Retraction& r);

/// Tangent vector in momentum form: (η, δμ) with μ = dτ⁻¹(−dt ξ)ᵀ m.
struct PhaseTangent {
    AlgVec eta;
    CoVec dmu;
};

/// Ω(δ¹, δ²) = ⟨δμ¹, η²⟩ − ⟨δμ², η¹⟩ − ⟨μ, [η¹, η²]⟩, the exterior derivative of the
/// canonical form ⟨μ, g⁻¹dg⟩ on G × 𝔤*.
double symplectic_form(const GroupSpec& spec, const CoVec& mu, const PhaseTangent& a, const PhaseTangent& b);

struct SymplecticAudit {
    double omega_k = 0.0;
    double omega_next = 0.0;
    /// ⟨dτ⁻¹ᵀ δm¹, η²⟩ − ⟨dτ⁻¹ᵀ δm², η¹⟩ with raw momentum variations; reported for
    /// comparison only, it is not invariant on non-abelian groups.
    double truncated_k = 0.0;
    double truncated_next = 0.0;
    /// Pushed perturbations at k+1 in the (η, δm) chart with ξ_{k+1} held, ready for the next step.
    oracle::Perturbation next_first;
    oracle::Perturbation next_second;
    StepResult step;
};

/// Evaluates Ω before and after one lp_step on FD-propagated first variations.
SymplecticAudit audit_symplectic_form(const TrivializedHamiltonian& h, const GroupElem& g_k, const CoVec& m_k,
                                      const AlgVec& xi_k, const oracle::Perturbation& first,
                                      const oracle::Perturbation& second, const Retraction& r, double dt,
                                      const SolverConfig& cfg = {}, double eps = 1e-6);

}  // namespace lieadj
