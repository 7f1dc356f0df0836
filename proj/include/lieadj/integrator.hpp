#pragma once

#include "lieadj/dynamics.hpp"
#include "lieadj/retraction.hpp"

#include <optional>
#include <vector>

namespace lieadj {

/// Uniform partition of [0, T] into N steps.
struct TimeGrid {
    double T = 1.0;
    int N = 1;
    double dt = 1.0;

    /// Throws std::invalid_argument unless N ≥ 1 and T > 0.
    static TimeGrid make(double T, int N);
    double time(int k) const { return k * dt; }
};

/// Discrete curve on the grid. Index k runs 0..N in every populated list.
///
/// xi[k] for k ≥ 1 satisfies g[k] = g[k−1]·τ(dt·xi[k]); xi[0] is the boundary
/// velocity d_μh(g_0, m_0), which equals f(g_0) for adjoint Hamiltonians.
struct Trajectory {
    TimeGrid grid;
    std::vector<GroupElem> g;
    std::vector<AlgVec> xi;
    std::optional<std::vector<CoVec>> m;
    std::optional<std::vector<AlgVec>> eta;
};

enum class SolveMethod { automatic, newton, fixed_point };

struct SolverConfig {
    double tol = 1e-13;  ///< ∞-norm residual tolerance, relative to max(1, ‖dτ⁻¹ᵀ m_k‖∞)
    int max_iter = 100;
    /// automatic: explicit linear solve for adjoint Hamiltonians, Newton otherwise.
    SolveMethod method = SolveMethod::automatic;

    void validate() const;
};

struct StepResult {
    GroupElem g;
    CoVec m;
    AlgVec xi;
    int iterations = 0;
    double residual = 0.0;
};

/// Lie-group Euler flow g_{k+1} = g_k·τ(dt·f(g_k, u)).
Trajectory forward_flow(const TrivializedVectorField& vf, const GroupElem& g0, const TimeGrid& grid,
                        const Retraction& r, const ParamVec& u = {});

/// Residual of the discrete Lie–Poisson momentum equation for a candidate m_{k+1}:
/// dτ⁻¹(dt ξ_{k+1})ᵀ m_{k+1} − dτ⁻¹(−dt ξ_k)ᵀ m_k + dt·d_gh_L(g_k, m_{k+1}),
/// with ξ_{k+1} = d_μh(g_k, m_{k+1}).
Vector lp_residual(const TrivializedHamiltonian& h, const GroupElem& g_k, const CoVec& m_k,
                   const AlgVec& xi_k, const CoVec& m_next, const Retraction& r, double dt);

/// One step of the discrete Lie–Poisson map (g_k, m_k, ξ_k) ↦ (g_{k+1}, m_{k+1}, ξ_{k+1}).
StepResult lp_step(const TrivializedHamiltonian& h, const GroupElem& g_k, const CoVec& m_k, const AlgVec& xi_k,
                   const Retraction& r, double dt, const SolverConfig& cfg = {});

/// Reduced step for a left-invariant Hamiltonian; g_k is only carried for reconstruction.
StepResult reduced_lp_step(const ReducedHamiltonian& h, const CoVec& m_k, const AlgVec& xi_k, const GroupElem& g_k,
                           const Retraction& r, double dt, const SolverConfig& cfg = {});

/// Runs lp_step N times from (g0, m0) with ξ_0 = d_μh(g0, m0).
Trajectory lp_flow(const TrivializedHamiltonian& h, const GroupElem& g0, const CoVec& m0, const TimeGrid& grid,
                   const Retraction& r, const SolverConfig& cfg = {});

/// Runs reduced_lp_step N times from (g0, m0) with ξ_0 = d_μ(m0).
Trajectory reduced_lp_flow(const ReducedHamiltonian& h, const GroupElem& g0, const CoVec& m0, const TimeGrid& grid,
                           const Retraction& r, const SolverConfig& cfg = {});

/// Backward discrete adjoint sweep from m_N; fills traj.m.
Trajectory adjoint_sweep(const TrivializedVectorField& vf, Trajectory traj, const CoVec& m_N, const Retraction& r,
                         const ParamVec& u = {});

/// Forward discrete variational recursion from η_0; fills traj.eta.
Trajectory variational_sweep(const TrivializedVectorField& vf, Trajectory traj, const AlgVec& eta_0,
                             const Retraction& r, const ParamVec& u = {});

struct Rk4Options {
    std::optional<CoVec> mu_T;    ///< integrate the adjoint momentum backward from μ(T)
    std::optional<AlgVec> eta_0;  ///< integrate the variation forward from η(0)
    ParamVec u;
};

/// Fourth-order Munthe-Kaas Runge–Kutta reference for the continuous systems.
/// The group update is g ← g·exp(Θ) with Θ̇ = dexp⁻¹_{−Θ} f; μ and η use classical
/// RK4 coupled to the same stages. ξ_k holds f(g_k).
Trajectory rk4_reference(const TrivializedVectorField& vf, const GroupElem& g0, const TimeGrid& grid,
                         const Rk4Options& opts = {});

}  // namespace lieadj
