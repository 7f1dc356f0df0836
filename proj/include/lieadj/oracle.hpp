#pragma once

#include "lieadj/integrator.hpp"

namespace lieadj::oracle {

/// Central-difference left-trivialized gradient of g0 ↦ C(g_N) through forward_flow,
/// perturbing along g0·exp(±εE_i). Directly comparable to the adjoint gradient.
CoVec fd_gradient_g0(const TrivializedVectorField& vf, const CostFunction& cost, const GroupElem& g0,
                     const TimeGrid& grid, const Retraction& r, double eps = 1e-5, const ParamVec& u = {});

/// Central-difference gradient of u ↦ C(g_N(u)).
Vector fd_gradient_u(const TrivializedVectorField& vf, const CostFunction& cost, const GroupElem& g0,
                     const ParamVec& u, const TimeGrid& grid, const Retraction& r, double eps = 1e-5);

/// Tangent vector at (g, m): g moves along g·exp(εη), m along m + ε·dm.
struct Perturbation {
    AlgVec eta;
    CoVec dm;
};

/// First variation after one lp_step.
struct PushedPerturbation {
    AlgVec eta;  ///< variation of g_{k+1}, left-trivialized
    CoVec dm;    ///< variation of m_{k+1}
    CoVec dmu;   ///< variation of μ_{k+1} = dτ⁻¹(−dt ξ_{k+1})ᵀ m_{k+1}, including the change in ξ_{k+1}
};

/// Central-difference push-forward of a perturbation through lp_step, with ξ_k held fixed.
PushedPerturbation fd_step_linearization(const TrivializedHamiltonian& h, const GroupElem& g_k, const CoVec& m_k,
                                         const AlgVec& xi_k, const Retraction& r, double dt,
                                         const Perturbation& p, double eps = 1e-6,
                                         const SolverConfig& cfg = {});

}  // namespace lieadj::oracle
