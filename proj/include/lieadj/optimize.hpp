#pragma once

#include "lieadj/errors.hpp"
#include "lieadj/sensitivity.hpp"

#include <functional>
#include <variant>
#include <vector>

namespace lieadj {

struct LineSearchConfig {
    double gamma0 = 1.0;
    double shrink = 0.5;
    double armijo_c = 1e-4;
    int max_backtracks = 40;
    int max_outer_iters = 500;
    double grad_tol = 1e-9;

    /// Throws std::invalid_argument unless 0 < shrink < 1, 0 < armijo_c < 1 and the rest are positive.
    void validate() const;
};

struct OptimizationIterate {
    int iteration = 0;
    double cost = 0.0;
    double grad_norm = 0.0;
    double step = 0.0;  ///< γ accepted to reach this iterate; 0 for the start point
};

struct OptimizationTrace {
    std::vector<OptimizationIterate> iterates;
    std::variant<GroupElem, ParamVec> final_point;
    bool converged = false;  ///< false when the outer iteration cap was hit
};

/// Backtracking ran out before sufficient decrease. The partial trace is kept.
class LineSearchFailure : public Error {
public:
    LineSearchFailure(const std::string& what, OptimizationTrace trace) : Error(what), trace_(std::move(trace)) {}
    const OptimizationTrace& trace() const { return trace_; }

private:
    OptimizationTrace trace_;
};

/// Riesz representative gram⁻¹·μ, so pair(μ, result) = ‖result‖²_gram.
AlgVec gradient_direction(const GroupSpec& spec, const CoVec& mu);

/// g_0 ← g_0·τ(−γ∇̃) with ∇̃ = gradient_direction(initial_condition_sensitivity) and Armijo γ.
/// Parameters u, if the field has any, stay fixed.
OptimizationTrace minimize_initial_condition(const TrivializedVectorField& vf, const CostFunction& cost,
                                             const GroupElem& g_init, const TimeGrid& grid, const Retraction& r,
                                             const LineSearchConfig& ls = {}, const ParamVec& u = {});

/// Euclidean gradient descent on u with Armijo γ, gradient from parameter_sensitivity.
OptimizationTrace minimize_parameters(const TrivializedVectorField& vf, const CostFunction& cost,
                                      const GroupElem& g0, const ParamVec& u_init, const TimeGrid& grid,
                                      const Retraction& r, const LineSearchConfig& ls = {});

/// Plain Armijo gradient descent on ℝⁿ for caller-supplied cost and gradient.
OptimizationTrace minimize_vector(const std::function<double(const Vector&)>& cost,
                                  const std::function<Vector(const Vector&)>& gradient, const Vector& u_init,
                                  const LineSearchConfig& ls = {});

}  // namespace lieadj
