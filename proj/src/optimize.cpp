#include "lieadj/optimize.hpp"

#include <cmath>
#include <limits>
#include <sstream>
#include <stdexcept>

namespace lieadj {

void LineSearchConfig::validate() const {
    if (!(gamma0 > 0.0)) throw std::invalid_argument("linesearch.gamma0 must be positive");
    if (!(shrink > 0.0 && shrink < 1.0)) throw std::invalid_argument("linesearch.shrink must lie in (0, 1)");
    if (!(armijo_c > 0.0 && armijo_c < 1.0)) throw std::invalid_argument("linesearch.armijo_c must lie in (0, 1)");
    if (max_backtracks < 1) throw std::invalid_argument("linesearch.max_backtracks must be at least 1");
    if (max_outer_iters < 0) throw std::invalid_argument("linesearch.max_outer_iters must be non-negative");
    if (!(grad_tol >= 0.0)) throw std::invalid_argument("linesearch.grad_tol must be non-negative");
}

AlgVec gradient_direction(const GroupSpec& spec, const CoVec& mu) { return spec.riesz(mu); }

namespace {

struct Evaluation {
    double cost = 0.0;
    Vector grad;  ///< covector
    Vector dir;   ///< Riesz representative of grad
};

double predicted_decrease(const Evaluation& e) { return e.grad.dot(e.dir); }

// Armijo descent shared by the group and vector-space solvers. `evaluate` returns cost and
// gradient at a point, `trial` the cost at the stepped point (and the point itself).
template <class State, class Evaluate, class Step, class Cost>
OptimizationTrace descend(State x, const Evaluate& evaluate, const Step& step, const Cost& trial_cost,
                          const LineSearchConfig& ls) {
    ls.validate();
    OptimizationTrace trace;
    Evaluation e = evaluate(x);
    double pred = predicted_decrease(e);
    trace.iterates.push_back({0, e.cost, std::sqrt(std::max(pred, 0.0)), 0.0});

    for (int it = 1;; ++it) {
        if (trace.iterates.back().grad_norm <= ls.grad_tol) {
            trace.converged = true;
            break;
        }
        if (it > ls.max_outer_iters) break;

        double gamma = ls.gamma0;
        bool accepted = false;
        State next = x;
        for (int b = 0; b < ls.max_backtracks; ++b, gamma *= ls.shrink) {
            double c_new = std::numeric_limits<double>::infinity();
            try {
                next = step(x, e.dir, gamma);
                c_new = trial_cost(next);
            } catch (const Error&) {
                // step left the retraction's domain or the flow failed; shrink and retry
                continue;
            }
            if (c_new < e.cost && c_new <= e.cost - ls.armijo_c * gamma * pred) {
                accepted = true;
                break;
            }
        }
        if (!accepted) {
            trace.final_point = x;
            std::ostringstream os;
            os << "line search failed at iteration " << it << " after " << ls.max_backtracks
               << " backtracks (cost " << e.cost << ", predicted decrease " << pred << ")";
            throw LineSearchFailure(os.str(), std::move(trace));
        }
        x = std::move(next);
        e = evaluate(x);
        pred = predicted_decrease(e);
        trace.iterates.push_back({it, e.cost, std::sqrt(std::max(pred, 0.0)), gamma});
    }
    trace.final_point = std::move(x);
    return trace;
}

}  // namespace

OptimizationTrace minimize_initial_condition(const TrivializedVectorField& vf, const CostFunction& cost,
                                             const GroupElem& g_init, const TimeGrid& grid, const Retraction& r,
                                             const LineSearchConfig& ls, const ParamVec& u) {
    const GroupSpec& spec = vf.spec;
    spec.require_member(g_init, "minimize_initial_condition: g_init");
    const auto evaluate = [&](const GroupElem& g) {
        SensitivityReport rep = initial_condition_sensitivity(vf, cost, g, grid, r, u);
        Evaluation e;
        e.cost = cost(rep.trajectory.g.back());
        e.grad = std::move(rep.gradient);
        e.dir = gradient_direction(spec, CoVec(e.grad)).coords;
        return e;
    };
    const auto step = [&](const GroupElem& g, const Vector& dir, double gamma) {
        return spec.compose(g, r.tau(AlgVec(-gamma * dir)));
    };
    const auto trial_cost = [&](const GroupElem& g) { return cost(forward_flow(vf, g, grid, r, u).g.back()); };
    return descend(g_init, evaluate, step, trial_cost, ls);
}

OptimizationTrace minimize_vector(const std::function<double(const Vector&)>& cost,
                                  const std::function<Vector(const Vector&)>& gradient, const Vector& u_init,
                                  const LineSearchConfig& ls) {
    const auto evaluate = [&](const ParamVec& u) {
        Evaluation e;
        e.cost = cost(u.coords);
        e.grad = gradient(u.coords);
        e.dir = e.grad;
        return e;
    };
    const auto step = [](const ParamVec& u, const Vector& dir, double gamma) {
        return ParamVec(u.coords - gamma * dir);
    };
    const auto trial_cost = [&](const ParamVec& u) { return cost(u.coords); };
    return descend(ParamVec(u_init), evaluate, step, trial_cost, ls);
}

OptimizationTrace minimize_parameters(const TrivializedVectorField& vf, const CostFunction& cost,
                                      const GroupElem& g0, const ParamVec& u_init, const TimeGrid& grid,
                                      const Retraction& r, const LineSearchConfig& ls) {
    if (vf.param_dim < 1) throw NoParameters("minimize_parameters: vector field has no parameters");
    const auto c = [&](const Vector& u) { return cost(forward_flow(vf, g0, grid, r, ParamVec(u)).g.back()); };
    const auto grad = [&](const Vector& u) {
        return parameter_sensitivity(vf, cost, g0, ParamVec(u), grid, r).gradient;
    };
    return minimize_vector(c, grad, u_init.coords, ls);
}

}  // namespace lieadj
