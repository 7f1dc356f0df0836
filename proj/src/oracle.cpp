#include "lieadj/oracle.hpp"

#include "lieadj/parallel.hpp"

#include <stdexcept>

namespace lieadj::oracle {

namespace {

void check_eps(double eps) {
    if (!(eps >= 1e-8 && eps <= 1e-3)) throw std::invalid_argument("finite-difference eps must lie in [1e-8, 1e-3]");
}

double terminal_cost(const TrivializedVectorField& vf, const CostFunction& cost, const GroupElem& g0,
                     const TimeGrid& grid, const Retraction& r, const ParamVec& u) {
    return cost(forward_flow(vf, g0, grid, r, u).g.back());
}

AlgVec log_chart(const GroupSpec& spec, const GroupElem& base, const GroupElem& g) {
    const Retraction chart(spec, RetractionKind::exp);
    return chart.tau_inv(GroupElem(base.mat.inverse() * g.mat));
}

}  // namespace

CoVec fd_gradient_g0(const TrivializedVectorField& vf, const CostFunction& cost, const GroupElem& g0,
                     const TimeGrid& grid, const Retraction& r, double eps, const ParamVec& u) {
    check_eps(eps);
    const GroupSpec& spec = vf.spec;
    const int d = spec.dim();
    Vector grad(d);
    parallel_for(d, [&](int i) {
        const AlgVec e(eps * Vector::Unit(d, i));
        const GroupElem plus(g0.mat * exp_map(spec, e).mat);
        const GroupElem minus(g0.mat * exp_map(spec, -e).mat);
        grad[i] = (terminal_cost(vf, cost, plus, grid, r, u) - terminal_cost(vf, cost, minus, grid, r, u)) /
                  (2.0 * eps);
    });
    return CoVec(grad);
}

Vector fd_gradient_u(const TrivializedVectorField& vf, const CostFunction& cost, const GroupElem& g0,
                     const ParamVec& u, const TimeGrid& grid, const Retraction& r, double eps) {
    check_eps(eps);
    const int m = static_cast<int>(u.size());
    Vector grad(m);
    parallel_for(m, [&](int i) {
        ParamVec up = u;
        ParamVec um = u;
        up.coords[i] += eps;
        um.coords[i] -= eps;
        grad[i] = (terminal_cost(vf, cost, g0, grid, r, up) - terminal_cost(vf, cost, g0, grid, r, um)) / (2.0 * eps);
    });
    return grad;
}

PushedPerturbation fd_step_linearization(const TrivializedHamiltonian& h, const GroupElem& g_k, const CoVec& m_k,
                                         const AlgVec& xi_k, const Retraction& r, double dt,
                                         const Perturbation& p, double eps, const SolverConfig& cfg) {
    const GroupSpec& spec = h.spec;
    const StepResult base = lp_step(h, g_k, m_k, xi_k, r, dt, cfg);
    const auto perturbed = [&](double s) {
        const GroupElem g(g_k.mat * exp_map(spec, s * p.eta).mat);
        return lp_step(h, g, m_k + s * p.dm, xi_k, r, dt, cfg);
    };
    const StepResult plus = perturbed(eps);
    const StepResult minus = perturbed(-eps);

    const auto mu_of = [&](const StepResult& s) { return apply_dual(r.dtau_inv(-dt * s.xi), s.m); };
    PushedPerturbation out;
    out.eta = (1.0 / (2.0 * eps)) * (log_chart(spec, base.g, plus.g) - log_chart(spec, base.g, minus.g));
    out.dm = (1.0 / (2.0 * eps)) * (plus.m - minus.m);
    out.dmu = (1.0 / (2.0 * eps)) * (mu_of(plus) - mu_of(minus));
    return out;
}

}  // namespace lieadj::oracle
