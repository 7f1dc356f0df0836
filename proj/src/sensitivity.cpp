#include "lieadj/sensitivity.hpp"

#include "lieadj/errors.hpp"

#include <cmath>
#include <sstream>

namespace lieadj {

namespace {

constexpr double kLeftInvariantTol = 1e-10;

SeriesAudit summarize(std::vector<double> series) {
    SeriesAudit out;
    for (double v : series) out.drift = std::max(out.drift, std::abs(v - series.front()));
    out.series = std::move(series);
    return out;
}

// Fills the probe variation and records the invariant drift on the report.
void attach_invariant(SensitivityReport& report, const TrivializedVectorField& vf, const Retraction& r,
                      const ParamVec& u) {
    const int d = vf.spec.dim();
    const AlgVec probe(Vector::Constant(d, 1.0 / std::sqrt(static_cast<double>(d))));
    report.trajectory = variational_sweep(vf, std::move(report.trajectory), probe, r, u);
    SeriesAudit audit = audit_quadratic_invariant(report.trajectory, r);
    report.invariant = std::move(audit.series);
    report.conservation_drift = audit.drift;
}

}  // namespace

CoVec terminal_momentum(const CostFunction& cost, const Trajectory& traj, const Retraction& r) {
    const double dt = traj.grid.dt;
    const CoVec dC = cost.derivative(r.spec(), traj.g.back());
    return CoVec(r.dtau_inv(-dt * traj.xi.back()).transpose().partialPivLu().solve(dC.coords));
}

SensitivityReport initial_condition_sensitivity(const TrivializedVectorField& vf, const CostFunction& cost,
                                                const GroupElem& g0, const TimeGrid& grid, const Retraction& r,
                                                const ParamVec& u) {
    Trajectory traj = forward_flow(vf, g0, grid, r, u);
    const CoVec m_N = terminal_momentum(cost, traj, r);
    traj = adjoint_sweep(vf, std::move(traj), m_N, r, u);

    SensitivityReport report;
    report.gradient = r.dtau_inv(-grid.dt * traj.xi[0]).transpose() * (*traj.m)[0].coords;
    report.trajectory = std::move(traj);
    attach_invariant(report, vf, r, u);
    return report;
}

SensitivityReport parameter_sensitivity(const TrivializedVectorField& vf, const CostFunction& cost,
                                        const GroupElem& g0, const ParamVec& u, const TimeGrid& grid,
                                        const Retraction& r) {
    if (vf.param_dim < 1) throw NoParameters("parameter_sensitivity: vector field has no parameters");
    if (u.size() != vf.param_dim) {
        std::ostringstream os;
        os << "parameter_sensitivity: u has " << u.size() << " entries, field expects " << vf.param_dim;
        throw std::invalid_argument(os.str());
    }
    Trajectory traj = forward_flow(vf, g0, grid, r, u);
    const CoVec m_N = terminal_momentum(cost, traj, r);
    traj = adjoint_sweep(vf, std::move(traj), m_N, r, u);

    SensitivityReport report;
    report.gradient = Vector::Zero(vf.param_dim);
    const auto& m = *traj.m;
    for (int j = 0; j < grid.N; ++j)
        report.gradient += vf.param_jacobian(traj.g[j], u).transpose() * m[j + 1].coords;
    report.gradient *= grid.dt;
    report.trajectory = std::move(traj);
    attach_invariant(report, vf, r, u);
    return report;
}

SeriesAudit audit_quadratic_invariant(const Trajectory& traj, const Retraction& r) {
    if (!traj.m || !traj.eta) throw MissingField("audit_quadratic_invariant: trajectory needs m and eta");
    const auto& m = *traj.m;
    const auto& eta = *traj.eta;
    const double dt = traj.grid.dt;
    std::vector<double> c(traj.xi.size());
    for (std::size_t k = 0; k < c.size(); ++k) c[k] = pair(apply_dual(r.dtau_inv(-dt * traj.xi[k]), m[k]), eta[k]);
    return summarize(std::move(c));
}

SeriesAudit audit_noether(const TrivializedHamiltonian& h, const Trajectory& traj, const AlgVec& chi,
                          const Retraction& r) {
    if (!traj.m) throw MissingField("audit_noether: trajectory needs m");
    const auto& m = *traj.m;
    const double dt = traj.grid.dt;
    const GroupSpec& spec = r.spec();
    std::vector<double> n(traj.g.size());
    for (std::size_t k = 0; k < n.size(); ++k) {
        const double dgh = h.d_g_h_L(traj.g[k], m[k]).coords.lpNorm<Eigen::Infinity>();
        if (!(dgh <= kLeftInvariantTol * std::max(1.0, m[k].coords.lpNorm<Eigen::Infinity>()))) {
            std::ostringstream os;
            os << "audit_noether: Hamiltonian is not left-invariant (|d_g h| = " << dgh << " at k = " << k << ")";
            throw NotLeftInvariant(os.str());
        }
        const AlgVec transported = apply(spec.Ad_op(GroupElem(traj.g[k].mat.inverse())), chi);
        n[k] = pair(apply_dual(r.dtau_inv(-dt * traj.xi[k]), m[k]), transported);
    }
    return summarize(std::move(n));
}

double symplectic_form(const GroupSpec& spec, const CoVec& mu, const PhaseTangent& a, const PhaseTangent& b) {
    return pair(a.dmu, b.eta) - pair(b.dmu, a.eta) - pair(mu, spec.bracket(a.eta, b.eta));
}

SymplecticAudit audit_symplectic_form(const TrivializedHamiltonian& h, const GroupElem& g_k, const CoVec& m_k,
                                      const AlgVec& xi_k, const oracle::Perturbation& first,
                                      const oracle::Perturbation& second, const Retraction& r, double dt,
                                      const SolverConfig& cfg, double eps) {
    const GroupSpec& spec = h.spec;
    const Operator dual_k = r.dtau_inv(-dt * xi_k).transpose();
    const CoVec mu_k(dual_k * m_k.coords);

    SymplecticAudit out;
    out.step = lp_step(h, g_k, m_k, xi_k, r, dt, cfg);
    const Operator dual_next = r.dtau_inv(-dt * out.step.xi).transpose();
    const CoVec mu_next(dual_next * out.step.m.coords);

    const PhaseTangent a_k{first.eta, CoVec(dual_k * first.dm.coords)};
    const PhaseTangent b_k{second.eta, CoVec(dual_k * second.dm.coords)};
    out.omega_k = symplectic_form(spec, mu_k, a_k, b_k);
    out.truncated_k = pair(a_k.dmu, b_k.eta) - pair(b_k.dmu, a_k.eta);

    const auto a_push = oracle::fd_step_linearization(h, g_k, m_k, xi_k, r, dt, first, eps, cfg);
    const auto b_push = oracle::fd_step_linearization(h, g_k, m_k, xi_k, r, dt, second, eps, cfg);
    out.omega_next = symplectic_form(spec, mu_next, {a_push.eta, a_push.dmu}, {b_push.eta, b_push.dmu});
    out.truncated_next = pair(apply_dual(dual_next.transpose(), a_push.dm), b_push.eta) -
                         pair(apply_dual(dual_next.transpose(), b_push.dm), a_push.eta);

    // With ξ_{k+1} held fixed at the next step, δμ = dτ⁻¹ᵀ δm, so invert for the chained perturbation.
    const auto lu = dual_next.partialPivLu();
    out.next_first = {a_push.eta, CoVec(lu.solve(a_push.dmu.coords))};
    out.next_second = {b_push.eta, CoVec(lu.solve(b_push.dmu.coords))};
    return out;
}

}  // namespace lieadj
