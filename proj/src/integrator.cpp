#include "lieadj/integrator.hpp"

#include "lieadj/errors.hpp"

#include <cmath>
#include <sstream>
#include <stdexcept>
#include <string>

namespace lieadj {

namespace {

using Residual = std::function<Vector(const Vector&)>;

struct SolveOutcome {
    Vector m;
    int iterations = 0;
    double residual = 0.0;
};

// Rethrows library errors with the failing step index attached.
template <class Fn>
auto at_step(int k, Fn&& fn) -> decltype(fn()) {
    try {
        return fn();
    } catch (const OutOfDomain& e) {
        throw OutOfDomain(std::string(e.what()) + " (step " + std::to_string(k) + ")");
    } catch (const NoConvergence& e) {
        throw NoConvergence(std::string(e.what()) + " (step " + std::to_string(k) + ")", e.residual(),
                            e.iterations());
    } catch (const MembershipViolation& e) {
        throw MembershipViolation(std::string(e.what()) + " (step " + std::to_string(k) + ")", e.residual());
    }
}

SolveOutcome newton(const Residual& residual, Vector m, double tol, int max_iter) {
    const auto d = m.size();
    Vector r = residual(m);
    double norm = r.lpNorm<Eigen::Infinity>();
    for (int it = 0; it < max_iter; ++it) {
        if (norm <= tol) return {std::move(m), it, norm};
        const double eps = 1e-6 * std::max(1.0, m.lpNorm<Eigen::Infinity>());
        Matrix jac(d, d);
        for (Eigen::Index j = 0; j < d; ++j) {
            Vector mp = m;
            Vector mm = m;
            mp[j] += eps;
            mm[j] -= eps;
            jac.col(j) = (residual(mp) - residual(mm)) / (2.0 * eps);
        }
        const Vector update = jac.partialPivLu().solve(r);
        m -= update;
        r = residual(m);
        norm = r.lpNorm<Eigen::Infinity>();
        // Roundoff floor: the update no longer moves m, so the residual cannot shrink further.
        if (update.lpNorm<Eigen::Infinity>() <= 4e-16 * std::max(1.0, m.lpNorm<Eigen::Infinity>()) &&
            norm <= 1e3 * tol)
            return {std::move(m), it + 1, norm};
    }
    if (norm <= tol) return {std::move(m), max_iter, norm};
    std::ostringstream os;
    os << "Newton solve for m_{k+1} did not converge (residual " << norm << " after " << max_iter
       << " iterations)";
    throw NoConvergence(os.str(), norm, max_iter);
}

SolveOutcome fixed_point(const std::function<Vector(const Vector&)>& update, const Residual& residual, Vector m,
                         double tol, int max_iter) {
    double norm = residual(m).lpNorm<Eigen::Infinity>();
    for (int it = 0; it < max_iter; ++it) {
        if (norm <= tol) return {std::move(m), it, norm};
        m = update(m);
        norm = residual(m).lpNorm<Eigen::Infinity>();
    }
    if (norm <= tol) return {std::move(m), max_iter, norm};
    std::ostringstream os;
    os << "fixed-point solve for m_{k+1} did not converge (residual " << norm << ")";
    throw NoConvergence(os.str(), norm, max_iter);
}

void require_step_domain(const Retraction& r, const AlgVec& xi, double dt) {
    if (!(dt * xi.norm() <= r.domain_radius())) {
        std::ostringstream os;
        os << "dt*|xi| = " << dt * xi.norm() << " exceeds the retraction domain radius " << r.domain_radius();
        throw OutOfDomain(os.str());
    }
}

GroupElem advance(const Retraction& r, const GroupElem& g, const AlgVec& xi, double dt) {
    require_step_domain(r, xi, dt);
    return r.spec().compose(g, r.tau(dt * xi));
}

}  // namespace

TimeGrid TimeGrid::make(double T, int N) {
    if (N < 1) throw std::invalid_argument("TimeGrid: N must be >= 1");
    if (!(T > 0.0) || !std::isfinite(T)) throw std::invalid_argument("TimeGrid: T must be positive");
    return TimeGrid{T, N, T / N};
}

void SolverConfig::validate() const {
    if (!(tol > 0.0)) throw std::invalid_argument("SolverConfig: tol must be positive");
    if (max_iter < 1) throw std::invalid_argument("SolverConfig: max_iter must be >= 1");
}

Trajectory forward_flow(const TrivializedVectorField& vf, const GroupElem& g0, const TimeGrid& grid,
                        const Retraction& r, const ParamVec& u) {
    Trajectory traj;
    traj.grid = grid;
    traj.g.reserve(grid.N + 1);
    traj.xi.reserve(grid.N + 1);
    traj.g.push_back(g0);
    traj.xi.push_back(vf.eval(g0, u));
    for (int k = 0; k < grid.N; ++k) {
        // ξ_{k+1} = f(g_k) is exactly the ξ_0 slot for k = 0 and xi.back() afterwards.
        const AlgVec xi_next = k == 0 ? traj.xi[0] : vf.eval(traj.g[k], u);
        traj.g.push_back(at_step(k, [&] { return advance(r, traj.g[k], xi_next, grid.dt); }));
        traj.xi.push_back(xi_next);
    }
    return traj;
}

Vector lp_residual(const TrivializedHamiltonian& h, const GroupElem& g_k, const CoVec& m_k, const AlgVec& xi_k,
                   const CoVec& m_next, const Retraction& r, double dt) {
    const AlgVec xi_next = h.d_mu_h(g_k, m_next);
    return r.dtau_inv(dt * xi_next).transpose() * m_next.coords - r.dtau_inv(-dt * xi_k).transpose() * m_k.coords +
           dt * h.d_g_h_L(g_k, m_next).coords;
}

StepResult lp_step(const TrivializedHamiltonian& h, const GroupElem& g_k, const CoVec& m_k, const AlgVec& xi_k,
                   const Retraction& r, double dt, const SolverConfig& cfg) {
    cfg.validate();
    const Vector rhs = r.dtau_inv(-dt * xi_k).transpose() * m_k.coords;
    const double tol = cfg.tol * std::max(1.0, rhs.lpNorm<Eigen::Infinity>());

    StepResult out;
    if (cfg.method == SolveMethod::automatic && h.adjoint_of) {
        // Momentum equation is linear in m_{k+1} and ξ_{k+1} = f(g_k) is known.
        const auto& src = *h.adjoint_of;
        out.xi = src.field.eval(g_k, src.u);
        const Matrix lhs = r.dtau_inv(dt * out.xi).transpose() + dt * src.field.jacobian(g_k, src.u).transpose();
        out.m = CoVec(lhs.partialPivLu().solve(rhs));
        out.residual = (lhs * out.m.coords - rhs).lpNorm<Eigen::Infinity>();
        out.iterations = 1;
    } else {
        const Residual residual = [&](const Vector& m) {
            return lp_residual(h, g_k, m_k, xi_k, CoVec(m), r, dt);
        };
        SolveOutcome solved;
        if (cfg.method == SolveMethod::fixed_point) {
            const auto update = [&](const Vector& m) -> Vector {
                const CoVec mc(m);
                const AlgVec xi = h.d_mu_h(g_k, mc);
                const Vector target = rhs - dt * h.d_g_h_L(g_k, mc).coords;
                return r.dtau_inv(dt * xi).transpose().partialPivLu().solve(target);
            };
            solved = fixed_point(update, residual, m_k.coords, tol, cfg.max_iter);
        } else {
            solved = newton(residual, m_k.coords, tol, cfg.max_iter);
        }
        out.m = CoVec(std::move(solved.m));
        out.iterations = solved.iterations;
        out.residual = solved.residual;
        out.xi = h.d_mu_h(g_k, out.m);
    }
    out.g = advance(r, g_k, out.xi, dt);
    return out;
}

StepResult reduced_lp_step(const ReducedHamiltonian& h, const CoVec& m_k, const AlgVec& xi_k, const GroupElem& g_k,
                           const Retraction& r, double dt, const SolverConfig& cfg) {
    cfg.validate();
    const Vector rhs = r.dtau_inv(-dt * xi_k).transpose() * m_k.coords;
    const double tol = cfg.tol * std::max(1.0, rhs.lpNorm<Eigen::Infinity>());
    const Residual residual = [&](const Vector& m) -> Vector {
        const AlgVec xi = h.d_mu(CoVec(m));
        return r.dtau_inv(dt * xi).transpose() * m - rhs;
    };
    SolveOutcome solved;
    if (cfg.method == SolveMethod::fixed_point) {
        const auto update = [&](const Vector& m) -> Vector {
            const AlgVec xi = h.d_mu(CoVec(m));
            return r.dtau_inv(dt * xi).transpose().partialPivLu().solve(rhs);
        };
        solved = fixed_point(update, residual, m_k.coords, tol, cfg.max_iter);
    } else {
        solved = newton(residual, m_k.coords, tol, cfg.max_iter);
    }
    StepResult out;
    out.m = CoVec(std::move(solved.m));
    out.iterations = solved.iterations;
    out.residual = solved.residual;
    out.xi = h.d_mu(out.m);
    out.g = advance(r, g_k, out.xi, dt);
    return out;
}

namespace {

template <class Step>
Trajectory momentum_flow(const GroupElem& g0, const CoVec& m0, const AlgVec& xi0, const TimeGrid& grid,
                         Step&& step) {
    Trajectory traj;
    traj.grid = grid;
    traj.g = {g0};
    traj.xi = {xi0};
    traj.m = std::vector<CoVec>{m0};
    for (int k = 0; k < grid.N; ++k) {
        StepResult s = at_step(k, [&] { return step(traj.g[k], (*traj.m)[k], traj.xi[k]); });
        traj.g.push_back(std::move(s.g));
        traj.xi.push_back(std::move(s.xi));
        traj.m->push_back(std::move(s.m));
    }
    return traj;
}

}  // namespace

Trajectory lp_flow(const TrivializedHamiltonian& h, const GroupElem& g0, const CoVec& m0, const TimeGrid& grid,
                   const Retraction& r, const SolverConfig& cfg) {
    return momentum_flow(g0, m0, h.d_mu_h(g0, m0), grid, [&](const GroupElem& g, const CoVec& m, const AlgVec& xi) {
        return lp_step(h, g, m, xi, r, grid.dt, cfg);
    });
}

Trajectory reduced_lp_flow(const ReducedHamiltonian& h, const GroupElem& g0, const CoVec& m0, const TimeGrid& grid,
                           const Retraction& r, const SolverConfig& cfg) {
    return momentum_flow(g0, m0, h.d_mu(m0), grid, [&](const GroupElem& g, const CoVec& m, const AlgVec& xi) {
        return reduced_lp_step(h, m, xi, g, r, grid.dt, cfg);
    });
}

Trajectory adjoint_sweep(const TrivializedVectorField& vf, Trajectory traj, const CoVec& m_N, const Retraction& r,
                         const ParamVec& u) {
    const int N = traj.grid.N;
    const double dt = traj.grid.dt;
    if (static_cast<int>(traj.g.size()) != N + 1 || static_cast<int>(traj.xi.size()) != N + 1)
        throw MissingField("adjoint_sweep: trajectory must carry g and xi for k = 0..N");
    std::vector<CoVec> m(N + 1);
    m[N] = m_N;
    for (int k = N - 1; k >= 0; --k) {
        m[k] = at_step(k, [&] {
            const CoVec& next = m[k + 1];
            const Vector rhs = r.dtau_inv(dt * traj.xi[k + 1]).transpose() * next.coords +
                               dt * vf.jacobian(traj.g[k], u).transpose() * next.coords;
            return CoVec(r.dtau_inv(-dt * traj.xi[k]).transpose().partialPivLu().solve(rhs));
        });
    }
    traj.m = std::move(m);
    return traj;
}

Trajectory variational_sweep(const TrivializedVectorField& vf, Trajectory traj, const AlgVec& eta_0,
                             const Retraction& r, const ParamVec& u) {
    const int N = traj.grid.N;
    const double dt = traj.grid.dt;
    if (static_cast<int>(traj.g.size()) != N + 1 || static_cast<int>(traj.xi.size()) != N + 1)
        throw MissingField("variational_sweep: trajectory must carry g and xi for k = 0..N");
    const GroupSpec& spec = r.spec();
    std::vector<AlgVec> eta(N + 1);
    eta[0] = eta_0;
    for (int k = 0; k < N; ++k) {
        eta[k + 1] = at_step(k, [&] {
            const AlgVec step = dt * traj.xi[k + 1];
            const Vector inner =
                eta[k].coords + dt * r.dtau(step) * (vf.jacobian(traj.g[k], u) * eta[k].coords);
            const GroupElem t = r.tau(step);
            return AlgVec(spec.Ad_op(t).partialPivLu().solve(inner));
        });
    }
    traj.eta = std::move(eta);
    return traj;
}

Trajectory rk4_reference(const TrivializedVectorField& vf, const GroupElem& g0, const TimeGrid& grid,
                         const Rk4Options& opts) {
    const GroupSpec& spec = vf.spec;
    const Retraction ex(spec, RetractionKind::exp);
    const double dt = grid.dt;
    const ParamVec& u = opts.u;

    // Θ̇ = dexp⁻¹_{−Θ} f(g·exp Θ); the left-trivialized rate of g·exp(Θ) is dexp_{−Θ}Θ̇.
    const auto theta_rate = [&](const GroupElem& base, const AlgVec& theta, double h) {
        const GroupElem gs(base.mat * exp_map(spec, theta).mat);
        return std::pair{gs, AlgVec(h * ex.dtau_inv(-theta) * vf.eval(gs, u).coords)};
    };
    const auto variational = [&](const GroupElem& gs, const Vector& eta) -> Vector {
        return (vf.jacobian(gs, u) - spec.ad_op(vf.eval(gs, u))) * eta;
    };
    const auto adjoint = [&](const GroupElem& gs, const Vector& mu) -> Vector {
        return (spec.ad_op(vf.eval(gs, u)) - vf.jacobian(gs, u)).transpose() * mu;
    };

    // One MK-RK4 step of size h from `base`, with an optional linear companion x' = rate(g, x).
    const auto step = [&](const GroupElem& base, double h, Vector* companion,
                          const std::function<Vector(const GroupElem&, const Vector&)>& rate) {
        auto [g1, k1] = theta_rate(base, spec.zero_alg(), h);
        Vector l1, l2, l3, l4;
        if (companion) l1 = h * rate(g1, *companion);
        auto [g2, k2] = theta_rate(base, 0.5 * k1, h);
        if (companion) l2 = h * rate(g2, *companion + 0.5 * l1);
        auto [g3, k3] = theta_rate(base, 0.5 * k2, h);
        if (companion) l3 = h * rate(g3, *companion + 0.5 * l2);
        auto [g4, k4] = theta_rate(base, k3, h);
        if (companion) {
            l4 = h * rate(g4, *companion + l3);
            *companion += (l1 + 2.0 * l2 + 2.0 * l3 + l4) / 6.0;
        }
        const AlgVec theta = (1.0 / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
        return GroupElem(base.mat * exp_map(spec, theta).mat);
    };

    Trajectory traj;
    traj.grid = grid;
    traj.g = {g0};
    traj.xi = {vf.eval(g0, u)};
    std::optional<Vector> eta;
    if (opts.eta_0) {
        eta = opts.eta_0->coords;
        traj.eta = std::vector<AlgVec>{*opts.eta_0};
    }
    for (int k = 0; k < grid.N; ++k) {
        Vector* companion = eta ? &*eta : nullptr;
        traj.g.push_back(step(traj.g[k], dt, companion, variational));
        traj.xi.push_back(vf.eval(traj.g.back(), u));
        if (eta) traj.eta->emplace_back(*eta);
    }

    if (opts.mu_T) {
        // Backward pass for μ from (g_N, μ_T), re-integrating g with negative steps.
        std::vector<CoVec> mu(grid.N + 1);
        Vector current = opts.mu_T->coords;
        GroupElem g = traj.g.back();
        mu[grid.N] = *opts.mu_T;
        for (int k = grid.N - 1; k >= 0; --k) {
            g = step(g, -dt, &current, adjoint);
            mu[k] = CoVec(current);
        }
        traj.m = std::move(mu);
    }
    return traj;
}

}  // namespace lieadj
