#include "lieadj/dynamics.hpp"

#include "lieadj/retraction.hpp"

#include <algorithm>

namespace lieadj {

namespace {

constexpr double kFdStep = 1e-6;

double scaled_step(double state_norm) { return kFdStep * std::max(1.0, state_norm); }

GroupElem along(const GroupSpec& spec, const GroupElem& g, int direction, double eps) {
    return GroupElem(g.mat * exp_map(spec, AlgVec(eps * Vector::Unit(spec.dim(), direction))).mat);
}

}  // namespace

Operator TrivializedVectorField::jacobian(const GroupElem& g, const ParamVec& u) const {
    if (jac_L) return jac_L(g, u);
    return fd_jacobian(g, u);
}

Operator TrivializedVectorField::fd_jacobian(const GroupElem& g, const ParamVec& u) const {
    const int d = spec.dim();
    Operator jac(d, d);
    for (int i = 0; i < d; ++i) {
        const AlgVec plus = f(along(spec, g, i, kFdStep), u);
        const AlgVec minus = f(along(spec, g, i, -kFdStep), u);
        jac.col(i) = (plus.coords - minus.coords) / (2.0 * kFdStep);
    }
    return jac;
}

Matrix TrivializedVectorField::param_jacobian(const GroupElem& g, const ParamVec& u) const {
    if (df_du) return df_du(g, u);
    return fd_param_jacobian(g, u);
}

Matrix TrivializedVectorField::fd_param_jacobian(const GroupElem& g, const ParamVec& u) const {
    Matrix jac(spec.dim(), param_dim);
    const double eps = scaled_step(u.coords.norm());
    for (int i = 0; i < param_dim; ++i) {
        ParamVec up = u;
        ParamVec um = u;
        up.coords[i] += eps;
        um.coords[i] -= eps;
        jac.col(i) = (f(g, up).coords - f(g, um).coords) / (2.0 * eps);
    }
    return jac;
}

CoVec CostFunction::derivative(const GroupSpec& spec, const GroupElem& g) const {
    if (d_L) return d_L(g);
    return fd_derivative(spec, g);
}

CoVec CostFunction::fd_derivative(const GroupSpec& spec, const GroupElem& g) const {
    const int d = spec.dim();
    Vector out(d);
    for (int i = 0; i < d; ++i)
        out[i] = (c(along(spec, g, i, kFdStep)) - c(along(spec, g, i, -kFdStep))) / (2.0 * kFdStep);
    return CoVec(out);
}

TrivializedHamiltonian adjoint_hamiltonian(const TrivializedVectorField& vf, const ParamVec& u) {
    TrivializedHamiltonian h{vf.spec};
    h.h = [vf, u](const GroupElem& g, const CoVec& mu) { return pair(mu, vf.eval(g, u)); };
    h.d_mu_h = [vf, u](const GroupElem& g, const CoVec&) { return vf.eval(g, u); };
    h.d_g_h_L = [vf, u](const GroupElem& g, const CoVec& mu) { return apply_dual(vf.jacobian(g, u), mu); };
    h.adjoint_of = TrivializedHamiltonian::AdjointSource{vf, u};
    return h;
}

TrivializedHamiltonian lift_reduced(const GroupSpec& spec, const ReducedHamiltonian& reduced) {
    TrivializedHamiltonian h{spec};
    h.h = [reduced](const GroupElem&, const CoVec& mu) { return reduced.h_tilde(mu); };
    h.d_mu_h = [reduced](const GroupElem&, const CoVec& mu) { return reduced.d_mu(mu); };
    const int d = spec.dim();
    h.d_g_h_L = [d](const GroupElem&, const CoVec&) { return CoVec::zero(d); };
    return h;
}

LiePoissonRate continuous_adjoint_rhs(const TrivializedVectorField& vf, const GroupElem& g, const CoVec& mu,
                                      const ParamVec& u) {
    const AlgVec xi = vf.eval(g, u);
    const Operator jac = vf.jacobian(g, u);
    const Operator ad = vf.spec.ad_op(xi);
    return {xi, CoVec((ad - jac).transpose() * mu.coords)};
}

AlgVec continuous_variational_rhs(const TrivializedVectorField& vf, const GroupElem& g, const AlgVec& eta,
                                  const ParamVec& u) {
    const AlgVec xi = vf.eval(g, u);
    return AlgVec((vf.jacobian(g, u) - vf.spec.ad_op(xi)) * eta.coords);
}

LiePoissonRate lie_poisson_rhs(const TrivializedHamiltonian& h, const GroupElem& g, const CoVec& mu) {
    const AlgVec xi = h.d_mu_h(g, mu);
    return {xi, apply_dual(h.spec.ad_op(xi), mu) - h.d_g_h_L(g, mu)};
}

AlgVec fd_d_mu_h(const TrivializedHamiltonian& h, const GroupElem& g, const CoVec& mu) {
    const int d = h.spec.dim();
    const double eps = scaled_step(mu.norm());
    Vector out(d);
    for (int i = 0; i < d; ++i) {
        CoVec plus = mu;
        CoVec minus = mu;
        plus.coords[i] += eps;
        minus.coords[i] -= eps;
        out[i] = (h.h(g, plus) - h.h(g, minus)) / (2.0 * eps);
    }
    return AlgVec(out);
}

CoVec fd_d_g_h_L(const TrivializedHamiltonian& h, const GroupElem& g, const CoVec& mu) {
    const int d = h.spec.dim();
    Vector out(d);
    for (int i = 0; i < d; ++i)
        out[i] = (h.h(along(h.spec, g, i, kFdStep), mu) - h.h(along(h.spec, g, i, -kFdStep), mu)) /
                 (2.0 * kFdStep);
    return CoVec(out);
}

AlgVec fd_d_mu(const ReducedHamiltonian& h, const CoVec& mu) {
    const auto d = mu.size();
    const double eps = scaled_step(mu.norm());
    Vector out(d);
    for (Eigen::Index i = 0; i < d; ++i) {
        CoVec plus = mu;
        CoVec minus = mu;
        plus.coords[i] += eps;
        minus.coords[i] -= eps;
        out[i] = (h.h_tilde(plus) - h.h_tilde(minus)) / (2.0 * eps);
    }
    return AlgVec(out);
}

}  // namespace lieadj
