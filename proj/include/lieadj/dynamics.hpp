#pragma once

#include "lieadj/algebra.hpp"

#include <functional>
#include <optional>

namespace lieadj {

/// Control/parameter vector u; empty for parameter-free problems.
struct ParamVec {
    Vector coords;

    ParamVec() = default;
    explicit ParamVec(Vector c) : coords(std::move(c)) {}
    Eigen::Index size() const { return coords.size(); }
};

/// Left-trivialized vector field f(g, u) = g⁻¹·F(g, u).
///
/// Derivatives in g are taken along g·exp(εη). Omitted derivatives fall back to
/// central differences.
struct TrivializedVectorField {
    using Field = std::function<AlgVec(const GroupElem&, const ParamVec&)>;
    using Jacobian = std::function<Operator(const GroupElem&, const ParamVec&)>;
    using ParamJacobian = std::function<Matrix(const GroupElem&, const ParamVec&)>;

    GroupSpec spec;
    Field f;
    Jacobian jac_L;        ///< optional: η ↦ (d/dε) f(g·exp(εη), u)|₀
    int param_dim = 0;
    ParamJacobian df_du;   ///< optional: d×m matrix ∂f/∂u

    AlgVec eval(const GroupElem& g, const ParamVec& u = {}) const { return f(g, u); }
    Operator jacobian(const GroupElem& g, const ParamVec& u = {}) const;
    Operator fd_jacobian(const GroupElem& g, const ParamVec& u = {}) const;
    Matrix param_jacobian(const GroupElem& g, const ParamVec& u) const;
    Matrix fd_param_jacobian(const GroupElem& g, const ParamVec& u) const;
};

/// Left-trivialized Hamiltonian h(g, μ) on G × 𝔤*.
struct TrivializedHamiltonian {
    /// Set when h(g, μ) = ⟨μ, f(g, u)⟩; lets integrators take the explicit linear path.
    struct AdjointSource {
        TrivializedVectorField field;
        ParamVec u;
    };

    GroupSpec spec;
    std::function<double(const GroupElem&, const CoVec&)> h;
    std::function<AlgVec(const GroupElem&, const CoVec&)> d_mu_h;
    std::function<CoVec(const GroupElem&, const CoVec&)> d_g_h_L;  ///< g*·D_g h, in dual coordinates
    std::optional<AdjointSource> adjoint_of;
};

/// Hamiltonian of a left-invariant system, as a function on 𝔤* alone.
struct ReducedHamiltonian {
    std::function<double(const CoVec&)> h_tilde;
    std::function<AlgVec(const CoVec&)> d_mu;
};

/// Terminal cost C: G → ℝ with optional analytic left-trivialized derivative.
struct CostFunction {
    std::function<double(const GroupElem&)> c;
    std::function<CoVec(const GroupElem&)> d_L;  ///< optional: (d/dε) C(g·exp(εE_i))|₀

    double operator()(const GroupElem& g) const { return c(g); }
    CoVec derivative(const GroupSpec& spec, const GroupElem& g) const;
    CoVec fd_derivative(const GroupSpec& spec, const GroupElem& g) const;
};

/// Rates of the Lie–Poisson system: ξ = g⁻¹ġ and μ̇.
struct LiePoissonRate {
    AlgVec xi;
    CoVec mu_dot;
};

TrivializedHamiltonian adjoint_hamiltonian(const TrivializedVectorField& vf, const ParamVec& u = {});

/// Lifts a reduced Hamiltonian to the g-independent trivialized Hamiltonian.
TrivializedHamiltonian lift_reduced(const GroupSpec& spec, const ReducedHamiltonian& reduced);

/// ξ = f(g), μ̇ = −D_Lf(g)ᵀμ + ad_op(f(g))ᵀμ.
LiePoissonRate continuous_adjoint_rhs(const TrivializedVectorField& vf, const GroupElem& g, const CoVec& mu,
                                      const ParamVec& u = {});

/// η̇ = D_Lf(g)·η − ad_op(f(g))·η.
AlgVec continuous_variational_rhs(const TrivializedVectorField& vf, const GroupElem& g, const AlgVec& eta,
                                  const ParamVec& u = {});

/// ξ = D_μh, μ̇ = −g*·D_gh + ad*_{D_μh} μ.
LiePoissonRate lie_poisson_rhs(const TrivializedHamiltonian& h, const GroupElem& g, const CoVec& mu);

/// Central-difference derivatives of h, for checking analytic forms.
AlgVec fd_d_mu_h(const TrivializedHamiltonian& h, const GroupElem& g, const CoVec& mu);
CoVec fd_d_g_h_L(const TrivializedHamiltonian& h, const GroupElem& g, const CoVec& mu);
AlgVec fd_d_mu(const ReducedHamiltonian& h, const CoVec& mu);

}  // namespace lieadj
