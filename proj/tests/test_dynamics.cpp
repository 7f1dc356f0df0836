#include "lieadj/dynamics.hpp"
#include "lieadj/problems.hpp"

#include "support.hpp"

#include <gtest/gtest.h>

using namespace lieadj;
using lieadj::testing::max_abs;
using lieadj::testing::Rng;

namespace {

double rel(const Vector& a, const Vector& b) { return (a - b).norm() / std::max(1.0, b.norm()); }

// h(g, μ) = ½ μᵀ Ad_gᵀ W Ad_g μ; depends on g through conjugation.
TrivializedHamiltonian conjugated_quadratic(const GroupSpec& spec, const Matrix& w) {
    TrivializedHamiltonian h{spec};
    h.h = [spec, w](const GroupElem& g, const CoVec& mu) {
        const Vector v = spec.Ad_op(g) * mu.coords;
        return 0.5 * v.dot(w * v);
    };
    h.d_mu_h = [spec, w](const GroupElem& g, const CoVec& mu) {
        const Operator ad_g = spec.Ad_op(g);
        return AlgVec(ad_g.transpose() * w * ad_g * mu.coords);
    };
    h.d_g_h_L = [spec, w](const GroupElem& g, const CoVec& mu) {
        const Operator ad_g = spec.Ad_op(g);
        const Vector s = ad_g.transpose() * w * ad_g * mu.coords;
        Vector out(spec.dim());
        for (int i = 0; i < spec.dim(); ++i) out[i] = s.dot(spec.ad_op(AlgVec(Vector::Unit(spec.dim(), i))) * mu.coords);
        return CoVec(out);
    };
    return h;
}

}  // namespace

TEST(AdjointHamiltonian, ZeroField) {
    const auto vf = problems::zero_field(GroupSpec::so3());
    const auto h = adjoint_hamiltonian(vf);
    Rng rng(41);
    const GroupElem g = rng.elem(vf.spec);
    const CoVec mu = rng.co(vf.spec);
    EXPECT_EQ(h.h(g, mu), 0.0);
    EXPECT_EQ(h.d_mu_h(g, mu).norm(), 0.0);
    EXPECT_EQ(h.d_g_h_L(g, mu).norm(), 0.0);
}

TEST(AdjointHamiltonian, ConstantFieldIsLeftInvariant) {
    Rng rng(42);
    for (const auto& vf : {problems::so3_constant(), problems::se3_screw()}) {
        const auto h = adjoint_hamiltonian(vf);
        for (int t = 0; t < 100; ++t) {
            const GroupElem g = rng.elem(vf.spec, 2.0);
            const CoVec mu = rng.co(vf.spec);
            EXPECT_EQ(h.d_g_h_L(g, mu).norm(), 0.0);
            const LiePoissonRate rate = lie_poisson_rhs(h, g, mu);
            const Vector reduced = vf.spec.ad_op(vf.eval(g)).transpose() * mu.coords;
            EXPECT_LE((rate.mu_dot.coords - reduced).norm(), 1e-15);
        }
    }
}

TEST(AdjointHamiltonian, StateDerivativeMatchesFiniteDifference) {
    Rng rng(43);
    const auto vf = problems::projected_linear_field(GroupSpec::so3(), rng.mat(3, 3));
    const auto h = adjoint_hamiltonian(vf);
    for (int t = 0; t < 20; ++t) {
        const GroupElem g = rng.elem(vf.spec, 2.0);
        const CoVec mu = rng.co(vf.spec);
        EXPECT_LE(rel(h.d_g_h_L(g, mu).coords, fd_d_g_h_L(h, g, mu).coords), 1e-5);
        EXPECT_LE(rel(h.d_mu_h(g, mu).coords, fd_d_mu_h(h, g, mu).coords), 1e-5);
    }
}

TEST(Fields, AnalyticJacobiansMatchFiniteDifference) {
    Rng rng(44);
    const std::vector<TrivializedVectorField> fields = {
        problems::so3_gradient_like(), problems::projected_linear_field(GroupSpec::se3(), rng.mat(4, 4)),
        problems::so3_gain()};
    for (const auto& vf : fields) {
        const ParamVec u = vf.param_dim ? ParamVec(rng.vec(vf.param_dim)) : ParamVec{};
        for (int t = 0; t < 10; ++t) {
            const GroupElem g = rng.elem(vf.spec, 2.0);
            EXPECT_LE(max_abs(vf.jacobian(g, u) - vf.fd_jacobian(g, u)), 1e-8);
            if (vf.param_dim) EXPECT_LE(max_abs(vf.param_jacobian(g, u) - vf.fd_param_jacobian(g, u)), 1e-8);
        }
    }
}

TEST(Fields, MissingJacobianFallsBackToFiniteDifference) {
    auto vf = problems::so3_gradient_like();
    const auto analytic = vf.jac_L;
    vf.jac_L = nullptr;
    Rng rng(45);
    const GroupElem g = rng.elem(vf.spec);
    EXPECT_LE(max_abs(vf.jacobian(g) - analytic(g, {})), 1e-8);
}

TEST(Costs, AnalyticDerivativesMatchFiniteDifference) {
    Rng rng(46);
    for (const auto& spec : {GroupSpec::so3(), GroupSpec::se3()}) {
        const std::vector<CostFunction> costs = {
            problems::frobenius_target(spec, rng.elem(spec).mat), problems::linear_trace(spec, rng.mat(spec.n(), spec.n()))};
        for (const auto& c : costs) {
            const GroupElem g = rng.elem(spec, 2.0);
            EXPECT_LE(rel(c.derivative(spec, g).coords, c.fd_derivative(spec, g).coords), 1e-8);
        }
    }
}

TEST(ContinuousAdjoint, ZeroField) {
    const auto vf = problems::zero_field(GroupSpec::se3());
    Rng rng(47);
    const auto rate = continuous_adjoint_rhs(vf, rng.elem(vf.spec), rng.co(vf.spec));
    EXPECT_EQ(rate.xi.norm(), 0.0);
    EXPECT_EQ(rate.mu_dot.norm(), 0.0);
}

TEST(ContinuousAdjoint, MatchesLiePoissonOfAdjointHamiltonian) {
    Rng rng(48);
    const auto vf = problems::so3_gradient_like();
    const auto h = adjoint_hamiltonian(vf);
    for (int t = 0; t < 50; ++t) {
        const GroupElem g = rng.elem(vf.spec, 2.0);
        const CoVec mu = rng.co(vf.spec);
        const auto a = continuous_adjoint_rhs(vf, g, mu);
        const auto b = lie_poisson_rhs(h, g, mu);
        EXPECT_LE((a.xi.coords - b.xi.coords).norm(), 1e-15);
        EXPECT_LE((a.mu_dot.coords - b.mu_dot.coords).norm(), 1e-14);
    }
}

TEST(ContinuousVariational, Basics) {
    const auto vf = problems::so3_constant();
    Rng rng(49);
    const GroupElem g = rng.elem(vf.spec);
    EXPECT_EQ(continuous_variational_rhs(vf, g, vf.spec.zero_alg()).norm(), 0.0);
    const AlgVec eta = rng.alg(vf.spec);
    const Vector expected = -vf.spec.ad_op(vf.eval(g)) * eta.coords;
    EXPECT_LE((continuous_variational_rhs(vf, g, eta).coords - expected).norm(), 1e-15);
}

TEST(ContinuousConservation, PointwiseIdentity) {
    Rng rng(50);
    const std::vector<TrivializedVectorField> fields = {problems::so3_gradient_like(), problems::se3_screw(),
                                                        problems::projected_linear_field(GroupSpec::se3(), rng.mat(4, 4))};
    for (const auto& vf : fields) {
        for (int t = 0; t < 200; ++t) {
            const GroupElem g = rng.elem(vf.spec, 2.0);
            const CoVec mu = rng.co(vf.spec);
            const AlgVec eta = rng.alg(vf.spec, 1.0);
            const double s = pair(continuous_adjoint_rhs(vf, g, mu).mu_dot, eta) +
                             pair(mu, continuous_variational_rhs(vf, g, eta));
            EXPECT_LE(std::abs(s), 1e-13);
        }
    }
}

TEST(LiePoisson, ReducedHamiltonianDecouples) {
    const GroupSpec so3 = GroupSpec::so3();
    const Eigen::Vector3d inertia(1, 2, 3);
    ReducedHamiltonian rb{[inertia](const CoVec& mu) { return 0.5 * mu.coords.dot(inertia.asDiagonal() * mu.coords); },
                          [inertia](const CoVec& mu) { return AlgVec(inertia.asDiagonal() * mu.coords); }};
    const auto h = lift_reduced(so3, rb);
    Rng rng(51);
    const CoVec mu = rng.co(so3);
    const auto rate = lie_poisson_rhs(h, rng.elem(so3), mu);
    EXPECT_LE((rate.mu_dot.coords - so3.ad_op(rb.d_mu(mu)).transpose() * mu.coords).norm(), 1e-15);
    EXPECT_LE((rb.d_mu(mu).coords - fd_d_mu(rb, mu).coords).norm(), 1e-8);
}

TEST(LiePoisson, ConjugatedQuadraticDerivatives) {
    Rng rng(52);
    for (const auto& spec : {GroupSpec::so3(), GroupSpec::se3()}) {
        const Matrix a = rng.mat(spec.dim(), spec.dim());
        const auto h = conjugated_quadratic(spec, a * a.transpose());
        for (int t = 0; t < 10; ++t) {
            const GroupElem g = rng.elem(spec, 1.5);
            const CoVec mu = rng.co(spec);
            EXPECT_LE(rel(h.d_mu_h(g, mu).coords, fd_d_mu_h(h, g, mu).coords), 1e-5);
            EXPECT_LE(rel(h.d_g_h_L(g, mu).coords, fd_d_g_h_L(h, g, mu).coords), 1e-5);
        }
    }
}

TEST(Problems, BuiltinShapes) {
    EXPECT_EQ(problems::so3_controlled().param_dim, 3);
    EXPECT_EQ(problems::so3_gain().param_dim, 1);
    EXPECT_EQ(problems::se3_screw().spec.dim(), 6);
    EXPECT_THROW(problems::constant_field(GroupSpec::so3(), AlgVec(Vector::Zero(6))), std::invalid_argument);
}
