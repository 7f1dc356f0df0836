#include "lieadj/errors.hpp"
#include "lieadj/problems.hpp"
#include "lieadj/sensitivity.hpp"

#include "support.hpp"

#include <gtest/gtest.h>

using namespace lieadj;
using lieadj::testing::Rng;

namespace {

const RetractionKind kKinds[] = {RetractionKind::exp, RetractionKind::cayley};

double rel_err(const Vector& a, const Vector& oracle) {
    return (a - oracle).lpNorm<Eigen::Infinity>() / std::max(oracle.lpNorm<Eigen::Infinity>(), 1e-10);
}

}  // namespace

TEST(InitialCondition, SingleStepZeroFieldGivesCostDerivative) {
    Rng rng(91);
    const auto vf = problems::zero_field(GroupSpec::se3());
    const auto cost = problems::frobenius_target(vf.spec, rng.elem(vf.spec).mat);
    const GroupElem g0 = rng.elem(vf.spec);
    const auto rep = initial_condition_sensitivity(vf, cost, g0, TimeGrid::make(1.0, 1),
                                                   Retraction(vf.spec, RetractionKind::exp));
    EXPECT_EQ(rep.gradient, cost.derivative(vf.spec, g0).coords);
}

TEST(InitialCondition, LeftInvariantLinearCost) {
    Rng rng(92);
    const auto vf = problems::so3_constant();
    const auto cost = problems::linear_trace(vf.spec, rng.mat(3, 3));
    const GroupElem g0 = rng.elem(vf.spec);
    for (auto kind : kKinds) {
        const Retraction r(vf.spec, kind);
        const TimeGrid grid = TimeGrid::make(1.0, 25);
        const auto rep = initial_condition_sensitivity(vf, cost, g0, grid, r);
        // g_N = g_0·τ(dt ξ₀)^N, so perturbing g_0 on the left of the fixed product is the oracle
        Matrix step = Matrix::Identity(3, 3);
        for (int k = 0; k < grid.N; ++k) step = step * r.tau(grid.dt * vf.eval(g0)).mat;
        Vector fd(3);
        const double eps = 1e-5;
        for (int i = 0; i < 3; ++i) {
            const AlgVec e(eps * Vector::Unit(3, i));
            fd[i] = (cost(GroupElem(g0.mat * exp_map(vf.spec, e).mat * step)) -
                     cost(GroupElem(g0.mat * exp_map(vf.spec, -e).mat * step))) /
                    (2 * eps);
        }
        EXPECT_LE(rel_err(rep.gradient, fd), 1e-6);
    }
}

TEST(InitialCondition, GradientMatchesOracleOnBuiltins) {
    Rng rng(93);
    for (auto kind : kKinds) {
        for (const auto& vf : {problems::so3_gradient_like(), problems::se3_screw(), problems::so3_constant()}) {
            const Retraction r(vf.spec, kind);
            const auto cost = problems::frobenius_target(vf.spec, rng.elem(vf.spec).mat);
            const GroupElem g0 = rng.elem(vf.spec);
            const TimeGrid grid = TimeGrid::make(1.0, 100);
            const auto rep = initial_condition_sensitivity(vf, cost, g0, grid, r);
            const auto fd = oracle::fd_gradient_g0(vf, cost, g0, grid, r, 1e-5);
            EXPECT_LE(rel_err(rep.gradient, fd.coords), 1e-6) << vf.spec.name() << " " << to_string(kind);
            EXPECT_LE(rep.conservation_drift, 1e-12 * (1 + std::abs(rep.invariant[0])));
            EXPECT_EQ(rep.invariant.size(), 101u);
        }
    }
}

TEST(Parameter, ZeroJacobianGivesZeroGradient) {
    const auto vf = problems::zero_field(GroupSpec::so3(), 2);
    const auto cost = problems::linear_trace(vf.spec, Matrix::Identity(3, 3));
    const auto rep = parameter_sensitivity(vf, cost, vf.spec.identity(), ParamVec(Eigen::Vector2d(1, 2)),
                                           TimeGrid::make(1.0, 4), Retraction(vf.spec, RetractionKind::exp));
    EXPECT_EQ(rep.gradient.norm(), 0.0);
}

TEST(Parameter, MatchesOracle) {
    Rng rng(94);
    for (auto kind : kKinds) {
        const std::vector<std::pair<TrivializedVectorField, ParamVec>> cases = {
            {problems::so3_controlled(), ParamVec(rng.vec(3))},
            {problems::so3_gain(), ParamVec(Vector::Constant(1, 0.8))},
            {problems::velocity_controlled(GroupSpec::se3()), ParamVec(rng.vec(6))}};
        for (const auto& [vf, u] : cases) {
            const Retraction r(vf.spec, kind);
            const auto cost = problems::frobenius_target(vf.spec, rng.elem(vf.spec).mat);
            const GroupElem g0 = rng.elem(vf.spec);
            const TimeGrid grid = TimeGrid::make(1.0, 30);
            const auto rep = parameter_sensitivity(vf, cost, g0, u, grid, r);
            const Vector fd = oracle::fd_gradient_u(vf, cost, g0, u, grid, r);
            EXPECT_LE(rel_err(rep.gradient, fd), 1e-6);
        }
    }
}

TEST(Parameter, Errors) {
    const auto vf = problems::so3_constant();
    const auto cost = problems::linear_trace(vf.spec, Matrix::Identity(3, 3));
    const Retraction r(vf.spec, RetractionKind::exp);
    EXPECT_THROW(parameter_sensitivity(vf, cost, vf.spec.identity(), {}, TimeGrid::make(1.0, 2), r), NoParameters);
    const auto ctl = problems::so3_controlled();
    EXPECT_THROW(parameter_sensitivity(ctl, cost, ctl.spec.identity(), ParamVec(Vector::Zero(2)), TimeGrid::make(1.0, 2), r),
                 std::invalid_argument);
}

TEST(QuadraticInvariant, TrivialBoundaryData) {
    Rng rng(95);
    const auto vf = problems::so3_gradient_like();
    const Retraction r(vf.spec, RetractionKind::cayley);
    Trajectory traj = forward_flow(vf, rng.elem(vf.spec), TimeGrid::make(1.0, 20), r);
    EXPECT_THROW(audit_quadratic_invariant(traj, r), MissingField);

    Trajectory a = variational_sweep(vf, adjoint_sweep(vf, traj, rng.co(vf.spec), r), vf.spec.zero_alg(), r);
    for (double c : audit_quadratic_invariant(a, r).series) EXPECT_EQ(c, 0.0);
    Trajectory b = variational_sweep(vf, adjoint_sweep(vf, traj, vf.spec.zero_co(), r), rng.alg(vf.spec), r);
    for (double c : audit_quadratic_invariant(b, r).series) EXPECT_EQ(c, 0.0);
}

TEST(QuadraticInvariant, ConstantFieldHoldsStepwise) {
    Rng rng(96);
    const auto vf = problems::se3_screw();
    for (auto kind : kKinds) {
        const Retraction r(vf.spec, kind);
        Trajectory traj = forward_flow(vf, rng.elem(vf.spec), TimeGrid::make(1.0, 50), r);
        traj = variational_sweep(vf, adjoint_sweep(vf, std::move(traj), rng.co(vf.spec), r), rng.alg(vf.spec), r);
        const auto audit = audit_quadratic_invariant(traj, r);
        for (std::size_t k = 1; k < audit.series.size(); ++k)
            EXPECT_LE(std::abs(audit.series[k] - audit.series[k - 1]), 1e-13);
    }
}

TEST(Noether, ConstantFieldOnSo3) {
    Rng rng(97);
    const auto vf = problems::so3_constant();
    const auto h = adjoint_hamiltonian(vf);
    for (auto kind : kKinds) {
        const Retraction r(vf.spec, kind);
        const Trajectory traj = lp_flow(h, rng.elem(vf.spec), rng.co(vf.spec), TimeGrid::make(1.0, 200), r);
        const auto audit = audit_noether(h, traj, rng.alg(vf.spec), r);
        EXPECT_LE(audit.drift, 1e-12 * (1 + std::abs(audit.series[0])));
        for (double n : audit_noether(h, traj, vf.spec.zero_alg(), r).series) EXPECT_EQ(n, 0.0);
    }
}

TEST(Noether, AbelianGroup) {
    const GroupSpec so2 = GroupSpec::so2();
    const auto vf = problems::constant_field(so2, AlgVec(Vector::Constant(1, 0.7)));
    const auto h = adjoint_hamiltonian(vf);
    const Retraction r(so2, RetractionKind::cayley);
    const Trajectory traj = lp_flow(h, so2.identity(), CoVec(Vector::Constant(1, 1.3)), TimeGrid::make(1.0, 30), r);
    const AlgVec chi(Vector::Constant(1, 2.0));
    const auto audit = audit_noether(h, traj, chi, r);
    for (int k = 0; k <= 30; ++k) {
        const double expected = pair(apply_dual(r.dtau_inv(-traj.grid.dt * traj.xi[k]), (*traj.m)[k]), chi);
        EXPECT_NEAR(audit.series[k], expected, 1e-15);
    }
    EXPECT_LE(audit.drift, 1e-14);
}

TEST(Noether, RejectsNonInvariantHamiltonian) {
    Rng rng(98);
    const auto vf = problems::so3_gradient_like();
    const auto h = adjoint_hamiltonian(vf);
    const Retraction r(vf.spec, RetractionKind::exp);
    const Trajectory traj = lp_flow(h, rng.elem(vf.spec), rng.co(vf.spec), TimeGrid::make(1.0, 5), r);
    EXPECT_THROW(audit_noether(h, traj, rng.alg(vf.spec), r), NotLeftInvariant);
}

TEST(Symplectic, Antisymmetry) {
    Rng rng(99);
    const GroupSpec so3 = GroupSpec::so3();
    const PhaseTangent a{rng.alg(so3), rng.co(so3)};
    EXPECT_EQ(symplectic_form(so3, rng.co(so3), a, a), 0.0);
}

TEST(Symplectic, TrivialHamiltonianPreservesForm) {
    Rng rng(100);
    const GroupSpec so3 = GroupSpec::so3();
    const auto h = adjoint_hamiltonian(problems::zero_field(so3));
    const oracle::Perturbation a{rng.alg(so3), rng.co(so3)};
    const oracle::Perturbation b{rng.alg(so3), rng.co(so3)};
    const auto audit = audit_symplectic_form(h, rng.elem(so3), rng.co(so3), so3.zero_alg(), a, b,
                                             Retraction(so3, RetractionKind::exp), 0.1);
    EXPECT_NEAR(audit.omega_next, audit.omega_k, 1e-9);
}

TEST(Symplectic, RandomAdjointHamiltonian) {
    Rng rng(101);
    for (auto kind : kKinds) {
        const auto vf = problems::projected_linear_field(GroupSpec::so3(), rng.mat(3, 3));
        const auto h = adjoint_hamiltonian(vf);
        const Retraction r(vf.spec, kind);
        GroupElem g = rng.elem(vf.spec);
        CoVec m = rng.co(vf.spec);
        AlgVec xi = vf.eval(g);
        oracle::Perturbation a{rng.alg(vf.spec), rng.co(vf.spec)};
        oracle::Perturbation b{rng.alg(vf.spec), rng.co(vf.spec)};
        double truncated = 0.0;
        for (int k = 0; k < 20; ++k) {
            const auto s = audit_symplectic_form(h, g, m, xi, a, b, r, 0.01);
            EXPECT_LE(std::abs(s.omega_next - s.omega_k), 1e-6 * (1 + std::abs(s.omega_k)));
            truncated = std::max(truncated, std::abs(s.truncated_next - s.truncated_k));
            g = s.step.g;
            m = s.step.m;
            xi = s.step.xi;
            a = s.next_first;
            b = s.next_second;
        }
        // the form without the bracket term is not invariant on SO(3)
        EXPECT_GT(truncated, 1e-5);
    }
}
