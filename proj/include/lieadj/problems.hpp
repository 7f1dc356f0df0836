#pragma once

#include "lieadj/dynamics.hpp"

namespace lieadj::problems {

/// f ≡ 0, optionally carrying m unused parameters (df_du ≡ 0).
TrivializedVectorField zero_field(const GroupSpec& spec, int param_dim = 0);

/// Left-invariant field f ≡ ξ₀.
TrivializedVectorField constant_field(const GroupSpec& spec, const AlgVec& xi0);

/// f(g) = orthogonal projection of A·g onto the algebra, with analytic Jacobian.
TrivializedVectorField projected_linear_field(const GroupSpec& spec, const Matrix& a);

/// f(g, u) = u (m = d), the fully actuated velocity-controlled system.
TrivializedVectorField velocity_controlled(const GroupSpec& spec);

/// f(g, u) = u₀·f₀(g) with a scalar gain (m = 1).
TrivializedVectorField scalar_gain(const TrivializedVectorField& base);

Matrix default_gradient_matrix();
AlgVec default_screw_twist();

/// Named built-ins.
TrivializedVectorField so3_constant(const AlgVec& xi0 = AlgVec(Eigen::Vector3d(0.3, -0.2, 0.5)));
TrivializedVectorField so3_gradient_like(const Matrix& a = default_gradient_matrix());
TrivializedVectorField se3_screw(const AlgVec& twist = default_screw_twist());
TrivializedVectorField so3_controlled();
TrivializedVectorField so3_gain(const Matrix& a = default_gradient_matrix());

/// C(g) = ‖g − target‖²_F.
CostFunction frobenius_target(const GroupSpec& spec, const Matrix& target);

/// C(g) = Tr(A·g).
CostFunction linear_trace(const GroupSpec& spec, const Matrix& a);

}  // namespace lieadj::problems
