#include "lieadj/problems.hpp"

#include <stdexcept>

namespace lieadj::problems {

TrivializedVectorField zero_field(const GroupSpec& spec, int param_dim) {
    const int d = spec.dim();
    TrivializedVectorField vf{spec};
    vf.f = [d](const GroupElem&, const ParamVec&) { return AlgVec::zero(d); };
    vf.jac_L = [d](const GroupElem&, const ParamVec&) { return Operator::Zero(d, d); };
    vf.param_dim = param_dim;
    vf.df_du = [d, param_dim](const GroupElem&, const ParamVec&) { return Matrix::Zero(d, param_dim); };
    return vf;
}

TrivializedVectorField constant_field(const GroupSpec& spec, const AlgVec& xi0) {
    if (xi0.size() != spec.dim()) throw std::invalid_argument("constant_field: xi0 has wrong dimension");
    const int d = spec.dim();
    TrivializedVectorField vf{spec};
    vf.f = [xi0](const GroupElem&, const ParamVec&) { return xi0; };
    vf.jac_L = [d](const GroupElem&, const ParamVec&) { return Operator::Zero(d, d); };
    return vf;
}

TrivializedVectorField projected_linear_field(const GroupSpec& spec, const Matrix& a) {
    if (a.rows() != spec.n() || a.cols() != spec.n())
        throw std::invalid_argument("projected_linear_field: A must be n x n");
    TrivializedVectorField vf{spec};
    vf.f = [spec, a](const GroupElem& g, const ParamVec&) { return spec.project(a * g.mat); };
    vf.jac_L = [spec, a](const GroupElem& g, const ParamVec&) {
        const int d = spec.dim();
        const Matrix ag = a * g.mat;
        Operator jac(d, d);
        for (int j = 0; j < d; ++j) jac.col(j) = spec.project(ag * spec.basis()[j]).coords;
        return jac;
    };
    return vf;
}

TrivializedVectorField velocity_controlled(const GroupSpec& spec) {
    const int d = spec.dim();
    TrivializedVectorField vf{spec};
    vf.f = [](const GroupElem&, const ParamVec& u) { return AlgVec(u.coords); };
    vf.jac_L = [d](const GroupElem&, const ParamVec&) { return Operator::Zero(d, d); };
    vf.param_dim = d;
    vf.df_du = [d](const GroupElem&, const ParamVec&) { return Matrix::Identity(d, d); };
    return vf;
}

TrivializedVectorField scalar_gain(const TrivializedVectorField& base) {
    TrivializedVectorField vf{base.spec};
    vf.f = [base](const GroupElem& g, const ParamVec& u) { return u.coords[0] * base.eval(g); };
    vf.jac_L = [base](const GroupElem& g, const ParamVec& u) -> Operator {
        return u.coords[0] * base.jacobian(g);
    };
    vf.param_dim = 1;
    vf.df_du = [base](const GroupElem& g, const ParamVec&) -> Matrix { return base.eval(g).coords; };
    return vf;
}

Matrix default_gradient_matrix() {
    Matrix a(3, 3);
    a << 0.8, -0.3, 0.5,
         0.2, 0.6, -0.7,
        -0.4, 0.9, 0.1;
    return a;
}

AlgVec default_screw_twist() {
    Vector t(6);
    t << 0.1, 0.2, 0.3, 0.5, -0.4, 0.2;
    return AlgVec(t);
}

TrivializedVectorField so3_constant(const AlgVec& xi0) { return constant_field(GroupSpec::so3(), xi0); }

TrivializedVectorField so3_gradient_like(const Matrix& a) {
    return projected_linear_field(GroupSpec::so3(), a);
}

TrivializedVectorField se3_screw(const AlgVec& twist) { return constant_field(GroupSpec::se3(), twist); }

TrivializedVectorField so3_controlled() { return velocity_controlled(GroupSpec::so3()); }

TrivializedVectorField so3_gain(const Matrix& a) { return scalar_gain(so3_gradient_like(a)); }

CostFunction frobenius_target(const GroupSpec& spec, const Matrix& target) {
    CostFunction cost;
    cost.c = [target](const GroupElem& g) { return (g.mat - target).squaredNorm(); };
    cost.d_L = [spec, target](const GroupElem& g) {
        const int d = spec.dim();
        const Matrix lhs = 2.0 * (g.mat - target).transpose() * g.mat;
        Vector out(d);
        for (int i = 0; i < d; ++i) out[i] = (lhs * spec.basis()[i]).trace();
        return CoVec(out);
    };
    return cost;
}

CostFunction linear_trace(const GroupSpec& spec, const Matrix& a) {
    CostFunction cost;
    cost.c = [a](const GroupElem& g) { return (a * g.mat).trace(); };
    cost.d_L = [spec, a](const GroupElem& g) {
        const int d = spec.dim();
        const Matrix ag = a * g.mat;
        Vector out(d);
        for (int i = 0; i < d; ++i) out[i] = (ag * spec.basis()[i]).trace();
        return CoVec(out);
    };
    return cost;
}

}  // namespace lieadj::problems
