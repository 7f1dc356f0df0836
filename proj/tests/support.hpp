#pragma once

#include "lieadj/problems.hpp"
#include "lieadj/retraction.hpp"

#include <cstdint>
#include <random>

namespace lieadj::testing {

// Seeded generator for property tests; every test owns its own instance.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : gen_(seed) {}

    double uniform(double lo = -1.0, double hi = 1.0) { return std::uniform_real_distribution<double>(lo, hi)(gen_); }

    Vector vec(Eigen::Index n, double scale = 1.0) {
        Vector v(n);
        for (Eigen::Index i = 0; i < n; ++i) v[i] = scale * uniform();
        return v;
    }

    Matrix mat(Eigen::Index r, Eigen::Index c) {
        Matrix m(r, c);
        for (Eigen::Index i = 0; i < r; ++i)
            for (Eigen::Index j = 0; j < c; ++j) m(i, j) = uniform();
        return m;
    }

    /// Algebra element with ‖ξ‖ ≤ radius.
    AlgVec alg(const GroupSpec& spec, double radius = 1.0) {
        Vector v = vec(spec.dim());
        v *= radius * uniform(0.0, 1.0) / std::max(v.norm(), 1e-300);
        return AlgVec(v);
    }

    CoVec co(const GroupSpec& spec, double scale = 1.0) { return CoVec(vec(spec.dim(), scale)); }

    GroupElem elem(const GroupSpec& spec, double radius = 1.0) { return exp_map(spec, alg(spec, radius)); }

private:
    std::mt19937_64 gen_;
};

inline double max_abs(const Matrix& m) { return m.lpNorm<Eigen::Infinity>(); }

inline Eigen::Matrix3d rot_z(double theta) {
    Eigen::Matrix3d r;
    r << std::cos(theta), -std::sin(theta), 0, std::sin(theta), std::cos(theta), 0, 0, 0, 1;
    return r;
}

}  // namespace lieadj::testing
