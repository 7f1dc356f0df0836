#include "lieadj/matrix_functions.hpp"

#include "support.hpp"

#include <gtest/gtest.h>

#include <unsupported/Eigen/MatrixFunctions>

using namespace lieadj;
using lieadj::testing::max_abs;
using lieadj::testing::Rng;
using lieadj::testing::rot_z;

TEST(Expm, ZeroIsIdentity) { EXPECT_EQ(expm(Matrix::Zero(4, 4)), Matrix::Identity(4, 4)); }

TEST(Expm, PlanarRotation) {
    Matrix a = Matrix::Zero(3, 3);
    a(0, 1) = -0.7;
    a(1, 0) = 0.7;
    EXPECT_LE(max_abs(expm(a) - rot_z(0.7)), 1e-15);
}

TEST(Expm, MatchesEigenOnRandomMatrices) {
    Rng rng(21);
    for (int t = 0; t < 40; ++t) {
        const Matrix a = rng.uniform(0.1, 4.0) * rng.mat(4, 4);
        const Matrix oracle = a.exp();
        EXPECT_LE(max_abs(expm(a) - oracle) / std::max(1.0, max_abs(oracle)), 1e-13);
    }
}

TEST(Logm, InvertsExpm) {
    Rng rng(22);
    for (int t = 0; t < 40; ++t) {
        const Matrix a = rng.mat(3, 3);
        // rotation angle below π keeps the principal branch
        const Matrix k = a - a.transpose();
        const Matrix s = rng.uniform(0.0, 3.0) * k / (k.norm() / std::sqrt(2.0));
        EXPECT_LE(max_abs(logm(expm(s)) - s), 1e-13);
    }
}

TEST(Logm, MatchesEigenNearIdentity) {
    Rng rng(23);
    for (int t = 0; t < 20; ++t) {
        const Matrix x = Matrix::Identity(4, 4) + 0.3 * rng.mat(4, 4);
        EXPECT_LE(max_abs(logm(x) - Matrix(x.log())), 1e-12);
    }
}

TEST(Sqrtm, SquaresBack) {
    Rng rng(24);
    const Matrix x = Matrix::Identity(3, 3) + 0.4 * rng.mat(3, 3);
    const Matrix r = sqrtm(x);
    EXPECT_LE(max_abs(r * r - x), 1e-14);
}
