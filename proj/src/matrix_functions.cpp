#include "lieadj/matrix_functions.hpp"

#include "lieadj/errors.hpp"

#include <cmath>

namespace lieadj {

Matrix expm(const Matrix& a, int taylor_order) {
    const auto n = a.rows();
    const double norm = a.lpNorm<1>();
    int squarings = 0;
    if (norm > 0.5) squarings = static_cast<int>(std::ceil(std::log2(norm / 0.5)));
    const Matrix scaled = a / std::ldexp(1.0, squarings);

    Matrix result = Matrix::Identity(n, n);
    Matrix term = Matrix::Identity(n, n);
    for (int k = 1; k <= taylor_order; ++k) {
        term = term * scaled / static_cast<double>(k);
        result += term;
    }
    for (int s = 0; s < squarings; ++s) result = result * result;
    return result;
}

Matrix sqrtm(const Matrix& a) {
    const auto n = a.rows();
    Matrix y = a;
    Matrix z = Matrix::Identity(n, n);
    for (int it = 0; it < 100; ++it) {
        const Matrix y_inv = y.inverse();
        const Matrix z_inv = z.inverse();
        Matrix y_next = 0.5 * (y + z_inv);
        z = 0.5 * (z + y_inv);
        const double change = (y_next - y).norm();
        y = std::move(y_next);
        if (change <= 1e-15 * std::max(1.0, y.norm())) return y;
    }
    throw NoConvergence("sqrtm: Denman-Beavers iteration did not converge", 0.0, 100);
}

Matrix logm(const Matrix& a) {
    const auto n = a.rows();
    const Matrix eye = Matrix::Identity(n, n);
    Matrix x = a;
    int roots = 0;
    while ((x - eye).norm() >= 0.25) {
        if (++roots > 60) throw OutOfDomain("logm: argument too far from the identity");
        x = sqrtm(x);
    }
    // log(X) = 2 Σ Z^{2k+1}/(2k+1), Z = (X − I)(X + I)⁻¹, ‖Z‖ ≲ 0.14.
    const Matrix z = (x - eye) * (x + eye).inverse();
    const Matrix z2 = z * z;
    Matrix power = z;
    Matrix sum = z;
    for (int k = 1; k < 60; ++k) {
        power = power * z2;
        const Matrix term = power / static_cast<double>(2 * k + 1);
        sum += term;
        if (term.norm() <= 1e-18 * std::max(1.0, sum.norm())) break;
    }
    return std::ldexp(2.0, roots) * sum;
}

}  // namespace lieadj
