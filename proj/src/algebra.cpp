#include "lieadj/algebra.hpp"

#include "lieadj/errors.hpp"

#include <Eigen/SVD>

#include <cmath>
#include <limits>
#include <sstream>
#include <stdexcept>

namespace lieadj {

namespace {

constexpr double kAlgebraTol = 1e-8;
constexpr double kClosureTol = 1e-12;

double orthogonal_residual(const Matrix& r) {
    if (!r.allFinite()) return std::numeric_limits<double>::infinity();
    if (r.determinant() <= 0.0) return std::numeric_limits<double>::infinity();
    const auto k = r.rows();
    return (r.transpose() * r - Matrix::Identity(k, k)).norm();
}

MembershipTest special_orthogonal_test(int k) {
    return [k](const Matrix& m) {
        if (m.rows() != k || m.cols() != k) return std::numeric_limits<double>::infinity();
        return orthogonal_residual(m);
    };
}

MembershipTest special_euclidean3_test() {
    return [](const Matrix& m) {
        if (m.rows() != 4 || m.cols() != 4) return std::numeric_limits<double>::infinity();
        Eigen::RowVector4d bottom(0.0, 0.0, 0.0, 1.0);
        const double rot = orthogonal_residual(m.topLeftCorner(3, 3));
        const double row = (m.row(3) - bottom).norm();
        if (!m.allFinite()) return std::numeric_limits<double>::infinity();
        return rot + row;
    };
}

MembershipTest invertible_test(int n) {
    return [n](const Matrix& m) {
        if (m.rows() != n || m.cols() != n || !m.allFinite())
            return std::numeric_limits<double>::infinity();
        return m.determinant() > 0.0 ? 0.0 : std::numeric_limits<double>::infinity();
    };
}

Matrix polar_rotation(const Matrix& a) {
    Eigen::JacobiSVD<Matrix> svd(a, Eigen::ComputeFullU | Eigen::ComputeFullV);
    Matrix u = svd.matrixU();
    const Matrix& v = svd.matrixV();
    if ((u * v.transpose()).determinant() < 0.0) u.col(u.cols() - 1) *= -1.0;
    return u * v.transpose();
}

}  // namespace

Eigen::Matrix3d hat3(const Eigen::Vector3d& v) {
    Eigen::Matrix3d m;
    m << 0.0, -v.z(), v.y(),
         v.z(), 0.0, -v.x(),
        -v.y(), v.x(), 0.0;
    return m;
}

GroupSpec::GroupSpec(std::string name, std::vector<Matrix> basis, MembershipTest membership,
                     double membership_tol, int rotation_block)
    : name_(std::move(name)),
      basis_(std::move(basis)),
      membership_(std::move(membership)),
      membership_tol_(membership_tol),
      rotation_block_(rotation_block) {
    if (basis_.empty()) throw std::invalid_argument("group '" + name_ + "': empty basis");
    n_ = static_cast<int>(basis_.front().rows());
    d_ = static_cast<int>(basis_.size());
    for (const auto& e : basis_) {
        if (e.rows() != n_ || e.cols() != n_)
            throw std::invalid_argument("group '" + name_ + "': basis matrices must be square and equal-sized");
        if (!e.allFinite()) throw std::invalid_argument("group '" + name_ + "': non-finite basis matrix");
    }
    if (!(membership_tol_ > 0.0)) throw std::invalid_argument("membership_tol must be positive");

    gram_.resize(d_, d_);
    for (int i = 0; i < d_; ++i)
        for (int j = 0; j < d_; ++j) gram_(i, j) = (basis_[i].transpose() * basis_[j]).trace();

    gram_ldlt_.compute(gram_);
    Eigen::SelfAdjointEigenSolver<Matrix> eig(gram_);
    const double lo = eig.eigenvalues().minCoeff();
    const double hi = eig.eigenvalues().maxCoeff();
    if (gram_ldlt_.info() != Eigen::Success || !(lo > 1e-14 * hi))
        throw std::invalid_argument("group '" + name_ + "': basis matrices are linearly dependent");

    if (!membership_) membership_ = invertible_test(n_);

    // Structure constants: column j of ad_op(e_i) holds the coordinates of [E_i, E_j].
    structure_.assign(d_, Operator::Zero(d_, d_));
    for (int i = 0; i < d_; ++i) {
        for (int j = 0; j < d_; ++j) {
            const Matrix c = basis_[i] * basis_[j] - basis_[j] * basis_[i];
            const AlgVec coords = project(c);
            const double residual = (to_matrix(coords) - c).norm();
            if (residual > kClosureTol * std::max(1.0, c.norm())) {
                std::ostringstream os;
                os << "group '" << name_ << "': basis not closed under the bracket ([E_" << i << ",E_" << j
                   << "] residual " << residual << ")";
                throw NotInAlgebra(os.str(), residual);
            }
            structure_[i].col(j) = coords.coords;
        }
    }
}

GroupSpec GroupSpec::so3() {
    std::vector<Matrix> basis;
    for (int i = 0; i < 3; ++i) basis.emplace_back(hat3(Eigen::Vector3d::Unit(i)));
    return GroupSpec("SO3", std::move(basis), special_orthogonal_test(3), 1e-10, 3);
}

GroupSpec GroupSpec::se3() {
    std::vector<Matrix> basis;
    for (int i = 0; i < 3; ++i) {
        Matrix e = Matrix::Zero(4, 4);
        e.topLeftCorner(3, 3) = hat3(Eigen::Vector3d::Unit(i));
        basis.push_back(e);
    }
    for (int i = 0; i < 3; ++i) {
        Matrix e = Matrix::Zero(4, 4);
        e(i, 3) = 1.0;
        basis.push_back(e);
    }
    return GroupSpec("SE3", std::move(basis), special_euclidean3_test(), 1e-10, 3);
}

GroupSpec GroupSpec::so2() {
    Matrix e(2, 2);
    e << 0.0, -1.0, 1.0, 0.0;
    return GroupSpec("SO2", {e}, special_orthogonal_test(2), 1e-10, 2);
}

GroupSpec GroupSpec::custom(std::string name, std::vector<Matrix> basis, MembershipTest membership,
                            double membership_tol) {
    return GroupSpec(std::move(name), std::move(basis), std::move(membership), membership_tol, 0);
}

Matrix GroupSpec::to_matrix(const AlgVec& v) const {
    Matrix m = Matrix::Zero(n_, n_);
    for (int i = 0; i < d_; ++i) m += v.coords[i] * basis_[i];
    return m;
}

AlgVec GroupSpec::project(const Matrix& m) const {
    Vector rhs(d_);
    for (int i = 0; i < d_; ++i) rhs[i] = (basis_[i].transpose() * m).trace();
    return AlgVec(gram_ldlt_.solve(rhs));
}

AlgVec GroupSpec::from_matrix(const Matrix& m) const {
    AlgVec coords = project(m);
    const double residual = (to_matrix(coords) - m).norm();
    if (!(residual <= kAlgebraTol * std::max(1.0, m.norm()))) {
        std::ostringstream os;
        os << "matrix is not in the algebra of " << name_ << " (projection residual " << residual << ")";
        throw NotInAlgebra(os.str(), residual);
    }
    return coords;
}

AlgVec GroupSpec::riesz(const CoVec& mu) const { return AlgVec(gram_ldlt_.solve(mu.coords)); }

AlgVec GroupSpec::bracket(const AlgVec& a, const AlgVec& b) const { return apply(ad_op(a), b); }

Operator GroupSpec::ad_op(const AlgVec& xi) const {
    Operator op = Operator::Zero(d_, d_);
    for (int i = 0; i < d_; ++i) op += xi.coords[i] * structure_[i];
    return op;
}

Operator GroupSpec::Ad_op(const GroupElem& g) const {
    const Matrix g_inv = g.mat.inverse();
    Operator op(d_, d_);
    for (int j = 0; j < d_; ++j) op.col(j) = from_matrix(g.mat * basis_[j] * g_inv).coords;
    return op;
}

GroupElem GroupSpec::identity() const { return GroupElem(Matrix::Identity(n_, n_)); }

GroupElem GroupSpec::compose(const GroupElem& a, const GroupElem& b) const {
    GroupElem out(a.mat * b.mat);
    require_member(out, "compose");
    return out;
}

GroupElem GroupSpec::inverse(const GroupElem& a) const {
    GroupElem out(a.mat.inverse());
    require_member(out, "inverse");
    return out;
}

double GroupSpec::membership_residual(const Matrix& m) const { return membership_(m); }

void GroupSpec::require_member(const GroupElem& g, const char* context) const {
    const double r = membership_residual(g.mat);
    if (!(r <= membership_tol_)) {
        std::ostringstream os;
        os << context << ": element left " << name_ << " (membership residual " << r << " > "
           << membership_tol_ << ")";
        throw MembershipViolation(os.str(), r);
    }
}

GroupElem GroupSpec::reproject(const GroupElem& g) const {
    if (rotation_block_ == 0)
        throw std::logic_error("reproject: no rotation block known for group '" + name_ + "'");
    Matrix out = g.mat;
    out.topLeftCorner(rotation_block_, rotation_block_) =
        polar_rotation(g.mat.topLeftCorner(rotation_block_, rotation_block_));
    if (n_ > rotation_block_) {
        out.bottomRows(n_ - rotation_block_).setZero();
        out(n_ - 1, n_ - 1) = 1.0;
    }
    return GroupElem(out);
}

}  // namespace lieadj
