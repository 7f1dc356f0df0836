#pragma once

#include <Eigen/Dense>

#include <functional>
#include <string>
#include <vector>

namespace lieadj {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;

/// Linear map on algebra coordinates (d×d). Its dual on covector coordinates is the transpose.
using Operator = Eigen::MatrixXd;

/// Coordinates of an element of the Lie algebra in the basis of its GroupSpec.
struct AlgVec {
    Vector coords;

    AlgVec() = default;
    explicit AlgVec(Vector c) : coords(std::move(c)) {}
    static AlgVec zero(Eigen::Index d) { return AlgVec(Vector::Zero(d)); }

    Eigen::Index size() const { return coords.size(); }
    double norm() const { return coords.norm(); }
    double operator[](Eigen::Index i) const { return coords[i]; }

    AlgVec operator-() const { return AlgVec(-coords); }
    AlgVec& operator+=(const AlgVec& o) { coords += o.coords; return *this; }
    AlgVec& operator-=(const AlgVec& o) { coords -= o.coords; return *this; }
    AlgVec& operator*=(double s) { coords *= s; return *this; }
};

/// Coordinates of a covector in the dual basis, so pair(μ, ξ) = Σ μ_i ξ_i.
struct CoVec {
    Vector coords;

    CoVec() = default;
    explicit CoVec(Vector c) : coords(std::move(c)) {}
    static CoVec zero(Eigen::Index d) { return CoVec(Vector::Zero(d)); }

    Eigen::Index size() const { return coords.size(); }
    double norm() const { return coords.norm(); }
    double operator[](Eigen::Index i) const { return coords[i]; }

    CoVec operator-() const { return CoVec(-coords); }
    CoVec& operator+=(const CoVec& o) { coords += o.coords; return *this; }
    CoVec& operator-=(const CoVec& o) { coords -= o.coords; return *this; }
    CoVec& operator*=(double s) { coords *= s; return *this; }
};

inline AlgVec operator+(AlgVec a, const AlgVec& b) { return a += b; }
inline AlgVec operator-(AlgVec a, const AlgVec& b) { return a -= b; }
inline AlgVec operator*(double s, AlgVec a) { return a *= s; }
inline CoVec operator+(CoVec a, const CoVec& b) { return a += b; }
inline CoVec operator-(CoVec a, const CoVec& b) { return a -= b; }
inline CoVec operator*(double s, CoVec a) { return a *= s; }

/// A group element stored as its n×n matrix.
struct GroupElem {
    Matrix mat;

    GroupElem() = default;
    explicit GroupElem(Matrix m) : mat(std::move(m)) {}
};

inline AlgVec apply(const Operator& op, const AlgVec& v) { return AlgVec(op * v.coords); }

/// Dual action: opᵀ·μ.
inline CoVec apply_dual(const Operator& op, const CoVec& mu) {
    return CoVec(op.transpose() * mu.coords);
}

inline double pair(const CoVec& mu, const AlgVec& xi) { return mu.coords.dot(xi.coords); }

/// Residual of the membership test for a matrix; 0 means exactly in the group.
using MembershipTest = std::function<double(const Matrix&)>;

/// A matrix Lie group described by an algebra basis.
///
/// The structure constants are computed once at construction, so ad_op is a
/// weighted sum of precomputed d×d matrices. Instances are immutable.
class GroupSpec {
public:
    static GroupSpec so3();
    static GroupSpec se3();
    static GroupSpec so2();

    /// User-defined matrix group. Throws NotInAlgebra if the basis is not closed
    /// under the commutator and std::invalid_argument if it is degenerate.
    /// Without a membership test only finiteness and det > 0 are checked.
    static GroupSpec custom(std::string name, std::vector<Matrix> basis,
                            MembershipTest membership = {}, double membership_tol = 1e-10);

    const std::string& name() const { return name_; }
    int n() const { return n_; }
    int dim() const { return d_; }
    const std::vector<Matrix>& basis() const { return basis_; }
    const Matrix& gram() const { return gram_; }
    double membership_tol() const { return membership_tol_; }

    Matrix to_matrix(const AlgVec& v) const;

    /// Orthogonal projection onto span(basis); throws NotInAlgebra if the
    /// residual exceeds 1e-8·max(1, ‖M‖_F).
    AlgVec from_matrix(const Matrix& m) const;

    /// Orthogonal projection with no residual check.
    AlgVec project(const Matrix& m) const;

    /// Gram-inverse applied to covector coordinates (the Riesz representative).
    AlgVec riesz(const CoVec& mu) const;

    AlgVec bracket(const AlgVec& a, const AlgVec& b) const;
    Operator ad_op(const AlgVec& xi) const;
    Operator Ad_op(const GroupElem& g) const;

    GroupElem identity() const;
    GroupElem compose(const GroupElem& a, const GroupElem& b) const;
    GroupElem inverse(const GroupElem& a) const;

    double membership_residual(const Matrix& m) const;
    bool contains(const GroupElem& g) const { return membership_residual(g.mat) <= membership_tol_; }
    /// Throws MembershipViolation when g fails the test.
    void require_member(const GroupElem& g, const char* context) const;

    /// Polar-decomposition reprojection of the rotation block (SO(n) and SE(3) only).
    GroupElem reproject(const GroupElem& g) const;

    AlgVec zero_alg() const { return AlgVec::zero(d_); }
    CoVec zero_co() const { return CoVec::zero(d_); }

private:
    GroupSpec(std::string name, std::vector<Matrix> basis, MembershipTest membership,
              double membership_tol, int rotation_block);

    std::string name_;
    int n_ = 0;
    int d_ = 0;
    std::vector<Matrix> basis_;
    Matrix gram_;
    Eigen::LDLT<Matrix> gram_ldlt_;
    std::vector<Operator> structure_;  // structure_[i] = ad_op(e_i)
    MembershipTest membership_;
    double membership_tol_ = 1e-10;
    int rotation_block_ = 0;
};

/// so(3) hat map: v ↦ [v]×.
Eigen::Matrix3d hat3(const Eigen::Vector3d& v);

}  // namespace lieadj
