#include "lieadj/retraction.hpp"

#include "lieadj/errors.hpp"
#include "lieadj/matrix_functions.hpp"

#include <cmath>
#include <sstream>
#include <stdexcept>

namespace lieadj {

namespace {

constexpr double kCayleyCondLimit = 1e14;
constexpr double kFlipTol = 1e-10;

double condition_number(const Matrix& m) {
    Eigen::JacobiSVD<Matrix> svd(m);
    const auto& s = svd.singularValues();
    const double lo = s[s.size() - 1];
    return lo > 0.0 ? s[0] / lo : std::numeric_limits<double>::infinity();
}

}  // namespace

const char* to_string(RetractionKind kind) {
    return kind == RetractionKind::exp ? "exp" : "cayley";
}

Retraction::Retraction(GroupSpec spec, RetractionKind kind, int series_order, double domain_radius)
    : spec_(std::move(spec)), kind_(kind), series_order_(series_order), domain_radius_(domain_radius) {
    if (series_order_ < 1) throw std::invalid_argument("series_order must be >= 1");
    if (!(domain_radius_ > 0.0)) throw std::invalid_argument("domain_radius must be positive");
    if (kind_ == RetractionKind::cayley) {
        // Deterministic probes along each basis direction and one mixed direction.
        const int d = spec_.dim();
        std::vector<AlgVec> probes;
        for (int i = 0; i < d; ++i) probes.push_back(AlgVec(0.7 * Vector::Unit(d, i)));
        Vector mixed(d);
        for (int i = 0; i < d; ++i) mixed[i] = 0.3 + 0.1 * i * (i % 2 ? -1.0 : 1.0);
        probes.emplace_back(mixed);
        // Near the identity, a matrix is in the group iff its principal log is in the algebra.
        for (const auto& p : probes) {
            const GroupElem g = tau(p);
            bool closes = spec_.contains(g);
            if (closes) {
                try {
                    spec_.from_matrix(logm(g.mat));
                } catch (const NotInAlgebra&) {
                    closes = false;
                }
            }
            if (!closes)
                throw std::invalid_argument(std::string("Cayley retraction does not close on group '") +
                                            spec_.name() + "'");
        }
    }
}

void Retraction::require_domain(const AlgVec& xi, const char* context) const {
    if (!(xi.norm() <= domain_radius_)) {
        std::ostringstream os;
        os << context << ": |xi| = " << xi.norm() << " exceeds the retraction domain radius "
           << domain_radius_ << " (time step too large?)";
        throw OutOfDomain(os.str());
    }
}

GroupElem Retraction::tau(const AlgVec& xi) const {
    const Matrix x = spec_.to_matrix(xi);
    if (kind_ == RetractionKind::exp) return GroupElem(expm(x, series_order_));

    const int n = spec_.n();
    const Matrix eye = Matrix::Identity(n, n);
    const Matrix lhs = eye - 0.5 * x;
    if (condition_number(lhs) > kCayleyCondLimit) throw SingularCayley("tau: I - xi/2 is singular");
    return GroupElem(lhs.partialPivLu().solve(eye + 0.5 * x));
}

AlgVec Retraction::tau_inv(const GroupElem& g) const {
    AlgVec xi;
    if (kind_ == RetractionKind::exp) {
        xi = spec_.from_matrix(logm(g.mat));
    } else {
        const int n = spec_.n();
        const Matrix eye = Matrix::Identity(n, n);
        const Matrix denom = g.mat + eye;
        if (condition_number(denom) > kCayleyCondLimit) throw SingularCayley("tau_inv: g + I is singular");
        // (g + I) commutes with (g − I), so right division is unambiguous.
        xi = spec_.from_matrix(2.0 * (g.mat - eye) * denom.inverse());
    }
    require_domain(xi, "tau_inv");
    return xi;
}

Operator Retraction::dexp_series(const AlgVec& xi) const {
    // Σ_{k=0..order} ad^k / (k+1)!
    const int d = spec_.dim();
    const Operator ad = spec_.ad_op(xi);
    Operator sum = Operator::Identity(d, d);
    Operator term = Operator::Identity(d, d);
    for (int k = 1; k <= series_order_; ++k) {
        term = term * ad / static_cast<double>(k + 1);
        sum += term;
    }
    return sum;
}

Operator Retraction::dcay_inv(const AlgVec& xi) const {
    // η ↦ (I − ξ/2) η (I + ξ/2)
    const int n = spec_.n();
    const int d = spec_.dim();
    const Matrix x = spec_.to_matrix(xi);
    const Matrix eye = Matrix::Identity(n, n);
    const Matrix left = eye - 0.5 * x;
    const Matrix right = eye + 0.5 * x;
    Operator op(d, d);
    for (int j = 0; j < d; ++j) op.col(j) = spec_.from_matrix(left * spec_.basis()[j] * right).coords;
    return op;
}

Operator Retraction::dtau(const AlgVec& xi) const {
    require_domain(xi, "dtau");
    if (kind_ == RetractionKind::exp) return dexp_series(xi);
    return dcay_inv(xi).inverse();
}

Operator Retraction::dtau_inv(const AlgVec& xi) const {
    require_domain(xi, "dtau_inv");
    if (kind_ == RetractionKind::exp) return dexp_series(xi).inverse();
    return dcay_inv(xi);
}

Operator Retraction::dtau_inv_dual_flip(const AlgVec& xi) const {
    const Operator flipped = dtau_inv(-xi).transpose();
    const Operator composed = spec_.Ad_op(tau(xi)).transpose() * dtau_inv(xi).transpose();
    const double residual = (flipped - composed).lpNorm<Eigen::Infinity>();
    if (!(residual <= kFlipTol * std::max(1.0, flipped.lpNorm<Eigen::Infinity>()))) {
        std::ostringstream os;
        os << "flip identity Ad*_tau(xi) dtau_inv(xi)* = dtau_inv(-xi)* violated (residual " << residual
           << "); series_order " << series_order_ << " may be too low";
        throw IdentityViolation(os.str(), residual);
    }
    return flipped;
}

GroupElem exp_map(const GroupSpec& spec, const AlgVec& xi) { return GroupElem(expm(spec.to_matrix(xi))); }

}  // namespace lieadj
