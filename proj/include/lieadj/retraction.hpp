#pragma once

#include "lieadj/algebra.hpp"

namespace lieadj {

enum class RetractionKind { exp, cayley };

const char* to_string(RetractionKind kind);

/// A retraction τ: 𝔤 → G with its right-trivialized tangent.
///
/// Convention: dτ_ξ·η = (d/dε τ(ξ + εη))|₀ · τ(ξ)⁻¹, pulled back to coordinates.
/// Both dτ_ξ and dτ⁻¹_ξ are dense d×d matrices; their duals are transposes.
class Retraction {
public:
    /// The Cayley kind runs a closure check on sample algebra elements and throws
    /// std::invalid_argument if τ leaves the group (the group is not quadratic).
    Retraction(GroupSpec spec, RetractionKind kind, int series_order = 24, double domain_radius = 1.5);

    const GroupSpec& spec() const { return spec_; }
    RetractionKind kind() const { return kind_; }
    int series_order() const { return series_order_; }
    double domain_radius() const { return domain_radius_; }

    GroupElem tau(const AlgVec& xi) const;

    /// Inverse retraction; throws OutOfDomain when ‖result‖ > domain_radius.
    AlgVec tau_inv(const GroupElem& g) const;

    Operator dtau(const AlgVec& xi) const;
    Operator dtau_inv(const AlgVec& xi) const;

    /// Returns dτ⁻¹_{−ξ}ᵀ and checks it against Ad_{τ(ξ)}ᵀ·dτ⁻¹_ξᵀ; throws
    /// IdentityViolation when they differ by more than 1e-10.
    Operator dtau_inv_dual_flip(const AlgVec& xi) const;

private:
    void require_domain(const AlgVec& xi, const char* context) const;
    Operator dexp_series(const AlgVec& xi) const;
    Operator dcay_inv(const AlgVec& xi) const;

    GroupSpec spec_;
    RetractionKind kind_;
    int series_order_;
    double domain_radius_;
};

/// Group exponential, used as the fixed chart for all finite-difference derivatives.
GroupElem exp_map(const GroupSpec& spec, const AlgVec& xi);

}  // namespace lieadj
