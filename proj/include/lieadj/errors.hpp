#pragma once

#include <stdexcept>
#include <string>

namespace lieadj {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// A matrix does not lie in the span of the algebra basis.
class NotInAlgebra : public Error {
public:
    NotInAlgebra(const std::string& what, double residual)
        : Error(what), residual_(residual) {}
    double residual() const { return residual_; }

private:
    double residual_;
};

/// A group element failed its membership test (accumulated drift or bad input).
class MembershipViolation : public Error {
public:
    MembershipViolation(const std::string& what, double residual)
        : Error(what), residual_(residual) {}
    double residual() const { return residual_; }

private:
    double residual_;
};

class SingularCayley : public Error {
public:
    using Error::Error;
};

/// Argument outside the injectivity domain of a retraction (usually a step that is too large).
class OutOfDomain : public Error {
public:
    using Error::Error;
};

/// An operator identity that must hold to machine precision did not.
class IdentityViolation : public Error {
public:
    IdentityViolation(const std::string& what, double residual)
        : Error(what), residual_(residual) {}
    double residual() const { return residual_; }

private:
    double residual_;
};

class NoConvergence : public Error {
public:
    NoConvergence(const std::string& what, double residual, int iterations)
        : Error(what), residual_(residual), iterations_(iterations) {}
    double residual() const { return residual_; }
    int iterations() const { return iterations_; }

private:
    double residual_;
    int iterations_;
};

/// A trajectory lacks a field (momenta or variations) that an audit needs.
class MissingField : public Error {
public:
    using Error::Error;
};

class NotLeftInvariant : public Error {
public:
    using Error::Error;
};

class NoParameters : public Error {
public:
    using Error::Error;
};

}  // namespace lieadj
