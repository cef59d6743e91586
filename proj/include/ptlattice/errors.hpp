#pragma once

#include <stdexcept>
#include <string>

namespace ptlattice {

/// Base class for every error raised by the library.
class error : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

/// A parameter is outside its documented domain (negative wavelength, L < 4, ...).
class invalid_parameter : public error {
public:
  using error::error;
};

/// The requested operation needs the unbroken PT phase but |V2| >= V1.
class phase_error : public error {
public:
  using error::error;
};

/// A band sits on (or numerically at) an exceptional point; its eigenvectors are unusable.
class degenerate_state : public error {
public:
  using error::error;
};

/// A closed-form two-mode expression was evaluated outside the region where it is defined.
class domain_error : public error {
public:
  using error::error;
};

} // namespace ptlattice
