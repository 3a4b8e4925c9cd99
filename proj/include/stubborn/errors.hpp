#pragma once

#include <stdexcept>

namespace stubborn {

/// An argument lies outside the domain on which a formula or model is defined.
class DomainError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

/// A request exceeds a fixed capacity (enumeration size, histogram width).
class CapacityError : public std::length_error {
 public:
  using std::length_error::length_error;
};

/// A probability-zero guard tripped (sampling walk cap, per-cycle event cap).
class InternalError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Writing an output artifact failed.
class IoError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace stubborn
