// Copyright alphadyn contributors.
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <stdexcept>
#include <string>

namespace alphadyn {

// Bad arguments, malformed files, broken preconditions. CLI exit code 2.
class ValidationError : public std::runtime_error {
public:
  explicit ValidationError(const std::string& what) : std::runtime_error(what) {}
};

// A solver or certificate failed at runtime. CLI exit code 3.
class NumericalError : public std::runtime_error {
public:
  enum class Kind {
    NearSingular,
    NoConvergence,
    SingularShift,
    Diverging,
    GapUnreachable,
    CertificateFailed,
    OutsideCone,
    DegenerateAlpha,
    NoViableXi,
    NonIntegerPeriod,
    BranchLoss,
    NanDetected,
  };

  NumericalError(Kind kind, const std::string& what)
      : std::runtime_error(what), kind_(kind) {}

  Kind kind() const { return kind_; }

private:
  Kind kind_;
};

inline const char* to_string(NumericalError::Kind k) {
  switch (k) {
    case NumericalError::Kind::NearSingular: return "NearSingular";
    case NumericalError::Kind::NoConvergence: return "NoConvergence";
    case NumericalError::Kind::SingularShift: return "SingularShift";
    case NumericalError::Kind::Diverging: return "Diverging";
    case NumericalError::Kind::GapUnreachable: return "GapUnreachable";
    case NumericalError::Kind::CertificateFailed: return "CertificateFailed";
    case NumericalError::Kind::OutsideCone: return "OutsideCone";
    case NumericalError::Kind::DegenerateAlpha: return "DegenerateAlpha";
    case NumericalError::Kind::NoViableXi: return "NoViableXi";
    case NumericalError::Kind::NonIntegerPeriod: return "NonIntegerPeriod";
    case NumericalError::Kind::BranchLoss: return "BranchLoss";
    case NumericalError::Kind::NanDetected: return "NanDetected";
  }
  return "Unknown";
}

}  // namespace alphadyn
