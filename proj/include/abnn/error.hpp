#pragma once

#include <stdexcept>
#include <string>
#include <vector>

namespace abnn {

enum class Errc {
  InvalidArgument,
  ShapeMismatch,
  DanglingNode,
  Diverged,
  ZeroVector,
  InversionOutOfRange,
  NotAGroup,
  EmptyMultiset,
  DegenerateLipschitz,
  DegreeBoundExceeded,
  NotSymmetric,
  ZeroGamma,
  BadMagic,
  VersionMismatch,
  Truncated,
  ChecksumMismatch,
  ModelKindMismatch,
  Parse,
  Io,
};

const char* errc_name(Errc code) noexcept;

class Error : public std::runtime_error {
 public:
  Error(Errc code, const std::string& what)
      : std::runtime_error(what), code_(code) {}

  Errc code() const noexcept { return code_; }

 private:
  Errc code_;
};

// Thrown when a loss or gradient goes non-finite mid-training; carries the
// per-epoch loss curve recorded up to that point.
class Diverged : public Error {
 public:
  Diverged(const std::string& what, std::vector<double> partial_curve)
      : Error(Errc::Diverged, what), partial_curve_(std::move(partial_curve)) {}

  const std::vector<double>& partial_curve() const noexcept { return partial_curve_; }

 private:
  std::vector<double> partial_curve_;
};

}  // namespace abnn
