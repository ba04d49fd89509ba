#include "abnn/error.hpp"

namespace abnn {

const char* errc_name(Errc code) noexcept {
  switch (code) {
    case Errc::InvalidArgument: return "invalid argument";
    case Errc::ShapeMismatch: return "shape mismatch";
    case Errc::DanglingNode: return "dangling node";
    case Errc::Diverged: return "diverged";
    case Errc::ZeroVector: return "zero vector";
    case Errc::InversionOutOfRange: return "inversion out of range";
    case Errc::NotAGroup: return "not a group";
    case Errc::EmptyMultiset: return "empty multiset";
    case Errc::DegenerateLipschitz: return "degenerate Lipschitz product";
    case Errc::DegreeBoundExceeded: return "degree bound exceeded";
    case Errc::NotSymmetric: return "not symmetric";
    case Errc::ZeroGamma: return "zero gamma";
    case Errc::BadMagic: return "bad magic";
    case Errc::VersionMismatch: return "version mismatch";
    case Errc::Truncated: return "truncated file";
    case Errc::ChecksumMismatch: return "checksum mismatch";
    case Errc::ModelKindMismatch: return "model kind mismatch";
    case Errc::Parse: return "parse error";
    case Errc::Io: return "io error";
  }
  return "unknown";
}

}  // namespace abnn
