#include "memtransform/error.hpp"

namespace memtransform {

const char* to_string(ErrorKind kind) noexcept {
  switch (kind) {
    case ErrorKind::InvalidInput: return "invalid input";
    case ErrorKind::Range: return "range error";
    case ErrorKind::Singularity: return "singularity";
    case ErrorKind::FitDegenerate: return "degenerate fit";
    case ErrorKind::Config: return "configuration error";
    case ErrorKind::DegenerateCalibration: return "degenerate calibration";
    case ErrorKind::EmptyMatrix: return "empty matrix";
    case ErrorKind::Format: return "format error";
    case ErrorKind::Io: return "I/O error";
  }
  return "error";
}

} // namespace memtransform
