#include "unimodal/error.hpp"

#include <sstream>

namespace unimodal {

const char* to_string(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::domain: return "domain error";
    case ErrorKind::critical_point: return "critical-point error";
    case ErrorKind::critical_orbit: return "critical-orbit error";
    case ErrorKind::not_unimodal: return "not-unimodal error";
    case ErrorKind::no_symmetric_point: return "no-symmetric-point error";
    case ErrorKind::degenerate_split: return "degenerate-split error";
    case ErrorKind::degenerate: return "degenerate error";
    case ErrorKind::fold: return "fold error";
    case ErrorKind::argument: return "argument error";
    case ErrorKind::construction_failed: return "construction-failed error";
    case ErrorKind::precondition: return "precondition error";
    case ErrorKind::no_central_domain: return "no-central-domain error";
    case ErrorKind::inapplicable: return "inapplicable";
    case ErrorKind::internal: return "internal error";
  }
  return "error";
}

namespace {
std::string fold_message(int step, double preimage) {
  std::ostringstream os;
  os.precision(17);
  os << "iterate " << step << " folds: critical preimage at x = " << preimage;
  return os.str();
}
}  // namespace

FoldError::FoldError(int step, double critical_preimage)
    : Error(ErrorKind::fold, fold_message(step, critical_preimage)),
      step_(step),
      preimage_(critical_preimage) {}

}  // namespace unimodal
