#include "mzf/error.hpp"

namespace mzf {

std::string_view to_string(ErrorCode code) noexcept {
  switch (code) {
    case ErrorCode::InvalidArgument: return "InvalidArgument";
    case ErrorCode::RankDeficient: return "RankDeficient";
    case ErrorCode::SingularDiagonal: return "SingularDiagonal";
    case ErrorCode::ZeroMatrix: return "ZeroMatrix";
    case ErrorCode::NoConvergence: return "NoConvergence";
    case ErrorCode::UnsupportedOrder: return "UnsupportedOrder";
    case ErrorCode::LengthMismatch: return "LengthMismatch";
    case ErrorCode::NonFinite: return "NonFinite";
    case ErrorCode::SearchFailed: return "SearchFailed";
    case ErrorCode::BudgetExceeded: return "BudgetExceeded";
    case ErrorCode::TooLarge: return "TooLarge";
    case ErrorCode::ConfigInvalid: return "ConfigInvalid";
    case ErrorCode::ParseError: return "ParseError";
  }
  return "Unknown";
}

}  // namespace mzf
