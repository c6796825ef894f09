#ifndef GRIDGP_ERRORS_HPP
#define GRIDGP_ERRORS_HPP

#include <stdexcept>
#include <string>

namespace gridgp {

struct DerivativeNotSupported : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct IndexOutOfRange : std::out_of_range {
  using std::out_of_range::out_of_range;
};
struct NonDividingBlocks : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};
struct TooManyClamped : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct ShapeMismatch : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};
struct BreakdownError : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct SolveNotConverged : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct NonPositiveNoise : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};
struct StepRejected : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct NonFiniteObjective : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct LengthMismatch : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

} // namespace gridgp

#endif
