#pragma once

#include <stdexcept>
#include <string>

namespace graphtest {

// Error categories surfaced to callers. The CLI maps any Error to exit
// code 2 (bad input or an unsatisfiable request); any other exception
// escaping to main is a bug and exits 3.
enum class errc {
  self_loop,
  duplicate_edge,
  index_out_of_range,
  degenerate_graph,
  disconnected,
  k_too_large,
  no_perfect_matching,
  length_mismatch,
  too_few_nodes,
  singular_covariance,
  zero_variance,
  too_large,
  parse_error,
  dimension_mismatch,
  asymmetric_matrix,
  zero_network,
  non_finite_input,
  shape_mismatch,
  invalid_argument,
};

inline const char* errc_name(errc code) {
  switch (code) {
    case errc::self_loop: return "self_loop";
    case errc::duplicate_edge: return "duplicate_edge";
    case errc::index_out_of_range: return "index_out_of_range";
    case errc::degenerate_graph: return "degenerate_graph";
    case errc::disconnected: return "disconnected";
    case errc::k_too_large: return "k_too_large";
    case errc::no_perfect_matching: return "no_perfect_matching";
    case errc::length_mismatch: return "length_mismatch";
    case errc::too_few_nodes: return "too_few_nodes";
    case errc::singular_covariance: return "singular_covariance";
    case errc::zero_variance: return "zero_variance";
    case errc::too_large: return "too_large";
    case errc::parse_error: return "parse_error";
    case errc::dimension_mismatch: return "dimension_mismatch";
    case errc::asymmetric_matrix: return "asymmetric_matrix";
    case errc::zero_network: return "zero_network";
    case errc::non_finite_input: return "non_finite_input";
    case errc::shape_mismatch: return "shape_mismatch";
    case errc::invalid_argument: return "invalid_argument";
  }
  return "unknown";
}

class Error : public std::runtime_error {
 public:
  Error(errc code, const std::string& message)
      : std::runtime_error(message), code_(code) {}

  errc code() const noexcept { return code_; }

 private:
  errc code_;
};

[[noreturn]] inline void fail(errc code, const std::string& message) {
  throw Error(code, message);
}

}  // namespace graphtest
