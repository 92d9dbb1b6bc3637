#ifndef SHIFTAUDIT_ERRORS_HPP
#define SHIFTAUDIT_ERRORS_HPP

#include <stdexcept>
#include <string>

namespace shiftaudit {

enum class errc {
  // graph construction / queries
  cycle_detected,
  duplicate_node,
  unknown_endpoint,
  missing_environment_node,
  multiple_environment_nodes,
  missing_outcome_node,
  multiple_outcome_nodes,
  environment_has_parents,
  unknown_node,
  overlapping_arguments,
  node_is_environment,
  no_valid_blocking_set,
  // data / weighting
  degenerate_input,
  encoding_mismatch,
  missing_columns,
  insufficient_effective_samples,
  single_class_outcome,
  // tests
  empty_input,
  incomplete_results,
  // fairness / mitigation
  single_group,
  missing_class_in_group,
  invalid_k,
  incompatible_prediction_sets,
  unknown_group_level,
  id_mismatch,
  // generators / io
  invalid_spec,
  parse_error,
  io_error,
};

inline const char* errc_name(errc c) {
  switch (c) {
    case errc::cycle_detected: return "CycleDetected";
    case errc::duplicate_node: return "DuplicateNode";
    case errc::unknown_endpoint: return "UnknownEndpoint";
    case errc::missing_environment_node: return "MissingEnvironmentNode";
    case errc::multiple_environment_nodes: return "MultipleEnvironmentNodes";
    case errc::missing_outcome_node: return "MissingOutcomeNode";
    case errc::multiple_outcome_nodes: return "MultipleOutcomeNodes";
    case errc::environment_has_parents: return "EnvironmentHasParents";
    case errc::unknown_node: return "UnknownNode";
    case errc::overlapping_arguments: return "OverlappingArguments";
    case errc::node_is_environment: return "NodeIsEnvironment";
    case errc::no_valid_blocking_set: return "NoValidBlockingSet";
    case errc::degenerate_input: return "DegenerateInput";
    case errc::encoding_mismatch: return "EncodingMismatch";
    case errc::missing_columns: return "MissingColumns";
    case errc::insufficient_effective_samples: return "InsufficientEffectiveSamples";
    case errc::single_class_outcome: return "SingleClassOutcome";
    case errc::empty_input: return "EmptyInput";
    case errc::incomplete_results: return "IncompleteResults";
    case errc::single_group: return "SingleGroup";
    case errc::missing_class_in_group: return "MissingClassInGroup";
    case errc::invalid_k: return "InvalidK";
    case errc::incompatible_prediction_sets: return "IncompatiblePredictionSets";
    case errc::unknown_group_level: return "UnknownGroupLevel";
    case errc::id_mismatch: return "IdMismatch";
    case errc::invalid_spec: return "InvalidSpec";
    case errc::parse_error: return "ParseError";
    case errc::io_error: return "IoError";
  }
  return "UnknownError";
}

// Single exception type carrying a machine-checkable code plus context.
class audit_error : public std::runtime_error {
 public:
  audit_error(errc code, const std::string& what)
      : std::runtime_error(std::string(errc_name(code)) + ": " + what), code_(code) {}

  errc code() const noexcept { return code_; }

 private:
  errc code_;
};

[[noreturn]] inline void fail(errc code, const std::string& what) {
  throw audit_error(code, what);
}

}  // namespace shiftaudit

#endif  // SHIFTAUDIT_ERRORS_HPP
