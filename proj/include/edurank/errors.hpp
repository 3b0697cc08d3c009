#pragma once

#include <stdexcept>
#include <string>

namespace edurank {

struct Error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Bad configuration values (chunk size < 1, K <= 0, budget < n, ...).
struct ConfigError : Error {
  using Error::Error;
};

// One corpus line is unusable; the reader can continue past it.
struct RecordError : Error {
  RecordError(const std::string& msg, long line)
      : Error(msg + " (line " + std::to_string(line) + ")"), line_number(line) {}
  long line_number;
};

// The whole file violates the corpus schema.
struct FormatError : Error {
  using Error::Error;
};

// An invariant on produced data does not hold (span coverage, shapes, ...).
struct ValidationError : Error {
  using Error::Error;
};

struct SegmentationError : Error {
  using Error::Error;
};

struct LabelError : Error {
  using Error::Error;
};

// A pluggable backend broke its interface contract.
struct ContractViolation : Error {
  using Error::Error;
};

struct InferenceError : Error {
  using Error::Error;
};

struct TrainingDivergence : Error {
  TrainingDivergence(const std::string& msg, int batch, double rank_loss, double filter_loss)
      : Error(msg), batch_index(batch), rank_loss(rank_loss), filter_loss(filter_loss) {}
  int batch_index;
  double rank_loss;
  double filter_loss;
};

struct CheckpointMismatch : Error {
  using Error::Error;
};

}  // namespace edurank
