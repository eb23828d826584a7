#pragma once

#include <stdexcept>
#include <string>

namespace crowd {

enum class Errc {
  Parse,
  DuplicateEntry,
  FrameGap,
  MissingData,
  InsufficientData,
  DimensionMismatch,
  DefectiveModel,
  AgentMismatch,
  DegenerateTraining,
  InvalidArgument,
  Io,
};

class Error : public std::runtime_error {
 public:
  Error(Errc code, const std::string& msg) : std::runtime_error(msg), code_(code) {}
  Errc code() const noexcept { return code_; }

 private:
  Errc code_;
};

}  // namespace crowd
