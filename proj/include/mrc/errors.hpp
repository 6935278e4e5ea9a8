#pragma once

#include <stdexcept>
#include <string>

namespace mrc {

class InvalidConfig : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

class PlanningError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class NoPath : public PlanningError {
 public:
  NoPath() : PlanningError("no path to goal") {}
  using PlanningError::PlanningError;
};

class InvalidStart : public PlanningError {
 public:
  InvalidStart() : PlanningError("start position is blocked") {}
};

class SamplingExhausted : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class StaleSnapshot : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class EmptyCell : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

class ProtocolError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace mrc
