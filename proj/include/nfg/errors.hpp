#pragma once

#include <cstddef>
#include <cstdint>
#include <stdexcept>
#include <string>

#include "nfg/vec.hpp"

namespace nfg {

// A caller broke a documented precondition.
struct ContractViolation : std::logic_error {
  using std::logic_error::logic_error;
};

// An oracle evaluation produced NaN/Inf; carries the offending component and point.
struct NumericFailure : std::runtime_error {
  NumericFailure(const std::string& msg, std::size_t component_, ParamVector point_)
      : std::runtime_error(msg), component(component_), point(std::move(point_)) {}
  std::size_t component;
  ParamVector point;
};

// An optimizer run blew up (iterate non-finite or above the abort threshold).
struct DivergenceError : std::runtime_error {
  DivergenceError(std::uint64_t epoch_, std::size_t inner_t_, double gamma_)
      : std::runtime_error("diverged at epoch " + std::to_string(epoch_) + ", step " +
                           std::to_string(inner_t_) + ", gamma " + std::to_string(gamma_)),
        epoch(epoch_),
        inner_t(inner_t_),
        gamma(gamma_) {}
  std::uint64_t epoch;
  std::size_t inner_t;
  double gamma;
};

// Located parse failure (1-based line/column), optionally tagged with the
// source path: "path:3:7: message".
struct ParseError : std::runtime_error {
  ParseError(const std::string& msg, std::size_t line_, std::size_t column_,
             const std::string& source = "")
      : std::runtime_error((source.empty() ? std::string("input") : source) + ":" +
                           std::to_string(line_) + ":" + std::to_string(column_) + ": " +
                           msg),
        line(line_),
        column(column_),
        description(msg) {}
  std::size_t line;
  std::size_t column;
  std::string description;
};

}  // namespace nfg
