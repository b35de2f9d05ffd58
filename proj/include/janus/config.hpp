#pragma once

// Block/key-value problem description. Grammar and keys: docs/config_format.md.

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "janus/assembly.hpp"
#include "janus/error.hpp"
#include "janus/geometry.hpp"
#include "janus/kernels.hpp"

namespace janus::io {

struct Diagnostic {
  std::size_t line = 0;  ///< 1-based, 0 when not tied to a line
  std::size_t column = 0;
  std::string message;
};

struct SourceBox {
  geometry::Box box;
  double value = 0.0;
};

struct ProblemConfig {
  int dimension = 1;
  double h = 0.0;
  geometry::Point lo{};
  geometry::Point hi{};

  geometry::Region local;
  geometry::Region nonlocal;
  geometry::Region gamma;

  kernels::KernelSpec j;
  kernels::KernelSpec g;

  std::string source_profile = "balanced-step";  ///< balanced-step, zero, uniform or "boxes"
  std::vector<SourceBox> source_boxes;

  double tol = 1e-10;
  std::size_t max_iter = 0;
  bool jacobi = false;

  assembly::Model model = assembly::Model::volumetric;

  std::size_t particles = 1000;
  double horizon = 100.0;
  std::uint64_t seed = 1;

  std::size_t sample_count = kernels::kDefaultSampleCount;

  std::vector<double> sweep_deltas;
  std::vector<double> sweep_amplitudes;
  std::vector<assembly::Model> sweep_models;
};

struct ParseOutcome {
  std::optional<ProblemConfig> config;
  ErrorCode code = ErrorCode::ParseError;  ///< meaningful when config is empty
  std::vector<Diagnostic> errors;
};

/// Collects every syntax error (ParseError) and, if the syntax is clean,
/// every validation error (ValidationError).
ParseOutcome try_parse_config(std::string_view text);
/// Throws Error(ParseError | ValidationError) listing all diagnostics.
ProblemConfig parse_config(std::string_view text);
ProblemConfig load_config(const std::string& path);

/// Canonical text; parse_config(emit_config(c)) reproduces c.
std::string emit_config(const ProblemConfig& c);

std::string format_region(const geometry::Region& r, int dimension);

struct BuiltProblem {
  assembly::Problem problem;
  Vec source;
};

/// Builds grid, cell sets, interface (mixed models) and source values.
BuiltProblem build_problem(const ProblemConfig& c);

}  // namespace janus::io
