#pragma once

// Subcommand drivers behind the `janus` executable.

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>

#include "janus/config.hpp"
#include "janus/error.hpp"

namespace janus::cli {

struct RunOptions {
  std::string config_path;
  std::string out_dir = ".";
  std::optional<std::uint64_t> seed;
  bool dump_matrix = false;
};

/// 1 for invalid input, 2 for numerical failures.
int exit_code(ErrorCode code);

/// Runs solve | poincare | check-domain | simulate on a parsed config and
/// writes its CSV artifacts into out_dir. Returns 2 when a poincare row
/// violates the bound; throws janus::Error otherwise.
int run_config(const std::string& subcommand, const io::ProblemConfig& config,
               const RunOptions& options, std::ostream& out, std::ostream& err);

/// Loads the config and maps failures to exit statuses with a diagnostic
/// on `err`.
int run(const std::string& subcommand, const RunOptions& options, std::ostream& out,
        std::ostream& err);

}  // namespace janus::cli
