#include <cstdlib>
#include <iostream>
#include <string>

#include <omp.h>

#include "CLI11.hpp"
#include "janus/cli.hpp"

int main(int argc, char** argv) {
  CLI::App app{"janus: coupled local/nonlocal Neumann problems"};
  app.require_subcommand(1);

  janus::cli::RunOptions opt;
  int threads = 0;
  std::uint64_t seed = 0;

  auto add_common = [&](CLI::App* sub) {
    sub->add_option("--config", opt.config_path, "problem configuration file")->required();
    sub->add_option("--out", opt.out_dir, "output directory")->capture_default_str();
    sub->add_option("--threads", threads, "OpenMP threads (fallback: JANUS_THREADS)");
    sub->add_option("--seed", seed, "random seed, overrides [simulate] seed");
    sub->add_flag("--dump-matrix", opt.dump_matrix, "write the assembled matrix as Matrix Market");
  };
  for (const char* name : {"solve", "poincare", "check-domain", "simulate"}) {
    add_common(app.add_subcommand(name));
  }
  app.get_subcommand("solve")->description("minimize the energy and write solution.csv, energy.csv");
  app.get_subcommand("poincare")->description("computed vs tracked Poincare constants in poincare.csv");
  app.get_subcommand("check-domain")->description("validate hypotheses and export cell sets");
  app.get_subcommand("simulate")->description("particle occupancy in occupancy.csv");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? 0 : 1;
  }

  auto* sub = app.get_subcommands().front();
  if (sub->count("--seed")) opt.seed = seed;
  if (threads <= 0) {
    if (const char* env = std::getenv("JANUS_THREADS")) threads = std::atoi(env);
  }
  if (threads > 0) omp_set_num_threads(threads);

  return janus::cli::run(sub->get_name(), opt, std::cout, std::cerr);
}
