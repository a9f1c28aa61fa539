#include <CLI11.hpp>

#include <iostream>
#include <optional>
#include <string>

#include "cubealg/cli/session.hpp"
#include "cubealg/exactnum/exact_value.hpp"
#include "cubealg/io/cube_io.hpp"
#include "cubealg/oracle/random_cube.hpp"
#include "cubealg/service/service.hpp"

namespace {

constexpr int kOk = 0;
constexpr int kMismatch = 1;
constexpr int kUsage = 2;

struct CubeFlags {
  std::string cube, facts, fill = "0";
};

void add_cube_flags(CLI::App* app, CubeFlags& f) {
  app->add_option("--cube", f.cube, "cube definition (JSON)");
  app->add_option("--facts", f.facts, "fact table (CSV or TSV)");
  app->add_option("--fill", f.fill, "value of cells without a fact");
}

// Loads --cube/--facts into the session when given.
cubealg::cli::Session preload(const CubeFlags& f) {
  cubealg::cli::Session s;
  if (f.cube.empty() && f.facts.empty()) return s;
  if (f.cube.empty() || f.facts.empty()) {
    throw CLI::ValidationError("--cube and --facts go together");
  }
  cubealg::cli::stmt::Load load{f.cube, f.facts, cubealg::exactnum::parse_rational(f.fill)};
  auto outcome = cubealg::cli::execute(std::move(s), load);
  std::cout << outcome.output << "\n";
  return std::move(outcome.session);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Exact OLAP algebra engine"};
  app.require_subcommand(1);

  CubeFlags repl_flags;
  auto* repl = app.add_subcommand("repl", "interactive statement loop");
  add_cube_flags(repl, repl_flags);

  CubeFlags run_flags;
  std::string script;
  auto* run = app.add_subcommand("run", "execute a statement script");
  run->add_option("--script", script, "script file")->required();
  add_cube_flags(run, run_flags);

  std::uint64_t seed = 1;
  std::size_t trials = 100;
  std::size_t measures = 1;
  auto* check = app.add_subcommand("check", "randomized differential test against the oracle");
  check->add_option("--seed", seed, "random seed");
  check->add_option("--trials", trials, "number of random cubes");
  check->add_option("--measures", measures, "protected measures per cube")
      ->check(CLI::Range(1, 3));

  std::string host = "127.0.0.1";
  int port = 8080;
  auto* serve = app.add_subcommand("serve", "HTTP service for the web client");
  serve->add_option("--port", port, "listen port")->check(CLI::Range(1, 65535));
  serve->add_option("--host", host, "listen address");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e);
    return code == 0 ? kOk : kUsage;
  }

  try {
    if (*repl) {
      auto session = preload(repl_flags);
      auto result = cubealg::cli::repl(std::cin, std::cout, session);
      return result.mismatch ? kMismatch : kOk;
    }
    if (*run) {
      auto session = preload(run_flags);
      auto result = cubealg::cli::run_script(cubealg::io::read_file(script), session,
                                             std::cout, std::cerr);
      return result.failed || result.mismatch ? kMismatch : kOk;
    }
    if (*check) {
      cubealg::oracle::RandomCubeOptions opts;
      opts.measures = measures;
      auto report = cubealg::oracle::run_differential(seed, trials, opts);
      std::cout << report.trials << " cubes, " << report.operations << " operations, "
                << report.rejected << " rejected by both sides, "
                << report.failures.size() << " failures\n";
      for (const auto& f : report.failures) std::cout << f << "\n";
      return report.ok() ? kOk : kMismatch;
    }
    if (*serve) {
      if (!cubealg::service::serve(host, port)) {
        std::cerr << "cannot listen on " << host << ":" << port << "\n";
        return kMismatch;
      }
      return kOk;
    }
  } catch (const CLI::ValidationError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kUsage;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kMismatch;
  }
  return kUsage;
}
