// oscillometer <subcommand> --config <path> [--seed N] [--out <dir>]
//
// Exit codes: 0 success, 1 exact-invariant failure or internal error,
// 2 parse/configuration error, 3 too many inadmissible centers.

#include <iostream>
#include <optional>

#include <CLI11.hpp>

#include "oscillometer/oscillometer.hpp"

namespace {

int execute(const std::string& sub, const std::string& config, std::optional<std::uint64_t> seed,
            const std::string& out) {
  using namespace osc;
  try {
    const unsigned threads = exp::thread_cap();
    const exp::Config cfg = exp::Config::load(config, seed, threads);
    const exp::Artifacts arts = exp::run(sub, cfg);
    exp::write_artifacts(out, arts);
    if (!arts.failure.empty()) {
      std::cerr << "oscillometer " << sub << ": invariant violated: " << arts.failure << "\n";
      return 1;
    }
    return 0;
  } catch (const PathologicalMeasure& e) {
    std::cerr << "oscillometer " << sub << ": " << e.what() << "\n";
    return 3;
  } catch (const ParseError& e) {
    std::cerr << "oscillometer " << sub << ": parse error: " << e.what() << "\n";
    return 2;
  } catch (const InvalidInput& e) {
    std::cerr << "oscillometer " << sub << ": invalid configuration: " << e.what() << "\n";
    return 2;
  } catch (const nlohmann::json::exception& e) {
    std::cerr << "oscillometer " << sub << ": malformed config: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "oscillometer " << sub << ": error: " << e.what() << "\n";
    return 1;
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Cube-family estimators of BMO-type norms for grid measures"};
  app.require_subcommand(1);

  std::string config, out = ".";
  std::optional<std::uint64_t> seed;
  for (const std::string& name : osc::exp::subcommands()) {
    CLI::App* sub = app.add_subcommand(name);
    sub->add_option("--config", config, "experiment config (JSON)")->required();
    sub->add_option("--seed", seed, "overrides the config seed");
    sub->add_option("--out", out, "output directory")->capture_default_str();
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 2;
  }
  return execute(app.get_subcommands().front()->get_name(), config, seed, out);
}
