#include <CLI11.hpp>

#include <cstdio>
#include <iostream>
#include <string>

#include "rydchan/config.hpp"
#include "rydchan/errors.hpp"
#include "rydchan/experiments.hpp"

namespace {

enum ExitCode { kOk = 0, kFailed = 1, kConfig = 2, kNumerical = 3, kCapacity = 4 };

struct Flags {
  std::string config;
  std::string out = "out";
  int threads = 1;
  bool no_dephasing = false;
  bool exact = false;
};

int run(const std::string& command, const Flags& flags) {
  using namespace rydchan;
  if (command == "check") {
    bool ok = true;
    for (const auto& r : run_check(flags.threads)) {
      std::printf("%s %s: %s\n", r.passed ? "ok  " : "FAIL", r.name.c_str(), r.detail.c_str());
      ok = ok && r.passed;
    }
    return ok ? kOk : kFailed;
  }

  const IniFile ini = IniFile::load(flags.config);
  ExperimentSpec spec = read_experiment(ini, command);
  spec.config_path = flags.config;
  spec.out_dir = flags.out;
  spec.threads = flags.threads;
  spec.dephasing = !flags.no_dephasing;
  spec.exact = flags.exact;

  std::vector<std::filesystem::path> files;
  if (command == "two-atom")
    files = run_two_atom(spec);
  else if (command == "detuning-sweep")
    files = run_detuning_sweep(spec);
  else if (command == "transport")
    files = run_transport(spec);
  else
    files = run_crossover(spec);
  for (const auto& f : files) std::printf("%s\n", f.string().c_str());
  return kOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Spin-motion dephasing channel for Rydberg chains"};
  app.require_subcommand(1);
  Flags flags;

  const auto add_common = [&](CLI::App* sub, bool needs_config) {
    sub->add_option("--threads", flags.threads, "worker threads")->check(CLI::PositiveNumber);
    if (!needs_config) return;
    sub->add_option("--config", flags.config, "experiment configuration (.ini)")
        ->required()
        ->check(CLI::ExistingFile);
    sub->add_option("--out", flags.out, "output directory");
    sub->add_flag("--no-dephasing", flags.no_dephasing, "use Gamma = 1 (frozen-gas dynamics)");
    sub->add_flag("--exact", flags.exact, "also run the exact two-atom oracle");
  };
  for (const char* name : {"two-atom", "detuning-sweep", "transport", "crossover"})
    add_common(app.add_subcommand(name, std::string("run the ") + name + " experiment"), true);
  add_common(app.add_subcommand("check", "run the invariant suite"), false);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kOk : kConfig;
  }

  const std::string command = app.get_subcommands().front()->get_name();
  try {
    return run(command, flags);
  } catch (const rydchan::CapacityError& e) {
    std::cerr << "capacity error: " << e.what() << '\n';
    return kCapacity;
  } catch (const rydchan::NumericalError& e) {
    std::cerr << "numerical error: " << e.what() << '\n';
    return kNumerical;
  } catch (const rydchan::Error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kConfig;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kFailed;
  }
}
