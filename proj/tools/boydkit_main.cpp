// boydkit: rearrangements, Lorentz norms, Hardy transforms, Boyd indices,
// K-functionals, and the acceptance suite behind one binary.  All heavy
// lifting lives in cli_run.hpp; this file only maps flags to a RunConfig.

#include <iostream>
#include <map>
#include <string>

#include <CLI11.hpp>

#include "boydkit/cli_run.hpp"

int main(int argc, char** argv) {
  CLI::App app{"piecewise-power rearrangement and Hardy operator toolkit"};
  app.require_subcommand(1);

  boydkit::RunConfig cfg;
  const std::map<std::string, boydkit::Command> commands = {
      {"rearrange", boydkit::Command::Rearrange},
      {"norm", boydkit::Command::Norm},
      {"hardy", boydkit::Command::Hardy},
      {"boyd", boydkit::Command::Boyd},
      {"kfunc", boydkit::Command::Kfunc},
      {"theorem7", boydkit::Command::Theorem7},
      {"verify", boydkit::Command::Verify},
  };
  const std::map<std::string, std::string> blurbs = {
      {"rearrange", "decreasing rearrangement of a piecewise power function"},
      {"norm", "Lorentz / sum / split-norm of a function"},
      {"hardy", "sample one of the six Hardy-type transforms"},
      {"boyd", "Boyd index estimate for a space"},
      {"kfunc", "brute-force K-functional against the operator-sum bound"},
      {"theorem7", "sum-space compression chain certificate"},
      {"verify", "run the acceptance criteria"},
  };

  for (const auto& [name, cmd] : commands) {
    CLI::App* sub = app.add_subcommand(name, blurbs.at(name));
    sub->parse_complete_callback([&cfg, cmd = cmd] { cfg.command = cmd; });
    sub->add_option("--input", cfg.input_path, "function JSON file");
    sub->add_option("--space", cfg.space_arg,
                    "space JSON file or compact spelling (lorentz:p,q, "
                    "sum:p1,q1,p2,q2, holmstedt:p1,q1,p2,q2)");
    sub->add_option("--kind", cfg.kind_arg,
                    "transform JSON file or compact spelling (upper:p,r, "
                    "lower:q,r)");
    sub->add_option("--t", cfg.t, "evaluation points (repeatable)");
    sub->add_option("--grid", cfg.grid, "sample / cut grid size (>= 8)");
    sub->add_option("--tol", cfg.tol, "tolerance knob, reserved");
    sub->add_option("--seed", cfg.seed, "stream seed, reserved");
    sub->add_option("--out", cfg.out_path, "output file (default stdout)");
    sub->add_option("--format", cfg.format, "csv | json");
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 1;
  }
  return boydkit::run_to_path(cfg, std::cout, std::cerr);
}
