// entropy-games: command-line front end. Exit codes: 0 success, 1 usage,
// 2 input validation, 3 resource cap, 4 internal invariant failure.

#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "entropy_games/cli.hpp"

namespace cli = entropy_games::cli;

int main(int argc, char** argv) {
  CLI::App app{"Min-entropy, leaked-randomness and team maxmin tools for zero-sum games", "entropy-games"};
  app.set_version_flag("--version", cli::kVersion);
  app.require_subcommand(1);

  std::string game_path;
  auto* value = app.add_subcommand("value", "Game value w*, a maximin strategy, v, m_lo, m_hi");
  value->add_option("game", game_path, "Game JSON")->required();

  cli::BoundsOptions bounds;
  auto* bcmd = app.add_subcommand("bounds", "Min-entropy function and its bounds on a grid of w (CSV)");
  bcmd->add_option("game", bounds.game, "Game JSON")->required();
  bcmd->add_option("--w-min", bounds.w_min, "Lowest w (rational), default v");
  bcmd->add_option("--w-max", bounds.w_max, "Highest w (rational), default w*");
  bcmd->add_option("--steps", bounds.steps, "Grid points")->capture_default_str()->check(CLI::PositiveNumber);
  bcmd->add_option("--out", bounds.out, "Output CSV")->required();

  cli::SimulateOptions sim;
  auto* scmd = app.add_subcommand("simulate", "Repeated game with a leaked randomness source");
  scmd->add_option("--game", sim.game, "Game JSON")->required();
  scmd->add_option("--source", sim.source, "Source JSON {\"pxy\": ...}")->required();
  scmd->add_option("--block-len", sim.block_len, "Block length L")->capture_default_str()->check(CLI::PositiveNumber);
  scmd->add_option("--blocks", sim.blocks, "Number of blocks N after the first")
      ->capture_default_str()
      ->check(CLI::NonNegativeNumber);
  scmd->add_option("--seed", sim.seed, "Seed")->capture_default_str();
  scmd->add_option("--bob", sim.bob, "myopic | uniform | fixed:J")->capture_default_str();
  scmd->add_option("--eps", sim.eps, "Smoothing for the extractor certificate")->capture_default_str();
  scmd->add_option("--out", sim.out, "Stage trace CSV; block rows go to <name>_blocks.csv");

  cli::TeamOptions team;
  auto* tcmd = app.add_subcommand("team", "Team maxmin search under imperfect monitoring");
  tcmd->add_option("team", team.team, "Team JSON")->required();
  tcmd->add_option("--restarts", team.restarts, "Barrier ascent restarts")->capture_default_str();
  tcmd->add_option("--grid", team.grid, "Product grid resolution")->capture_default_str();
  tcmd->add_option("--seed", team.seed, "Seed")->capture_default_str();

  cli::ExtractOptions ext;
  auto* ecmd = app.add_subcommand("extract", "Seeded hash extractor with exact TV and leftover certificate");
  ecmd->add_option("--source", ext.source, "Source JSON")->required();
  ecmd->add_option("--n", ext.n, "Block length")->required();
  ecmd->add_option("--bits", ext.bits, "Output bits")->required();
  ecmd->add_option("--eps", ext.eps, "Smoothing")->capture_default_str();
  ecmd->add_option("--seed", ext.seed, "Seed")->capture_default_str();
  ecmd->add_option("--tries", ext.tries, "Hash draws to try")->capture_default_str();

  cli::SeparateOptions sep;
  auto* pcmd = app.add_subcommand("separate", "Sampled check of the d1 and d2 separation bounds");
  pcmd->add_option("game", sep.game, "Game JSON")->required();
  pcmd->add_option("--w1", sep.w1, "Upper payoff level (rational)")->required();
  pcmd->add_option("--w2", sep.w2, "Lower payoff level (rational)")->required();
  pcmd->add_option("--samples", sep.samples, "Random pairs")->capture_default_str();
  pcmd->add_option("--seed", sep.seed, "Seed")->capture_default_str();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? cli::kOk : cli::kUsage;
  }

  std::vector<std::string> args(argv + 1, argv + argc);
  auto* chosen = app.get_subcommands().front();
  cli::Manifest manifest(chosen->get_name(), args);
  try {
    cli::Json out;
    if (chosen == value)
      out = cli::cmd_value(game_path, manifest);
    else if (chosen == bcmd)
      out = cli::cmd_bounds(bounds, manifest);
    else if (chosen == scmd)
      out = cli::cmd_simulate(sim, manifest);
    else if (chosen == tcmd)
      out = cli::cmd_team(team, manifest);
    else if (chosen == ecmd)
      out = cli::cmd_extract(ext, manifest);
    else
      out = cli::cmd_separate(sep, manifest);
    std::cout << out.dump(2) << "\n";
    return cli::kOk;
  } catch (const std::exception& e) {
    const int code = cli::exit_code_for(e);
    std::cerr << "error: " << e.what() << "\n";
    return code;
  }
}
