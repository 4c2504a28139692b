#include <CLI11.hpp>

#include <iostream>

#include "nlf/cli.hpp"

int main(int argc, char** argv) {
  CLI::App app{"Nonlocal form verification runs"};
  app.require_subcommand(0, 1);
  app.fallthrough();

  std::string config_path, out_dir;
  std::optional<int> threads;
  std::optional<double> tol;
  std::optional<unsigned> seed;
  app.add_option("--config", config_path, "experiment config (JSON, schema 1)");
  app.add_option("--threads", threads, "worker count")->check(CLI::PositiveNumber);
  app.add_option("--tol", tol, "relative quadrature tolerance")->check(CLI::PositiveNumber);
  app.add_option("--out", out_dir, "report directory");
  app.add_option("--seed", seed, "seed for randomized families");

  std::vector<std::pair<nlf::Task, CLI::App*>> subs;
  for (auto t : {nlf::Task::CheckConditions, nlf::Task::Compare, nlf::Task::CheckB, nlf::Task::Spectral,
                 nlf::Task::Solve, nlf::Task::Holder, nlf::Task::ThornDemo}) {
    subs.emplace_back(t, app.add_subcommand(nlf::to_string(t)));
  }
  auto* thorn = subs.back().second;
  std::optional<double> b, alpha;
  thorn->add_option("--b", b, "thorn exponent in (0,1)");
  thorn->add_option("--alpha", alpha, "order in (0,2)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : 3;
  }

  std::optional<nlf::Task> chosen;
  for (const auto& [t, sub] : subs)
    if (sub->parsed()) chosen = t;

  nlf::ExperimentConfig cfg;
  try {
    if (!config_path.empty()) {
      cfg = nlf::load_config(config_path);
      if (chosen && *chosen != cfg.task)
        throw nlf::SchemaError(std::string("subcommand '") + nlf::to_string(*chosen) + "' does not match config task '" +
                               nlf::to_string(cfg.task) + "'");
    } else if (chosen) {
      nlohmann::json j{{"schema", nlf::kSchemaVersion}, {"task", nlf::to_string(*chosen)}};
      if (*chosen == nlf::Task::ThornDemo) j["params"] = nlohmann::json::object();
      cfg = nlf::parse_config(j);
    } else {
      throw nlf::SchemaError("either a subcommand or --config is required");
    }
    if (cfg.task == nlf::Task::ThornDemo) {
      if (b) cfg.params["b"] = *b;
      if (alpha) cfg.alpha = *alpha;
    }
    if (threads) cfg.threads = *threads;
    if (tol) cfg.budget.rel_tol = *tol;
    if (!out_dir.empty()) cfg.out_dir = out_dir;
    if (seed) cfg.seed = *seed;
  } catch (const nlf::SchemaError& e) {
    std::cerr << "schema error: " << e.what() << "\n";
    return 3;
  }

  const auto result = nlf::run(cfg);
  if (result.exit_code == 3 || result.summary.contains("error")) {
    std::cerr << (result.exit_code == 3 ? "schema error: " : "error: ") << result.summary.value("error", "") << "\n";
    return result.exit_code;
  }
  for (const auto& f : result.files) std::cout << f << "\n";
  std::cout << "verdict: " << result.summary.value("verdict", "?") << "\n";
  return result.exit_code;
}
