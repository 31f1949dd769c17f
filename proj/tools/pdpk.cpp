#include <iostream>
#include <map>
#include <optional>
#include <string>

#include "CLI11.hpp"
#include "pdpk/config.hpp"
#include "pdpk/pipeline.hpp"

int main(int argc, char** argv) {
  using namespace pdpk;
  CLI::App app{"pdpk: synthetic manufacturing process data and procedural knowledge graphs"};
  app.require_subcommand(1);
  app.footer("\n" + config_help_text() + "\n" + exit_code_help() +
             "\nPDPK_SEED overrides the configured seed; --seed overrides both.\n");

  std::optional<std::string> config_path;
  std::string dir;
  std::optional<std::uint64_t> seed;
  std::optional<double> fraction;
  std::optional<std::size_t> runs;
  std::string kind = "lp";
  std::string scorer = "both";
  std::optional<std::string> representation;

  const std::vector<std::string> representations = {"ch_e", "ch_e_eta", "ch_l_eta", "rei_e"};

  auto* generate = app.add_subcommand("generate", "Generate a dataset into --out");
  generate->add_option("--config", config_path, "JSON configuration file");
  generate->add_option("--out", dir, "Output directory")->required();
  generate->add_option("--seed", seed, "Root seed");

  auto* stats = app.add_subcommand("stats", "Write stats.json for a dataset");
  stats->add_option("--out", dir, "Dataset directory")->required();

  auto* split = app.add_subcommand("split", "Write train/ and test/ splits of a dataset");
  split->add_option("--out", dir, "Dataset directory")->required();
  split->add_option("--kind", kind, "lp or downstream")
      ->check(CLI::IsMember({"lp", "downstream"}));
  split->add_option("--fraction", fraction, "Test fraction in (0, 1)");
  split->add_option("--seed", seed, "Split seed");
  split->add_option("--representation", representation, "Only this representation")
      ->check(CLI::IsMember(representations));

  auto* evaluate = app.add_subcommand("embed-eval", "Train embeddings and write eval.json");
  evaluate->add_option("--out", dir, "Dataset directory")->required();
  evaluate->add_option("--scorer", scorer, "translation, bilinear or both")
      ->check(CLI::IsMember({"translation", "bilinear", "both"}));
  evaluate->add_option("--runs", runs, "Number of training runs");
  evaluate->add_option("--seed", seed, "Evaluation seed");
  evaluate->add_option("--representation", representation, "Only this representation")
      ->check(CLI::IsMember(representations));

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitUsage;
  }

  std::optional<Representation> chosen;
  if (representation) chosen = parse_representation(*representation);

  if (generate->parsed()) {
    GenerateOptions options;
    if (config_path) options.config_path = *config_path;
    options.output_dir = dir;
    options.seed = seed;
    return cmd_generate(options, std::cout, std::cerr);
  }
  if (stats->parsed()) return cmd_stats(dir, std::cout, std::cerr);
  if (split->parsed()) {
    SplitOptions options;
    options.dataset_dir = dir;
    options.kind = kind == "lp" ? SplitKind::link_prediction : SplitKind::downstream;
    options.fraction = fraction;
    options.seed = seed;
    options.representation = chosen;
    return cmd_split(options, std::cout, std::cerr);
  }
  EvalOptions options;
  options.dataset_dir = dir;
  if (scorer != "both") options.scorers = {*parse_scorer(scorer)};
  options.runs = runs;
  options.seed = seed;
  options.representation = chosen;
  return cmd_embed_eval(options, std::cout, std::cerr);
}
