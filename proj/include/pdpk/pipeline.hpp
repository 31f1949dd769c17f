#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include "pdpk/dataset.hpp"
#include "pdpk/embedding.hpp"

namespace pdpk {

enum ExitCode : int {
  kExitOk = 0,
  kExitConfig = 1,
  kExitIo = 2,
  kExitSplit = 3,
  kExitTraining = 4,
  kExitUsage = 64,
  kExitInternal = 70,
};

std::string exit_code_help();

// Seed precedence: explicit flag, then PDPK_SEED, then the configured seed.
// Throws ConfigError for a malformed PDPK_SEED.
std::uint64_t resolve_seed(std::optional<std::uint64_t> flag, std::uint64_t configured);

struct GenerateOptions {
  std::optional<std::filesystem::path> config_path;  // defaults when absent
  std::filesystem::path output_dir;
  std::optional<std::uint64_t> seed;
};

// Writes process_data.csv, kg_<representation>.ttl x4, manifest.json and
// metadata.ttl. Files are staged in a sibling directory and moved into
// place only after every file was written.
int cmd_generate(const GenerateOptions& options, std::ostream& out, std::ostream& err);

// Writes stats.json with graph statistics and bias counts per
// representation.
int cmd_stats(const std::filesystem::path& dataset_dir, std::ostream& out, std::ostream& err);

struct SplitOptions {
  std::filesystem::path dataset_dir;
  SplitKind kind = SplitKind::link_prediction;
  std::optional<double> fraction;  // configured fraction when absent
  std::optional<std::uint64_t> seed;
  std::optional<Representation> representation;  // all when absent
};

// Link prediction: train/kg_<rep>.ttl and test/kg_<rep>.ttl.
// Downstream: train/ and test/process_data.csv plus train/pruned_kg_<rep>.ttl.
// A summary goes to split_<kind>.json.
int cmd_split(const SplitOptions& options, std::ostream& out, std::ostream& err);

struct EvalOptions {
  std::filesystem::path dataset_dir;
  std::vector<Scorer> scorers{Scorer::translation, Scorer::bilinear};
  std::optional<std::size_t> runs;  // configured eval_runs when absent
  std::optional<std::uint64_t> seed;
  std::optional<Representation> representation;  // every split one when absent
};

// Trains on each link-prediction train split, ranks its test split on both
// sides and measures matches@k on the full graph; writes eval.json.
int cmd_embed_eval(const EvalOptions& options, std::ostream& out, std::ostream& err);

// Configuration recorded in a dataset's manifest.json. Throws IoError.
GeneratorConfig load_dataset_config(const std::filesystem::path& dataset_dir);

std::string read_text_file(const std::filesystem::path& path);
void write_text_file(const std::filesystem::path& path, const std::string& text);

}  // namespace pdpk
