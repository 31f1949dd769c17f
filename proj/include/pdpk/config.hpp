#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "json.hpp"
#include "pdpk/types.hpp"

namespace pdpk {

enum class ConditionStrategyKind { fixed_count, freedman_diaconis };

// Every knob of the generation and evaluation pipeline. Defaults reproduce
// the benchmark dataset.
struct GeneratorConfig {
  std::uint64_t seed = 42;

  std::size_t p_count = 46;
  std::size_t q_count = 16;
  double pq_causal_share = 0.10;
  double pq_known_share = 0.75;
  std::size_t fanout_min = 1;
  std::size_t fanout_max = 14;
  // Either one range shared by all entries or one range per entry.
  std::vector<ValueRange> parameter_domains{ValueRange(0.0, 100.0)};
  std::vector<ValueRange> quality_domains{ValueRange(0.0, 10.0)};
  std::vector<DependencyKind> function_kinds{kAllDependencyKinds.begin(),
                                             kAllDependencyKinds.end()};

  double threshold = 0.25;
  std::size_t max_iterations = 15;
  std::size_t total_iterations = 500;
  double exploitative_share = 0.5;
  std::size_t q_opt_size_min = 1;
  std::size_t q_opt_size_max = 3;
  double noise_sigma_rel = 0.0;

  ConditionStrategyKind condition_strategy = ConditionStrategyKind::fixed_count;
  std::size_t condition_bins = 1;

  double lp_test_fraction = 0.2;
  double downstream_test_fraction = 0.2;

  std::size_t embedding_dim = 46;
  double learning_rate = 4e-4;
  double weight_decay = 1e-5;
  std::size_t translation_epochs = 400;
  std::size_t bilinear_epochs = 800;
  std::size_t batch_size = 8;
  std::size_t matches_k = 3;
  std::size_t eval_runs = 30;

  ValueRange parameter_domain(std::size_t k) const;
  ValueRange quality_domain(std::size_t j) const;

  // Throws ConfigError listing every violated invariant.
  void validate() const;
};

// Parses and validates a JSON document. Unknown keys are rejected, missing
// keys keep their defaults. Throws ConfigError.
GeneratorConfig load_config(std::string_view json_text);
GeneratorConfig config_from_json(const nlohmann::json& document);
nlohmann::json to_json(const GeneratorConfig& config);

struct ConfigKey {
  std::string name;
  std::string default_value;
  std::string description;
};

// Every accepted key with its default, in schema order.
std::vector<ConfigKey> config_keys();
std::string config_help_text();

std::string_view to_string(ConditionStrategyKind kind);

}  // namespace pdpk
