#include "pdpk/config.hpp"

#include <algorithm>
#include <functional>
#include <set>
#include <sstream>

#include "pdpk/errors.hpp"

namespace pdpk {

using nlohmann::json;

namespace {

std::string join_lines(const std::vector<std::string>& lines) {
  std::string out = "invalid configuration:";
  for (const auto& line : lines) out += "\n  " + line;
  return out;
}

using Violations = std::vector<std::string>;

struct Field {
  const char* name;
  const char* description;
  std::function<json(const GeneratorConfig&)> get;
  std::function<void(GeneratorConfig&, const json&, Violations&)> set;
};

std::string path(const char* name) { return std::string("/") + name; }

template <typename T>
Field count_field(const char* name, const char* description,
                  T GeneratorConfig::*member) {
  return Field{name, description,
               [member](const GeneratorConfig& c) { return json(c.*member); },
               [name, member](GeneratorConfig& c, const json& v, Violations& out) {
                 if (!v.is_number_unsigned()) {
                   out.push_back(path(name) + ": expected a non-negative integer");
                   return;
                 }
                 c.*member = v.get<T>();
               }};
}

Field real_field(const char* name, const char* description,
                 double GeneratorConfig::*member) {
  return Field{name, description,
               [member](const GeneratorConfig& c) { return json(c.*member); },
               [name, member](GeneratorConfig& c, const json& v, Violations& out) {
                 if (!v.is_number()) {
                   out.push_back(path(name) + ": expected a number");
                   return;
                 }
                 c.*member = v.get<double>();
               }};
}

json ranges_to_json(const std::vector<ValueRange>& ranges) {
  if (ranges.size() == 1) return json::array({ranges[0].min(), ranges[0].max()});
  json out = json::array();
  for (const auto& r : ranges) out.push_back(json::array({r.min(), r.max()}));
  return out;
}

std::optional<ValueRange> parse_range(const json& v, const std::string& where,
                                      Violations& out) {
  if (!v.is_array() || v.size() != 2 || !v[0].is_number() || !v[1].is_number()) {
    out.push_back(where + ": expected [min, max]");
    return std::nullopt;
  }
  try {
    return ValueRange(v[0].get<double>(), v[1].get<double>());
  } catch (const DomainError& e) {
    out.push_back(where + ": " + e.what());
    return std::nullopt;
  }
}

Field domains_field(const char* name, const char* description,
                    std::vector<ValueRange> GeneratorConfig::*member) {
  return Field{
      name, description,
      [member](const GeneratorConfig& c) { return ranges_to_json(c.*member); },
      [name, member](GeneratorConfig& c, const json& v, Violations& out) {
        if (!v.is_array() || v.empty()) {
          out.push_back(path(name) + ": expected [min, max] or a list of them");
          return;
        }
        std::vector<ValueRange> ranges;
        if (v[0].is_number()) {
          if (auto r = parse_range(v, path(name), out)) ranges.push_back(*r);
        } else {
          for (std::size_t i = 0; i < v.size(); ++i) {
            if (auto r = parse_range(v[i], path(name) + "/" + std::to_string(i), out)) {
              ranges.push_back(*r);
            }
          }
        }
        if (!ranges.empty()) c.*member = std::move(ranges);
      }};
}

const std::vector<Field>& fields() {
  static const std::vector<Field> table = [] {
    std::vector<Field> f;
    f.push_back(count_field("seed", "root seed of every random stream",
                            &GeneratorConfig::seed));
    f.push_back(count_field("p_count", "number of process parameters |P|",
                            &GeneratorConfig::p_count));
    f.push_back(count_field("q_count", "number of quality characteristics |Q|",
                            &GeneratorConfig::q_count));
    f.push_back(real_field("pq_causal_share",
                           "share of (p,q) pairs with a causal dependency",
                           &GeneratorConfig::pq_causal_share));
    f.push_back(real_field("pq_known_share",
                           "share of causal dependencies known to the expert",
                           &GeneratorConfig::pq_known_share));
    f.push_back(count_field("fanout_min",
                            "minimum qualities affected by a causal parameter",
                            &GeneratorConfig::fanout_min));
    f.push_back(count_field("fanout_max",
                            "maximum qualities affected by a causal parameter",
                            &GeneratorConfig::fanout_max));
    f.push_back(domains_field("parameter_domains",
                              "[min,max] for all parameters or one per parameter",
                              &GeneratorConfig::parameter_domains));
    f.push_back(domains_field("quality_domains",
                              "[min,max] for all qualities or one per quality; "
                              "min is the defect-free optimum",
                              &GeneratorConfig::quality_domains));
    f.push_back(Field{
        "function_kinds", "enabled dependency function families",
        [](const GeneratorConfig& c) {
          json out = json::array();
          for (auto k : c.function_kinds) out.push_back(std::string(to_string(k)));
          return out;
        },
        [](GeneratorConfig& c, const json& v, Violations& out) {
          if (!v.is_array()) {
            out.push_back("/function_kinds: expected a list of strings");
            return;
          }
          std::vector<DependencyKind> kinds;
          for (std::size_t i = 0; i < v.size(); ++i) {
            auto kind = v[i].is_string()
                            ? parse_dependency_kind(v[i].get<std::string>())
                            : std::nullopt;
            if (!kind) {
              out.push_back("/function_kinds/" + std::to_string(i) +
                            ": expected linear, quadratic or logarithmic");
              continue;
            }
            kinds.push_back(*kind);
          }
          c.function_kinds = std::move(kinds);
        }});
    f.push_back(real_field("threshold", "score threshold t ending an episode",
                           &GeneratorConfig::threshold));
    f.push_back(count_field("max_iterations",
                            "maximum iterations per parametrisation process",
                            &GeneratorConfig::max_iterations));
    f.push_back(count_field("total_iterations",
                            "process iterations to generate in total",
                            &GeneratorConfig::total_iterations));
    f.push_back(real_field("exploitative_share",
                           "probability that a process is exploitative",
                           &GeneratorConfig::exploitative_share));
    f.push_back(count_field("q_opt_size_min", "minimum size of Q_opt",
                            &GeneratorConfig::q_opt_size_min));
    f.push_back(count_field("q_opt_size_max", "maximum size of Q_opt",
                            &GeneratorConfig::q_opt_size_max));
    f.push_back(real_field("noise_sigma_rel",
                           "quality noise stddev relative to domain width",
                           &GeneratorConfig::noise_sigma_rel));
    f.push_back(Field{
        "condition_strategy", "fixed_count or freedman_diaconis",
        [](const GeneratorConfig& c) {
          return json(std::string(to_string(c.condition_strategy)));
        },
        [](GeneratorConfig& c, const json& v, Violations& out) {
          if (v == "fixed_count") {
            c.condition_strategy = ConditionStrategyKind::fixed_count;
          } else if (v == "freedman_diaconis") {
            c.condition_strategy = ConditionStrategyKind::freedman_diaconis;
          } else {
            out.push_back(
                "/condition_strategy: expected fixed_count or freedman_diaconis");
          }
        }});
    f.push_back(count_field("condition_bins",
                            "condition ranges per quality for fixed_count",
                            &GeneratorConfig::condition_bins));
    f.push_back(real_field("lp_test_fraction",
                           "share of triples held out for link prediction",
                           &GeneratorConfig::lp_test_fraction));
    f.push_back(real_field("downstream_test_fraction",
                           "share of process iterations held out downstream",
                           &GeneratorConfig::downstream_test_fraction));
    f.push_back(count_field("embedding_dim", "embedding dimension",
                            &GeneratorConfig::embedding_dim));
    f.push_back(real_field("learning_rate", "AdamW learning rate",
                           &GeneratorConfig::learning_rate));
    f.push_back(real_field("weight_decay", "decoupled weight decay",
                           &GeneratorConfig::weight_decay));
    f.push_back(count_field("translation_epochs",
                            "training epochs for the translation scorer",
                            &GeneratorConfig::translation_epochs));
    f.push_back(count_field("bilinear_epochs",
                            "training epochs for the bilinear scorer",
                            &GeneratorConfig::bilinear_epochs));
    f.push_back(count_field("batch_size", "positive triples per optimiser step",
                            &GeneratorConfig::batch_size));
    f.push_back(count_field("matches_k", "k of matches@k",
                            &GeneratorConfig::matches_k));
    f.push_back(count_field("eval_runs", "training runs averaged by embed-eval",
                            &GeneratorConfig::eval_runs));
    return f;
  }();
  return table;
}

void check(bool ok, const std::string& message, Violations& out) {
  if (!ok) out.push_back(message);
}

}  // namespace

ConfigError::ConfigError(std::vector<std::string> violations)
    : Error(join_lines(violations)), violations_(std::move(violations)) {}

ValueRange GeneratorConfig::parameter_domain(std::size_t k) const {
  return parameter_domains.size() == 1 ? parameter_domains.front()
                                       : parameter_domains.at(k);
}

ValueRange GeneratorConfig::quality_domain(std::size_t j) const {
  return quality_domains.size() == 1 ? quality_domains.front()
                                     : quality_domains.at(j);
}

void GeneratorConfig::validate() const {
  Violations out;
  auto share = [&](double v, const char* name) {
    check(v >= 0.0 && v <= 1.0, path(name) + ": must lie in [0, 1]", out);
  };
  auto fraction = [&](double v, const char* name) {
    check(v > 0.0 && v < 1.0, path(name) + ": must lie in (0, 1)", out);
  };
  check(p_count >= 1, "/p_count: must be at least 1", out);
  check(q_count >= 1, "/q_count: must be at least 1", out);
  share(pq_causal_share, "pq_causal_share");
  share(pq_known_share, "pq_known_share");
  check(fanout_min >= 1, "/fanout_min: must be at least 1", out);
  check(fanout_min <= fanout_max, "/fanout_min: must not exceed fanout_max", out);
  check(fanout_max <= q_count, "/fanout_max: must not exceed q_count", out);
  check(parameter_domains.size() == 1 || parameter_domains.size() == p_count,
        "/parameter_domains: need one range or p_count ranges", out);
  check(quality_domains.size() == 1 || quality_domains.size() == q_count,
        "/quality_domains: need one range or q_count ranges", out);
  check(!function_kinds.empty(), "/function_kinds: must not be empty", out);
  check(std::set(function_kinds.begin(), function_kinds.end()).size() ==
            function_kinds.size(),
        "/function_kinds: duplicate entries", out);
  share(threshold, "threshold");
  check(max_iterations >= 1, "/max_iterations: must be at least 1", out);
  check(total_iterations >= max_iterations,
        "/total_iterations: must be at least max_iterations", out);
  share(exploitative_share, "exploitative_share");
  check(q_opt_size_min >= 1, "/q_opt_size_min: must be at least 1", out);
  check(q_opt_size_min <= q_opt_size_max,
        "/q_opt_size_min: must not exceed q_opt_size_max", out);
  check(q_opt_size_max <= q_count, "/q_opt_size_max: must not exceed q_count",
        out);
  check(noise_sigma_rel >= 0.0, "/noise_sigma_rel: must be non-negative", out);
  check(condition_bins >= 1, "/condition_bins: must be at least 1", out);
  fraction(lp_test_fraction, "lp_test_fraction");
  fraction(downstream_test_fraction, "downstream_test_fraction");
  check(embedding_dim >= 1, "/embedding_dim: must be at least 1", out);
  check(learning_rate > 0.0, "/learning_rate: must be positive", out);
  check(weight_decay >= 0.0, "/weight_decay: must be non-negative", out);
  check(translation_epochs >= 1, "/translation_epochs: must be at least 1", out);
  check(bilinear_epochs >= 1, "/bilinear_epochs: must be at least 1", out);
  check(batch_size >= 1, "/batch_size: must be at least 1", out);
  check(matches_k >= 1, "/matches_k: must be at least 1", out);
  check(eval_runs >= 1, "/eval_runs: must be at least 1", out);
  if (!out.empty()) throw ConfigError(std::move(out));
}

GeneratorConfig config_from_json(const json& document) {
  if (!document.is_object()) throw ConfigError("/: expected a JSON object");
  GeneratorConfig config;
  Violations out;
  for (const auto& [key, value] : document.items()) {
    auto it = std::find_if(fields().begin(), fields().end(),
                           [&](const Field& f) { return key == f.name; });
    if (it == fields().end()) {
      out.push_back("/" + key + ": unknown key");
      continue;
    }
    it->set(config, value, out);
  }
  if (!out.empty()) throw ConfigError(std::move(out));
  config.validate();
  return config;
}

GeneratorConfig load_config(std::string_view json_text) {
  json document;
  try {
    document = json::parse(json_text);
  } catch (const json::parse_error& e) {
    throw ConfigError(std::string("/: malformed JSON: ") + e.what());
  }
  return config_from_json(document);
}

json to_json(const GeneratorConfig& config) {
  json out = json::object();
  for (const auto& f : fields()) out[f.name] = f.get(config);
  return out;
}

std::vector<ConfigKey> config_keys() {
  const GeneratorConfig defaults;
  std::vector<ConfigKey> keys;
  for (const auto& f : fields()) {
    keys.push_back({f.name, f.get(defaults).dump(), f.description});
  }
  return keys;
}

std::string config_help_text() {
  std::ostringstream out;
  out << "Configuration keys (JSON object; missing keys take the default):\n";
  for (const auto& key : config_keys()) {
    out << "  " << key.name << " = " << key.default_value << "\n      "
        << key.description << "\n";
  }
  return out.str();
}

std::string_view to_string(ConditionStrategyKind kind) {
  return kind == ConditionStrategyKind::fixed_count ? "fixed_count"
                                                    : "freedman_diaconis";
}

}  // namespace pdpk
