#include "pdpk/pipeline.hpp"

#include <cmath>
#include <cstdlib>
#include <fstream>
#include <iterator>
#include <sstream>

#include "json.hpp"
#include "pdpk/errors.hpp"
#include "pdpk/graph_analysis.hpp"
#include "pdpk/metrics.hpp"
#include "pdpk/turtle.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace pdpk {

std::string exit_code_help() {
  return "Exit codes:\n"
         "  0   success\n"
         "  1   invalid configuration\n"
         "  2   missing, unreadable or unwritable files\n"
         "  3   infeasible train/test split\n"
         "  4   embedding training diverged\n"
         "  64  usage error\n"
         "  70  internal error\n";
}

std::uint64_t resolve_seed(std::optional<std::uint64_t> flag, std::uint64_t configured) {
  if (flag) return *flag;
  if (const char* env = std::getenv("PDPK_SEED"); env && *env) {
    try {
      std::size_t used = 0;
      const auto value = std::stoull(env, &used);
      if (used == std::string(env).size()) return value;
    } catch (const std::exception&) {
    }
    throw ConfigError("PDPK_SEED: not an unsigned integer: " + std::string(env));
  }
  return configured;
}

std::string read_text_file(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot read " + path.string());
  std::string text((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  if (in.bad()) throw IoError("cannot read " + path.string());
  return text;
}

void write_text_file(const fs::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot write " + path.string());
  out << text;
  out.close();
  if (!out) throw IoError("cannot write " + path.string());
}

GeneratorConfig load_dataset_config(const fs::path& dataset_dir) {
  const auto manifest_path = dataset_dir / "manifest.json";
  const auto text = read_text_file(manifest_path);
  const auto manifest = json::parse(text, nullptr, false);
  if (manifest.is_discarded() || !manifest.contains("config")) {
    throw IoError("malformed " + manifest_path.string());
  }
  return config_from_json(manifest.at("config"));
}

namespace {

template <typename Body>
int guarded(std::ostream& err, Body&& body) {
  try {
    return body();
  } catch (const ConfigError& e) {
    err << "error: " << e.what() << "\n";
    return kExitConfig;
  } catch (const IoError& e) {
    err << "error: " << e.what() << "\n";
    return kExitIo;
  } catch (const ParseError& e) {
    err << "error: " << e.what() << "\n";
    return kExitIo;
  } catch (const fs::filesystem_error& e) {
    err << "error: " << e.what() << "\n";
    return kExitIo;
  } catch (const SplitInfeasibleError& e) {
    err << "error: " << e.what() << "\n";
    return kExitSplit;
  } catch (const TrainingDivergedError& e) {
    err << "error: " << e.what() << "\n";
    return kExitTraining;
  } catch (const std::exception& e) {
    err << "internal error: " << e.what() << "\n";
    return kExitInternal;
  }
}

std::string json_text(const json& document) { return document.dump(2) + "\n"; }

std::string csv_text(const Dataset& dataset, const std::set<IterationRef>* only = nullptr) {
  std::ostringstream out;
  write_process_csv(out, dataset, only);
  return out.str();
}

KnowledgeGraph load_kg(const fs::path& path, Representation representation) {
  return parse_turtle(read_text_file(path), representation);
}

std::vector<Representation> selected(std::optional<Representation> representation) {
  if (representation) return {*representation};
  return {kAllRepresentations.begin(), kAllRepresentations.end()};
}

json mean_std(const std::vector<double>& values) {
  double mean = 0.0;
  for (double v : values) mean += v;
  mean /= static_cast<double>(values.size());
  double var = 0.0;
  for (double v : values) var += (v - mean) * (v - mean);
  return {{"mean", mean}, {"std", std::sqrt(var / static_cast<double>(values.size()))}};
}

json summary_json(double mean, double std) { return {{"mean", mean}, {"std", std}}; }

// Re-expresses triples of `from` with the ids of `to`.
std::vector<Triple> translate(const KnowledgeGraph& from, const std::vector<Triple>& triples,
                              const KnowledgeGraph& to) {
  std::vector<Triple> out;
  for (const auto& t : triples) {
    const auto h = to.find_entity(from.entity_iri(t.head));
    const auto r = to.find_relation(from.relation_iri(t.relation));
    const auto tail = to.find_entity(from.entity_iri(t.tail_entity()));
    if (!h || !r || !tail) {
      throw UnknownIdError("test triple refers to an entity or relation absent from train");
    }
    out.push_back({*h, *r, *tail});
  }
  return out;
}

}  // namespace

int cmd_generate(const GenerateOptions& options, std::ostream& out, std::ostream& err) {
  return guarded(err, [&] {
    GeneratorConfig config;
    if (options.config_path) config = load_config(read_text_file(*options.config_path));
    config.seed = resolve_seed(options.seed, config.seed);
    config.validate();
    const auto dataset = generate_dataset(config);

    const fs::path target = options.output_dir;
    const fs::path staging = target.string() + ".partial";
    fs::remove_all(staging);
    fs::create_directories(staging);
    std::vector<std::string> names;
    try {
      auto emit = [&](const std::string& name, const std::string& text) {
        write_text_file(staging / name, text);
        names.push_back(name);
      };
      emit("process_data.csv", csv_text(dataset));
      for (const auto& [representation, kg] : dataset.kgs) {
        emit(kg_file_name(representation), to_turtle(kg));
      }
      emit("manifest.json", json_text(manifest_json(dataset)));
      emit("metadata.ttl", metadata_turtle(dataset));

      if (!fs::exists(target)) {
        if (target.has_parent_path()) fs::create_directories(target.parent_path());
        fs::rename(staging, target);
      } else {
        for (const auto& name : names) fs::rename(staging / name, target / name);
        fs::remove_all(staging);
      }
    } catch (...) {
      std::error_code ignored;
      fs::remove_all(staging, ignored);
      throw;
    }
    for (const auto& warning : dataset.warnings) err << "warning: " << warning << "\n";
    out << "wrote " << names.size() << " files to " << target.string() << " (" << dataset.rules.size()
        << " rules, " << dataset.processes.size() << " processes, " << dataset.iteration_count()
        << " iterations)\n";
    return kExitOk;
  });
}

int cmd_stats(const fs::path& dataset_dir, std::ostream& out, std::ostream& err) {
  return guarded(err, [&] {
    json report = json::object();
    for (auto representation : kAllRepresentations) {
      const auto kg = load_kg(dataset_dir / kg_file_name(representation), representation);
      const auto stats = compute_stats(kg);
      const auto reciprocal = compute_stats(kg, DegreeCentralityForm::reciprocal);
      const auto bias = detect_biases(kg);
      report[std::string(to_string(representation))] = {
          {"edges", stats.edge_count},
          {"vertices", stats.vertex_count},
          {"relations", stats.relation_count},
          {"isolated_vertices", stats.isolated_vertices},
          {"closeness", summary_json(stats.closeness_mean, stats.closeness_std)},
          {"degree_centrality",
           summary_json(stats.degree_centrality_mean, stats.degree_centrality_std)},
          {"degree_centrality_reciprocal",
           summary_json(reciprocal.degree_centrality_mean, reciprocal.degree_centrality_std)},
          {"average_neighbour_degree",
           summary_json(stats.avg_neighbour_degree_mean, stats.avg_neighbour_degree_std)},
          {"average_degree", summary_json(stats.avg_degree_mean, stats.avg_degree_std)},
          {"bias",
           {{"type1", bias.flagged_b1.size()},
            {"type2", bias.flagged_b2.size()},
            {"type3", bias.flagged_b3.size()},
            {"flagged", bias.flagged_count()}}}};
      out << to_string(representation) << ": " << stats.edge_count << " edges, "
          << stats.vertex_count << " vertices, " << stats.relation_count << " relations, "
          << bias.flagged_count() << " biased triples\n";
    }
    write_text_file(dataset_dir / "stats.json", json_text(report));
    return kExitOk;
  });
}

int cmd_split(const SplitOptions& options, std::ostream& out, std::ostream& err) {
  if (options.fraction && !(*options.fraction > 0.0 && *options.fraction < 1.0)) {
    err << "error: --fraction must lie in (0, 1)\n";
    return kExitUsage;
  }
  return guarded(err, [&] {
    const auto config = load_dataset_config(options.dataset_dir);
    const auto seed = resolve_seed(options.seed, config.seed);
    const SeededRandom root(seed);
    const auto train_dir = options.dataset_dir / "train";
    const auto test_dir = options.dataset_dir / "test";
    fs::create_directories(train_dir);
    fs::create_directories(test_dir);
    json summary = {{"seed", seed}};

    if (options.kind == SplitKind::link_prediction) {
      const double fraction = options.fraction.value_or(config.lp_test_fraction);
      summary["kind"] = "link_prediction";
      for (auto representation : selected(options.representation)) {
        const auto kg = load_kg(options.dataset_dir / kg_file_name(representation), representation);
        auto rng = root.substream("lp_split", static_cast<std::uint64_t>(representation));
        const auto split = split_link_prediction(kg, fraction, rng);
        write_text_file(train_dir / kg_file_name(representation),
                        to_turtle(kg.with_triples(split.train)));
        write_text_file(test_dir / kg_file_name(representation),
                        to_turtle(kg.with_triples(split.test)));
        std::size_t train_edges = 0, test_edges = 0;
        for (const auto& t : split.train) train_edges += kg.is_structural(t);
        for (const auto& t : split.test) test_edges += kg.is_structural(t);
        summary["representations"][std::string(to_string(representation))] = {
            {"train_triples", train_edges},
            {"test_triples", test_edges},
            {"requested_fraction", split.requested_fraction},
            {"achieved_fraction", split.achieved_fraction},
            {"warnings", split.warnings}};
        for (const auto& warning : split.warnings) {
          err << "warning: " << to_string(representation) << ": " << warning << "\n";
        }
        out << to_string(representation) << ": " << train_edges << " train / " << test_edges
            << " test triples\n";
      }
      write_text_file(options.dataset_dir / "split_link_prediction.json", json_text(summary));
      return kExitOk;
    }

    const double fraction = options.fraction.value_or(config.downstream_test_fraction);
    const auto dataset = generate_dataset(config);
    if (csv_text(dataset) != read_text_file(options.dataset_dir / "process_data.csv")) {
      throw IoError("process_data.csv does not match the dataset described by manifest.json");
    }
    auto rng = root.substream("downstream_split");
    const auto split = split_downstream(dataset, fraction, rng);
    const std::set<IterationRef> train(split.train_iterations.begin(), split.train_iterations.end());
    const std::set<IterationRef> test(split.test_iterations.begin(), split.test_iterations.end());
    write_text_file(train_dir / "process_data.csv", csv_text(dataset, &train));
    write_text_file(test_dir / "process_data.csv", csv_text(dataset, &test));
    for (const auto& [representation, kg] : split.pruned_kgs) {
      write_text_file(train_dir / ("pruned_" + kg_file_name(representation)), to_turtle(kg));
    }
    summary["kind"] = "downstream";
    summary["train_iterations"] = train.size();
    summary["test_iterations"] = test.size();
    summary["requested_fraction"] = split.requested_fraction;
    summary["achieved_fraction"] = split.achieved_fraction;
    summary["pruning_was_noop"] = split.pruning_was_noop;
    summary["warnings"] = split.warnings;
    write_text_file(options.dataset_dir / "split_downstream.json", json_text(summary));
    out << "downstream: " << train.size() << " train / " << test.size() << " test iterations"
        << (split.pruning_was_noop ? ", graphs unchanged" : ", graphs pruned") << "\n";
    return kExitOk;
  });
}

int cmd_embed_eval(const EvalOptions& options, std::ostream& out, std::ostream& err) {
  if (options.runs && *options.runs == 0) {
    err << "error: --runs must be positive\n";
    return kExitUsage;
  }
  if (options.scorers.empty()) {
    err << "error: no scorer selected\n";
    return kExitUsage;
  }
  return guarded(err, [&] {
    const auto config = load_dataset_config(options.dataset_dir);
    const auto seed = resolve_seed(options.seed, config.seed);
    const auto runs = options.runs.value_or(config.eval_runs);
    const SeededRandom root(seed);

    std::vector<Representation> representations;
    for (auto representation : selected(options.representation)) {
      if (fs::exists(options.dataset_dir / "train" / kg_file_name(representation))) {
        representations.push_back(representation);
      }
    }
    if (representations.empty()) {
      throw IoError("no link-prediction split found; run `split --kind lp` first");
    }

    json report = {{"runs", runs}, {"seed", seed}, {"results", json::array()},
                   {"matches", json::array()}};
    for (auto representation : representations) {
      const auto name = kg_file_name(representation);
      const auto train_kg = load_kg(options.dataset_dir / "train" / name, representation);
      const auto test_kg = load_kg(options.dataset_dir / "test" / name, representation);
      const auto full_kg = load_kg(options.dataset_dir / name, representation);
      const auto test = translate(test_kg, test_kg.structural_triples(), train_kg);
      const auto known = train_kg.structural_triples();
      const auto candidates = train_kg.structural_entities();
      const auto rules = rules_from_kg(full_kg);

      for (auto scorer : options.scorers) {
        TrainingOptions training;
        training.scorer = scorer;
        training.dim = config.embedding_dim;
        training.epochs =
            scorer == Scorer::translation ? config.translation_epochs : config.bilinear_epochs;
        training.learning_rate = config.learning_rate;
        training.weight_decay = config.weight_decay;
        training.batch_size = config.batch_size;

        std::map<std::string, std::vector<double>> metrics;
        std::vector<double> matches_h, matches_hbar, matches_random;
        std::size_t converged = 0;
        const std::string stream =
            std::string(to_string(representation)) + "/" + std::string(to_string(scorer));
        for (std::size_t run = 0; run < runs; ++run) {
          auto rng = root.substream("embeddings", run).substream(stream);
          TrainingReport training_report;
          const auto model = train(train_kg, training, rng, &training_report);
          converged += training_report.converged;
          std::vector<RankResult> both;
          for (auto side : {Side::head, Side::tail}) {
            const auto ranks = rank(model, test, known, candidates, {side});
            both.insert(both.end(), ranks.begin(), ranks.end());
            const std::string prefix = std::string(to_string(side)) + "/";
            metrics[prefix + "amri"].push_back(amri(ranks));
            for (int k : {1, 5, 10}) {
              metrics[prefix + "hits@" + std::to_string(k)].push_back(hits_at_k(ranks, k));
            }
          }
          metrics["both/amri"].push_back(amri(both));
          for (int k : {1, 5, 10}) {
            metrics["both/hits@" + std::to_string(k)].push_back(hits_at_k(both, k));
          }

          auto full_rng = rng.substream("full");
          const auto full_model = train(full_kg, training, full_rng);
          MatchesConfig matches{config.matches_k, true, std::nullopt};
          matches_h.push_back(matches_at_k(full_model, full_kg, rules, matches));
          matches.include_head = false;
          matches_hbar.push_back(matches_at_k(full_model, full_kg, rules, matches));
          auto random_rng = rng.substream("random");
          const auto baseline = random_model(full_kg, scorer, config.embedding_dim, random_rng);
          matches.include_head = true;
          matches_random.push_back(matches_at_k(baseline, full_kg, rules, matches));
        }

        for (const std::string side : {"head", "tail", "both"}) {
          json entry = {{"representation", to_string(representation)},
                        {"scorer", to_string(scorer)},
                        {"side", side},
                        {"test_triples", test.size()}};
          for (const std::string metric : {"amri", "hits@1", "hits@5", "hits@10"}) {
            entry[metric] = mean_std(metrics[side + "/" + metric]);
          }
          report["results"].push_back(entry);
        }
        report["matches"].push_back({{"representation", to_string(representation)},
                                     {"scorer", to_string(scorer)},
                                     {"k", config.matches_k},
                                     {"h", mean_std(matches_h)},
                                     {"h_bar", mean_std(matches_hbar)},
                                     {"random_baseline", mean_std(matches_random)},
                                     {"converged_runs", converged}});
        const auto amri_summary = mean_std(metrics["both/amri"]);
        const auto hits_summary = mean_std(metrics["both/hits@10"]);
        out << to_string(representation) << " " << to_string(scorer)
            << ": AMRI " << amri_summary["mean"].get<double>() << ", hits@10 "
            << hits_summary["mean"].get<double>() << ", matches@" << config.matches_k << " "
            << mean_std(matches_h)["mean"].get<double>() << "\n";
      }
    }
    write_text_file(options.dataset_dir / "eval.json", json_text(report));
    return kExitOk;
  });
}

}  // namespace pdpk
