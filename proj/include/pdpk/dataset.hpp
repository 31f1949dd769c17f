#pragma once

#include <cstddef>
#include <map>
#include <optional>
#include <ostream>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "json.hpp"
#include "pdpk/config.hpp"
#include "pdpk/kg_gen.hpp"
#include "pdpk/knowledge_graph.hpp"
#include "pdpk/pq_space.hpp"
#include "pdpk/process_sim.hpp"
#include "pdpk/random.hpp"

namespace pdpk {

inline constexpr std::string_view kVersion = "1.0.0";

struct Dataset {
  GeneratorConfig config;
  PQSpace space;
  std::vector<ParametrisationProcess> processes;
  std::vector<Rule> rules;
  std::map<Representation, KnowledgeGraph> kgs;
  std::vector<std::string> warnings;

  std::size_t iteration_count() const;
};

// Runs space sampling, process simulation, rule extraction and KG rendering,
// each on its own named substream of config.seed.
Dataset generate_dataset(const GeneratorConfig& config);

// (process id, iteration index)
using IterationRef = std::pair<std::size_t, std::size_t>;

// Header process_id,behaviour,iteration,score,p_0..,q_0.. then one row per
// iteration, reals with 9 significant digits. With `only` set, rows outside
// it are skipped. Throws IoError when the sink fails.
void write_process_csv(std::ostream& out, const Dataset& dataset,
                       const std::set<IterationRef>* only = nullptr);
std::string format_csv_double(double value);

nlohmann::json manifest_json(const Dataset& dataset);
std::string metadata_turtle(const Dataset& dataset);

// File name of a representation's Turtle artifact, e.g. kg_ch_e.ttl.
std::string kg_file_name(Representation representation);

enum class SplitKind { link_prediction, downstream };

struct SplitResult {
  SplitKind kind = SplitKind::link_prediction;
  // Link prediction: entity-graph triples, plus any annotation statements
  // that would reveal a test triple, which travel with it.
  std::vector<Triple> train, test;
  // Downstream: iterations.
  std::vector<IterationRef> train_iterations, test_iterations;
  // Downstream: graphs rebuilt without test observations.
  std::map<Representation, KnowledgeGraph> pruned_kgs;
  bool pruning_was_noop = true;
  double requested_fraction = 0.0;
  double achieved_fraction = 0.0;
  std::vector<std::string> warnings;
};

// Moves round(fraction * |entity-graph triples|) triples to the test side,
// scanning a seeded permutation and skipping any triple whose removal would
// leave one of its entities or its relation absent from train. Literal
// statements stay in train unless they hang off an annotation node linking
// the two ends of a test triple. Throws SplitInfeasibleError when no triple
// can be moved and DomainError for a fraction outside (0, 1).
SplitResult split_link_prediction(const KnowledgeGraph& kg, double fraction,
                                  SeededRandom& rng);

// Samples whole iterations into test. Rules derived from fixed condition
// ranges do not depend on observations, so the graphs are returned as is;
// data-driven condition ranges are recomputed from the train iterations.
SplitResult split_downstream(const Dataset& dataset, double fraction, SeededRandom& rng);

}  // namespace pdpk
