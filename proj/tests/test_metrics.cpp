#include <algorithm>
#include <cmath>
#include <numeric>

#include "doctest.h"
#include "pdpk/errors.hpp"
#include "pdpk/kg_gen.hpp"
#include "pdpk/metrics.hpp"

using namespace pdpk;

namespace {

// Ranks by listing every surviving candidate in score order and averaging
// the positions that share the true score.
double brute_force_rank(const EmbeddingModel& model, const Triple& t,
                        const std::set<std::tuple<EntityId, RelationId, EntityId>>& filter,
                        std::size_t entity_count, Side side, std::size_t* survivors) {
  const auto truth = side == Side::head ? t.head : t.tail_entity();
  std::vector<std::pair<double, EntityId>> scored;
  for (EntityId e = 0; e < entity_count; ++e) {
    const auto h = side == Side::head ? e : t.head;
    const auto tail = side == Side::head ? t.tail_entity() : e;
    if (e != truth && filter.contains({h, t.relation, tail})) continue;
    scored.push_back({model.score(h, t.relation, tail), e});
  }
  std::sort(scored.begin(), scored.end(), [](auto& a, auto& b) { return a.first > b.first; });
  const double true_score = model.score(t.head, t.relation, t.tail_entity());
  double position_sum = 0;
  int ties = 0;
  for (std::size_t i = 0; i < scored.size(); ++i) {
    if (scored[i].first == true_score) {
      position_sum += static_cast<double>(i + 1);
      ++ties;
    }
  }
  *survivors = scored.size();
  return position_sum / ties;
}

}  // namespace

TEST_CASE("hits@k examples") {
  const std::vector<RankResult> ranks{{1, 10}, {3, 10}, {7, 10}};
  CHECK(hits_at_k(ranks, 5) == doctest::Approx(2.0 / 3.0));
  CHECK(hits_at_k(std::vector<RankResult>{{1, 5}, {1, 5}}, 1) == 1.0);
  CHECK(hits_at_k(ranks, 0.5) == 0.0);
  CHECK_THROWS_AS(hits_at_k(std::vector<RankResult>{}, 1), EmptyInputError);
  double previous = 0;
  for (double k = 1; k <= 10; ++k) {
    CHECK(hits_at_k(ranks, k) >= previous);
    previous = hits_at_k(ranks, k);
  }
  CHECK(previous == 1.0);
}

TEST_CASE("AMRI examples") {
  CHECK(amri(std::vector<RankResult>{{1, 5}, {1, 9}}) == 1.0);
  CHECK(amri(std::vector<RankResult>{{6, 11}}) == doctest::Approx(0.0));
  CHECK(amri(std::vector<RankResult>{{11, 11}}) == doctest::Approx(-1.0));
  CHECK_THROWS_AS(amri(std::vector<RankResult>{{1, 1}}), DegenerateCandidateSetError);
  CHECK_THROWS_AS(amri(std::vector<RankResult>{}), EmptyInputError);
}

TEST_CASE("rank tie conventions") {
  // All candidates score equally.
  const auto constant = [](EntityId, RelationId, EntityId) { return 0.5; };
  const std::vector<Triple> test{{0, 0, EntityId{1}}};
  const std::vector<EntityId> candidates{0, 1, 2, 3, 4};
  CHECK(rank(constant, test, {}, candidates)[0].rank == doctest::Approx(3.0));
  CHECK(rank(constant, test, {}, candidates, {Side::tail, TieMode::optimistic})[0].rank == 1.0);
  CHECK(rank(constant, test, {}, candidates, {Side::tail, TieMode::pessimistic})[0].rank == 5.0);
  CHECK(rank(constant, test, {}, candidates)[0].candidates == 5);

  const auto favour_truth = [](EntityId, RelationId, EntityId t) { return t == 1 ? 1.0 : 0.0; };
  CHECK(rank(favour_truth, test, {}, candidates)[0].rank == 1.0);

  // A known triple scoring higher is filtered rather than outranking.
  const auto favour_other = [](EntityId, RelationId, EntityId t) { return t == 2 ? 2.0 : t == 1 ? 1.0 : 0.0; };
  const std::vector<Triple> known{{0, 0, EntityId{2}}};
  CHECK(rank(favour_other, test, known, candidates)[0].rank == 1.0);
  CHECK(rank(favour_other, test, known, candidates)[0].candidates == 4);
  CHECK(rank(favour_other, test, known, candidates, {Side::tail, TieMode::mean, false})[0].rank == 2.0);
}

TEST_CASE("rank agrees with exhaustive enumeration on toy graphs") {
  SeededRandom rng(31);
  for (int instance = 0; instance < 50; ++instance) {
    const auto entities = static_cast<std::size_t>(rng.uniform_int(3, 6));
    const auto relations = static_cast<std::size_t>(rng.uniform_int(1, 3));
    const auto scorer = rng.bernoulli(0.5) ? Scorer::translation : Scorer::bilinear;
    EmbeddingModel model(scorer, 2, entities, relations);
    // Coarse grid values force ties.
    for (auto& v : model.entity_data()) v = static_cast<double>(rng.uniform_int(-2, 2));
    for (auto& v : model.relation_data()) v = static_cast<double>(rng.uniform_int(-1, 1));

    std::set<Triple> all;
    const auto count = rng.uniform_int(2, 8);
    while (static_cast<std::int64_t>(all.size()) < count) {
      all.insert({rng.uniform_index(entities), rng.uniform_index(relations),
                  EntityId{rng.uniform_index(entities)}});
    }
    std::vector<Triple> train, test;
    for (const auto& t : all) (rng.bernoulli(0.3) ? test : train).push_back(t);
    if (test.empty()) test.push_back(train.back());

    std::set<std::tuple<EntityId, RelationId, EntityId>> filter;
    for (const auto& t : all) filter.insert({t.head, t.relation, t.tail_entity()});
    std::vector<EntityId> candidates(entities);
    std::iota(candidates.begin(), candidates.end(), 0);

    for (auto side : {Side::head, Side::tail}) {
      const auto ranks = rank(model, test, train, candidates, {side});
      REQUIRE(ranks.size() == test.size());
      double numerator = 0, denominator = 0;
      std::size_t hits = 0;
      for (std::size_t i = 0; i < test.size(); ++i) {
        std::size_t survivors = 0;
        const double expected = brute_force_rank(model, test[i], filter, entities, side, &survivors);
        CHECK(ranks[i].rank == doctest::Approx(expected));
        CHECK(ranks[i].candidates == survivors);
        CHECK(ranks[i].rank >= 1.0);
        CHECK(ranks[i].rank <= static_cast<double>(ranks[i].candidates));
        numerator += expected - 1;
        denominator += static_cast<double>(survivors) - 1;
        hits += expected <= 2.0;
      }
      CHECK(hits_at_k(ranks, 2) == doctest::Approx(double(hits) / test.size()));
      const bool degenerate = std::any_of(ranks.begin(), ranks.end(),
                                          [](const RankResult& r) { return r.candidates < 2; });
      if (degenerate) {
        CHECK_THROWS_AS(amri(ranks), DegenerateCandidateSetError);
      } else {
        CHECK(amri(ranks) == doctest::Approx(std::clamp(1 - 2 * numerator / denominator, -1.0, 1.0)));
      }
    }
  }
}

TEST_CASE("random scores give AMRI near zero") {
  std::vector<Triple> test;
  for (EntityId h = 0; h < 40; ++h) test.push_back({h, 0, EntityId{(h * 7 + 3) % 40}});
  std::vector<EntityId> candidates(40);
  std::iota(candidates.begin(), candidates.end(), 0);
  double total = 0;
  for (std::uint64_t run = 0; run < 30; ++run) {
    const auto ranks = rank(random_scorer(run), test, {}, candidates);
    total += amri(ranks);
  }
  CHECK(std::abs(total / 30) < 0.15);
  CHECK(random_scorer(3)(1, 2, 3) == random_scorer(3)(1, 2, 3));
  CHECK(random_scorer(3)(1, 2, 3) != random_scorer(4)(1, 2, 3));
}

TEST_CASE("sub-graph aggregation") {
  const std::vector<Rule> rules{{0, 0, {0, 10}, -1.5}, {1, 0, {0, 10}, 2.0}, {1, 1, {0, 10}, 0.5}};
  const auto kg = build_kg(rules, Representation::ch_e);
  EmbeddingModel model(Scorer::translation, 2, kg.entity_count(), kg.relation_registry_size());
  for (EntityId e = 0; e < kg.entity_count(); ++e) {
    model.entity(e)[0] = static_cast<double>(e + 1);
    model.entity(e)[1] = 1.0;
  }
  const auto q0 = *kg.find_entity(vocab::entity_iri("q_0"));
  const auto q1 = *kg.find_entity(vocab::entity_iri("q_1"));
  const auto p0 = *kg.find_entity(vocab::entity_iri("p_0"));
  EntityId adj = 0;
  for (const auto& t : kg.structural_triples()) {
    if (t.head == q0) adj = t.tail_entity();
  }
  MatchesConfig with_head;
  const auto h = aggregate_subgraph(model, kg, q0, with_head);
  CHECK(h[0] == doctest::Approx(double(q0 + 1) + double(adj + 1) + double(p0 + 1)));
  CHECK(h[1] == doctest::Approx(3.0));
  MatchesConfig without_head{3, false, std::nullopt};
  const auto hbar = aggregate_subgraph(model, kg, q0, without_head);
  CHECK(hbar[0] == doctest::Approx(double(adj + 1) + double(p0 + 1)));
  // Both qualities reach the shared parameter.
  const auto other = aggregate_subgraph(model, kg, q1, without_head);
  CHECK(other[1] == doctest::Approx(4.0));  // two adjustments, two parameters
  CHECK_THROWS_AS(aggregate_subgraph(model, kg, p0, with_head), UnknownIdError);

  // Reified statements point at the quality; the first hop follows them back.
  const auto rei = build_kg(rules, Representation::rei_e);
  EmbeddingModel ones(Scorer::translation, 1, rei.entity_count(), rei.relation_registry_size());
  for (auto& v : ones.entity_data()) v = 1.0;
  const auto rq0 = *rei.find_entity(vocab::entity_iri("q_0"));
  CHECK(aggregate_subgraph(ones, rei, rq0, with_head)[0] == doctest::Approx(4.0));  // q, st, quant, p

  // Literal representation: one hop plus three literal coordinates.
  const auto lit = build_kg(rules, Representation::ch_l_eta);
  EmbeddingModel lit_model(Scorer::translation, 1, lit.entity_count(), lit.relation_registry_size());
  for (auto& v : lit_model.entity_data()) v = 1.0;
  const auto lq1 = *lit.find_entity(vocab::entity_iri("q_1"));
  const auto lv = aggregate_subgraph(lit_model, lit, lq1, with_head);
  REQUIRE(lv.size() == 4);
  CHECK(lv[0] == doctest::Approx(3.0));
  CHECK(lv[1] == doctest::Approx(2.5));
  CHECK(lv[2] == doctest::Approx(0.0));
  CHECK(lv[3] == doctest::Approx(20.0));

  // An isolated quality contributes only itself.
  KnowledgeGraph lonely(Representation::ch_e);
  const auto solo = lonely.add_entity(vocab::entity_iri("q_9"));
  EmbeddingModel solo_model(Scorer::translation, 2, 1, 0);
  solo_model.entity(0)[0] = 4;
  CHECK(aggregate_subgraph(solo_model, lonely, solo, with_head) == std::vector<double>{4, 0});
  CHECK(aggregate_subgraph(solo_model, lonely, solo, without_head) == std::vector<double>{0, 0});
}

namespace {

// Membership in a top-k list: x is selected when fewer than k others
// precede it in (key, index) order.
std::set<std::size_t> top_k_by_count(const std::map<std::size_t, double>& key, std::size_t k) {
  std::set<std::size_t> out;
  for (const auto& [x, kx] : key) {
    std::size_t ahead = 0;
    for (const auto& [y, ky] : key) ahead += y != x && (ky < kx || (ky == kx && y < x));
    if (ahead < k) out.insert(x);
  }
  return out;
}

}  // namespace

TEST_CASE("matches@k against exhaustive pairwise enumeration") {
  SeededRandom rng(41);
  for (int instance = 0; instance < 50; ++instance) {
    const auto qualities = static_cast<std::size_t>(rng.uniform_int(4, 6));
    const auto k = static_cast<std::size_t>(rng.uniform_int(1, static_cast<std::int64_t>(qualities) - 1));
    std::map<std::size_t, std::set<std::size_t>> params;
    std::map<std::size_t, std::vector<double>> vectors;
    for (std::size_t q = 0; q < qualities; ++q) {
      for (std::size_t p = 0; p < 5; ++p) {
        if (rng.bernoulli(0.4)) params[q].insert(p);
      }
      params[q];
      vectors[q] = {static_cast<double>(rng.uniform_int(0, 3)), static_cast<double>(rng.uniform_int(0, 3))};
    }
    double expected = 0;
    for (std::size_t q = 0; q < qualities; ++q) {
      std::map<std::size_t, double> graph_key, distance_key;
      for (std::size_t o = 0; o < qualities; ++o) {
        if (o == q) continue;
        std::size_t shared = 0;
        for (auto p : params[q]) shared += params[o].count(p);
        graph_key[o] = -static_cast<double>(shared);
        distance_key[o] = std::hypot(vectors[q][0] - vectors[o][0], vectors[q][1] - vectors[o][1]);
      }
      const auto a = top_k_by_count(graph_key, k);
      const auto b = top_k_by_count(distance_key, k);
      std::size_t overlap = 0;
      for (auto x : a) overlap += b.count(x);
      expected += static_cast<double>(overlap) / k;
    }
    expected /= qualities;
    const double actual = matches_at_k(params, vectors, k);
    CHECK(actual == doctest::Approx(expected));
    CHECK(actual >= 0.0);
    CHECK(actual <= 1.0);
    CHECK(matches_at_k(params, vectors, qualities - 1) == doctest::Approx(1.0));
  }
  std::map<std::size_t, std::set<std::size_t>> two{{0, {}}, {1, {}}};
  std::map<std::size_t, std::vector<double>> vecs{{0, {0.0}}, {1, {1.0}}};
  CHECK_THROWS_AS(matches_at_k(two, vecs, 2), InsufficientQualitiesError);
}

TEST_CASE("matches@k is perfect when embedding order equals graph order") {
  // Quality q shares parameters with its ring neighbours only; vectors on a line.
  std::map<std::size_t, std::set<std::size_t>> params{
      {0, {0, 1}}, {1, {1, 2}}, {2, {2, 3}}, {3, {3, 4}}};
  std::map<std::size_t, std::vector<double>> vectors{{0, {0.0}}, {1, {1.0}}, {2, {2.0}}, {3, {3.0}}};
  CHECK(matches_at_k(params, vectors, 1) == doctest::Approx(1.0));
}
