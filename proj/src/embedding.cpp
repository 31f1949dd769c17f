#include "pdpk/embedding.hpp"

#include <algorithm>
#include <cmath>

#include "pdpk/errors.hpp"

namespace pdpk {

std::string_view to_string(Scorer scorer) {
  return scorer == Scorer::translation ? "translation" : "bilinear";
}

std::optional<Scorer> parse_scorer(std::string_view text) {
  if (text == "translation" || text == "transe") return Scorer::translation;
  if (text == "bilinear" || text == "distmult") return Scorer::bilinear;
  return std::nullopt;
}

EmbeddingModel::EmbeddingModel(Scorer scorer, std::size_t dim, std::size_t entity_count,
                               std::size_t relation_count)
    : scorer_(scorer),
      dim_(dim),
      entities_(entity_count * dim, 0.0),
      relations_(relation_count * dim, 0.0) {
  if (dim == 0) throw DomainError("embedding dimension must be positive");
}

std::span<double> EmbeddingModel::entity(EntityId id) {
  if (id >= entity_count()) throw UnknownIdError("unknown entity " + std::to_string(id));
  return {entities_.data() + id * dim_, dim_};
}
std::span<const double> EmbeddingModel::entity(EntityId id) const {
  if (id >= entity_count()) throw UnknownIdError("unknown entity " + std::to_string(id));
  return {entities_.data() + id * dim_, dim_};
}
std::span<double> EmbeddingModel::relation(RelationId id) {
  if (id >= relation_count()) throw UnknownIdError("unknown relation " + std::to_string(id));
  return {relations_.data() + id * dim_, dim_};
}
std::span<const double> EmbeddingModel::relation(RelationId id) const {
  if (id >= relation_count()) throw UnknownIdError("unknown relation " + std::to_string(id));
  return {relations_.data() + id * dim_, dim_};
}

double EmbeddingModel::score(EntityId head, RelationId relation_id, EntityId tail) const {
  const auto h = entity(head);
  const auto r = relation(relation_id);
  const auto t = entity(tail);
  double total = 0.0;
  if (scorer_ == Scorer::translation) {
    for (std::size_t d = 0; d < dim_; ++d) {
      const double diff = h[d] + r[d] - t[d];
      total += diff * diff;
    }
    return -std::sqrt(total);
  }
  for (std::size_t d = 0; d < dim_; ++d) total += h[d] * r[d] * t[d];
  return total;
}

EmbeddingModel random_model(const KnowledgeGraph& kg, Scorer scorer, std::size_t dim,
                            SeededRandom& rng) {
  EmbeddingModel model(scorer, dim, kg.entity_count(), kg.relation_registry_size());
  const double bound = 6.0 / std::sqrt(static_cast<double>(dim));
  for (auto& v : model.entity_data()) v = rng.uniform(-bound, bound);
  for (auto& v : model.relation_data()) v = rng.uniform(-bound, bound);
  return model;
}

namespace {

double softplus(double x) { return x > 0 ? x + std::log1p(std::exp(-x)) : std::log1p(std::exp(x)); }
double sigmoid(double x) {
  return x >= 0 ? 1.0 / (1.0 + std::exp(-x)) : std::exp(x) / (1.0 + std::exp(x));
}

// Decoupled-weight-decay Adam over one flat parameter block.
struct AdamW {
  double lr, decay, beta1 = 0.9, beta2 = 0.999, eps = 1e-8;
  std::vector<double> m, v;

  AdamW(std::size_t size, double lr_, double decay_) : lr(lr_), decay(decay_), m(size), v(size) {}

  void apply(std::vector<double>& params, const std::vector<double>& grad, std::size_t t) {
    const double c1 = 1.0 - std::pow(beta1, static_cast<double>(t));
    const double c2 = 1.0 - std::pow(beta2, static_cast<double>(t));
    for (std::size_t i = 0; i < params.size(); ++i) {
      params[i] -= lr * decay * params[i];
      m[i] = beta1 * m[i] + (1 - beta1) * grad[i];
      v[i] = beta2 * v[i] + (1 - beta2) * grad[i] * grad[i];
      params[i] -= lr * (m[i] / c1) / (std::sqrt(v[i] / c2) + eps);
    }
  }
};

struct Sample {
  EntityId head;
  RelationId relation;
  EntityId tail;
};

// Adds d(loss)/d(params) of `weight * score(sample)` to the gradients.
void accumulate_score_gradient(const EmbeddingModel& model, const Sample& s, double weight,
                               std::vector<double>& entity_grad,
                               std::vector<double>& relation_grad) {
  const auto dim = model.dim();
  const auto h = model.entity(s.head);
  const auto r = model.relation(s.relation);
  const auto t = model.entity(s.tail);
  double* gh = entity_grad.data() + s.head * dim;
  double* gt = entity_grad.data() + s.tail * dim;
  double* gr = relation_grad.data() + s.relation * dim;
  if (model.scorer() == Scorer::translation) {
    double norm = 0.0;
    for (std::size_t d = 0; d < dim; ++d) norm += (h[d] + r[d] - t[d]) * (h[d] + r[d] - t[d]);
    norm = std::sqrt(norm);
    if (norm < 1e-12) return;
    // score = -norm
    for (std::size_t d = 0; d < dim; ++d) {
      const double g = -weight * (h[d] + r[d] - t[d]) / norm;
      gh[d] += g;
      gr[d] += g;
      gt[d] -= g;
    }
    return;
  }
  for (std::size_t d = 0; d < dim; ++d) {
    gh[d] += weight * r[d] * t[d];
    gr[d] += weight * h[d] * t[d];
    gt[d] += weight * h[d] * r[d];
  }
}

void normalize_rows(std::vector<double>& data, std::size_t dim) {
  for (std::size_t begin = 0; begin < data.size(); begin += dim) {
    double norm = 0.0;
    for (std::size_t d = 0; d < dim; ++d) norm += data[begin + d] * data[begin + d];
    norm = std::sqrt(norm);
    if (norm < 1e-12) continue;
    for (std::size_t d = 0; d < dim; ++d) data[begin + d] /= norm;
  }
}

bool slope_non_positive(std::span<const double> values) {
  const auto n = static_cast<double>(values.size());
  if (values.size() < 2) return true;
  double mean_x = (n - 1) / 2.0, mean_y = 0.0;
  for (double v : values) mean_y += v;
  mean_y /= n;
  double num = 0.0;
  for (std::size_t i = 0; i < values.size(); ++i) {
    num += (static_cast<double>(i) - mean_x) * (values[i] - mean_y);
  }
  return num <= 0.0;
}

}  // namespace

EmbeddingModel train(const KnowledgeGraph& kg, const TrainingOptions& options,
                     SeededRandom& rng, TrainingReport* report) {
  const auto edges = kg.structural_triples();
  if (edges.empty()) throw EmptyGraphError("no entity triples to train on");
  if (options.batch_size == 0) throw DomainError("batch size must be positive");
  const auto candidates = kg.structural_entities();

  auto init_rng = rng.substream("init");
  auto sample_rng = rng.substream("negatives");
  auto model = random_model(kg, options.scorer, options.dim, init_rng);

  std::vector<Sample> positives;
  for (const auto& t : edges) positives.push_back({t.head, t.relation, t.tail_entity()});

  AdamW entity_opt(model.entity_data().size(), options.learning_rate, options.weight_decay);
  AdamW relation_opt(model.relation_data().size(), options.learning_rate, options.weight_decay);
  std::vector<double> entity_grad(model.entity_data().size());
  std::vector<double> relation_grad(model.relation_data().size());

  TrainingReport local;
  local.training_triples = edges.size();
  local.dropped_statements = kg.triples().size() - edges.size();
  std::size_t step = 0;
  std::vector<std::size_t> order(positives.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;

  for (std::size_t epoch = 0; epoch < options.epochs; ++epoch) {
    sample_rng.shuffle(order);
    double epoch_loss = 0.0;
    for (std::size_t begin = 0; begin < order.size(); begin += options.batch_size) {
      const auto end = std::min(order.size(), begin + options.batch_size);
      const double scale = 1.0 / static_cast<double>(end - begin);
      if (options.normalize_entities) normalize_rows(model.entity_data(), model.dim());
      std::fill(entity_grad.begin(), entity_grad.end(), 0.0);
      std::fill(relation_grad.begin(), relation_grad.end(), 0.0);
      for (std::size_t b = begin; b < end; ++b) {
        const auto& pos = positives[order[b]];
        Sample neg = pos;
        const bool corrupt_head = sample_rng.bernoulli(0.5);
        const auto replacement = candidates[sample_rng.uniform_index(candidates.size())];
        (corrupt_head ? neg.head : neg.tail) = replacement;

        const double s_pos = model.score(pos.head, pos.relation, pos.tail);
        const double s_neg = model.score(neg.head, neg.relation, neg.tail);
        if (options.scorer == Scorer::translation) {
          const double loss = options.margin - s_pos + s_neg;
          if (loss > 0.0) {
            epoch_loss += loss;
            accumulate_score_gradient(model, pos, -scale, entity_grad, relation_grad);
            accumulate_score_gradient(model, neg, scale, entity_grad, relation_grad);
          }
        } else {
          epoch_loss += softplus(-s_pos) + softplus(s_neg);
          accumulate_score_gradient(model, pos, -sigmoid(-s_pos) * scale, entity_grad,
                                    relation_grad);
          accumulate_score_gradient(model, neg, sigmoid(s_neg) * scale, entity_grad,
                                    relation_grad);
        }
      }
      ++step;
      entity_opt.apply(model.entity_data(), entity_grad, step);
      relation_opt.apply(model.relation_data(), relation_grad, step);
    }
    epoch_loss /= static_cast<double>(positives.size());
    if (!std::isfinite(epoch_loss)) {
      throw TrainingDivergedError("loss became non-finite in epoch " + std::to_string(epoch));
    }
    local.loss_history.push_back(epoch_loss);
  }

  if (options.normalize_entities) normalize_rows(model.entity_data(), model.dim());

  const auto tail = std::max<std::size_t>(2, local.loss_history.size() / 10);
  const auto window = std::span<const double>(local.loss_history)
                          .last(std::min(tail, local.loss_history.size()));
  local.converged = slope_non_positive(window);
  if (report) *report = std::move(local);
  return model;
}

}  // namespace pdpk
