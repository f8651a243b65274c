#include "m6/evolution.h"

#include <algorithm>
#include <cassert>
#include <cmath>
#include <stdexcept>
#include <thread>

namespace m6 {

void FitnessSpec::validate() const {
  bool any_weight = harmony_weight > 0.0;
  for (const auto& target : targets) {
    if (target.weight < 0.0) throw std::invalid_argument("negative feature weight");
    if (target.weight > 0.0) {
      any_weight = true;
      if (target.sigma < 0.01) throw std::invalid_argument("sigma below 0.01");
      if (target.mu < 0.0 || target.mu > 1.0) throw std::invalid_argument("mu outside [0, 1]");
    }
  }
  if (!any_weight) throw std::invalid_argument("all weights are zero");
}

// ---------------------------------------------------------------------------
// Harmony score
// ---------------------------------------------------------------------------

namespace {

// Interval class -> score. Consonances are rewarded, perfect fourth/fifth most,
// seconds/sevenths and the tritone penalized hard; rests soften the judgment.
constexpr double kIntervalScore[12] = {
    8,    // 0 unison/octave
    -20,  // 1
    -20,  // 2
    8,    // 3
    8,    // 4
    15,   // 5
    -30,  // 6
    15,   // 7
    8,    // 8
    8,    // 9
    -20,  // 10
    -20,  // 11
};
constexpr double kRestInOneScore = 10;
constexpr double kRestInBothScore = 0;

// Per-step effective pitch: extensions resolve to the value they prolong,
// rests to kRestCode.
std::vector<int> effective_pitches(const NoteSeq& seq) {
  std::vector<int> out(static_cast<size_t>(seq.length()), kRestCode);
  int current = kRestCode;
  for (int i = 0; i < seq.length(); ++i) {
    const int code = seq.codes[static_cast<size_t>(i)];
    if (code != kExtendCode) current = code;
    out[static_cast<size_t>(i)] = current;
  }
  return out;
}

}  // namespace

double harmony_score(const NoteSeq& a, const NoteSeq& b) {
  if (a.length() != b.length()) {
    throw std::invalid_argument("harmony_score: length mismatch");
  }
  const std::vector<int> pa = effective_pitches(a);
  const std::vector<int> pb = effective_pitches(b);
  double sum = 0.0;
  for (size_t i = 0; i < pa.size(); ++i) {
    const bool rest_a = pa[i] < 0;
    const bool rest_b = pb[i] < 0;
    if (rest_a && rest_b) {
      sum += kRestInBothScore;
    } else if (rest_a || rest_b) {
      sum += kRestInOneScore;
    } else {
      sum += kIntervalScore[std::abs(pa[i] - pb[i]) % 12];
    }
  }
  return std::tanh(sum / static_cast<double>(pa.size()) / 10.0);
}

// ---------------------------------------------------------------------------
// Fitness
// ---------------------------------------------------------------------------

double fitness_from_features(const FeatureVector& features, const FitnessSpec& spec) {
  double sum = 0.0;
  for (int i = 0; i < kFeatureCount; ++i) {
    const auto& target = spec.targets[static_cast<size_t>(i)];
    if (target.weight <= 0.0) continue;
    const double d = features[static_cast<size_t>(i)] - target.mu;
    sum += target.weight * std::exp(-(d * d) / (2.0 * target.sigma * target.sigma));
  }
  return sum;
}

double fitness(const NoteSeq& seq, const FitnessSpec& spec, const HarmonicContext& ctx,
               const std::vector<NoteSeq>& refs) {
  double total = fitness_from_features(extract_features(seq, ctx), spec);
  if (spec.harmony_weight > 0.0 && !refs.empty()) {
    double mean = 0.0;
    for (const auto& ref : refs) mean += harmony_score(seq, ref);
    mean /= static_cast<double>(refs.size());
    total += spec.harmony_weight * (mean + 1.0) / 2.0;
  }
  return total;
}

// ---------------------------------------------------------------------------
// Evolution loop
// ---------------------------------------------------------------------------

NoteSeq random_individual(const GaConfig& cfg, const Scale& scale, int measures,
                          int steps_per_measure, Rng& rng) {
  // Candidate pitches: scale members inside the configured band.
  std::vector<int> pool;
  for (int pitch = cfg.init_low; pitch <= cfg.init_high; ++pitch) {
    if (scale.contains_pitch(pitch)) pool.push_back(pitch);
  }
  if (pool.empty()) pool.push_back(std::clamp((cfg.init_low + cfg.init_high) / 2, 0, 127));

  NoteSeq seq;
  seq.steps_per_measure = steps_per_measure;
  seq.measures = measures;
  const int len = steps_per_measure * measures;
  seq.codes.reserve(static_cast<size_t>(len));
  for (int i = 0; i < len; ++i) {
    const double roll = rng.uniform_double();
    if (roll < cfg.init_rest_prob) {
      seq.codes.push_back(kRestCode);
    } else if (roll < cfg.init_rest_prob + cfg.init_extend_prob && i > 0) {
      seq.codes.push_back(kExtendCode);
    } else {
      seq.codes.push_back(pool[static_cast<size_t>(rng.pick_index(static_cast<int>(pool.size())))]);
    }
  }
  assert(seq.valid());
  return seq;
}

namespace {

void evaluate_population(const std::vector<NoteSeq>& population, const FitnessSpec& spec,
                         const HarmonicContext& ctx, const std::vector<NoteSeq>& refs,
                         int threads, std::vector<double>& out) {
  out.resize(population.size());
  auto eval_range = [&](size_t begin, size_t end) {
    for (size_t i = begin; i < end; ++i) out[i] = fitness(population[i], spec, ctx, refs);
  };
  if (threads <= 1 || population.size() < 32) {
    eval_range(0, population.size());
    return;
  }
  // fitness() is pure, so splitting the population across workers cannot
  // change any value.
  const size_t worker_count = std::min<size_t>(static_cast<size_t>(threads), population.size());
  std::vector<std::thread> workers;
  const size_t chunk = (population.size() + worker_count - 1) / worker_count;
  for (size_t w = 0; w < worker_count; ++w) {
    const size_t begin = w * chunk;
    const size_t end = std::min(begin + chunk, population.size());
    if (begin >= end) break;
    workers.emplace_back(eval_range, begin, end);
  }
  for (auto& worker : workers) worker.join();
}

int tournament_pick(const std::vector<double>& scores, int tournament_size, Rng& rng) {
  int best = rng.pick_index(static_cast<int>(scores.size()));
  for (int k = 1; k < tournament_size; ++k) {
    const int contender = rng.pick_index(static_cast<int>(scores.size()));
    if (scores[static_cast<size_t>(contender)] > scores[static_cast<size_t>(best)]) {
      best = contender;
    }
  }
  return best;
}

}  // namespace

NoteSeq evolve(const FitnessSpec& spec, const GaConfig& cfg, const HarmonicContext& ctx,
               const std::vector<NoteSeq>& refs, int measures, int steps_per_measure,
               EvolveStats* stats) {
  spec.validate();
  assert(ctx.steps() == measures * steps_per_measure);
  Rng rng(cfg.rng_seed);

  std::vector<NoteSeq> population;
  population.reserve(static_cast<size_t>(cfg.population_size));
  for (int i = 0; i < cfg.population_size; ++i) {
    population.push_back(random_individual(cfg, ctx.scale, measures, steps_per_measure, rng));
  }

  std::vector<double> scores;
  evaluate_population(population, spec, ctx, refs, cfg.threads, scores);

  auto best_index = [&scores]() {
    return static_cast<size_t>(
        std::max_element(scores.begin(), scores.end()) - scores.begin());
  };

  NoteSeq best = population[best_index()];
  double best_score = scores[best_index()];
  if (stats) stats->best_per_generation.assign(1, best_score);

  std::vector<size_t> order(population.size());
  for (int gen = 0; gen < cfg.generations; ++gen) {
    // Rank for elitism (stable so ties keep population order).
    for (size_t i = 0; i < order.size(); ++i) order[i] = i;
    std::stable_sort(order.begin(), order.end(),
                     [&scores](size_t a, size_t b) { return scores[a] > scores[b]; });

    std::vector<NoteSeq> next;
    next.reserve(population.size());
    const int elites = std::min(cfg.elitism_count, cfg.population_size);
    for (int e = 0; e < elites; ++e) next.push_back(population[order[static_cast<size_t>(e)]]);

    while (static_cast<int>(next.size()) < cfg.population_size) {
      const int p1 = tournament_pick(scores, cfg.tournament_size, rng);
      const int p2 = tournament_pick(scores, cfg.tournament_size, rng);
      NoteSeq c1 = population[static_cast<size_t>(p1)];
      NoteSeq c2 = population[static_cast<size_t>(p2)];
      if (rng.bernoulli(cfg.crossover_rate)) {
        std::tie(c1, c2) = crossover(c1, c2, rng);
      }
      for (NoteSeq* child : {&c1, &c2}) {
        if (rng.bernoulli(cfg.mutation_rate)) {
          const auto kind = static_cast<MutationKind>(rng.uniform_int(0, kMutationKindCount - 1));
          *child = apply_mutation(kind, *child, rng);
        }
      }
      next.push_back(std::move(c1));
      if (static_cast<int>(next.size()) < cfg.population_size) next.push_back(std::move(c2));
    }

    population = std::move(next);
    evaluate_population(population, spec, ctx, refs, cfg.threads, scores);

    const size_t top = best_index();
    if (scores[top] > best_score) {
      best_score = scores[top];
      best = population[top];
    }
    if (stats) stats->best_per_generation.push_back(best_score);
  }
  return best;
}

}  // namespace m6
