#include "laat/engine.hpp"

#include <algorithm>
#include <atomic>
#include <cassert>
#include <cmath>
#include <limits>
#include <numeric>
#include <thread>

#include "laat/error.hpp"
#include "laat/kernels.hpp"
#include "laat/rng.hpp"

namespace laat {

namespace {

constexpr std::uint64_t kPlacementSalt = 0x706c6163656d656eULL;

// Static part of the jump preference (everything except the pheromone term)
// plus the pheromone weight. Precomputed once per run; per-jump work reduces
// to a gather, an axpby and one softmax.
struct EngineContext {
  const NeighborhoodIndex* index = nullptr;
  double pher_weight = 0.0;  // kappa_1
  double beta = 0.0;
  std::vector<double> static_pref;  // per edge
  std::size_t max_degree = 0;
};

struct WalkBuffers {
  std::vector<double> gathered;
  std::vector<double> v;
  std::vector<std::uint32_t> counts;   // dense per-point visit counts
  std::vector<std::uint32_t> touched;  // support of `counts`

  void prepare(const EngineContext& ctx) {
    gathered.resize(ctx.max_degree);
    v.resize(ctx.max_degree);
    counts.assign(ctx.index->n, 0);
    touched.clear();
  }
  void reset_counts() {
    for (const std::uint32_t j : touched) counts[j] = 0;
    touched.clear();
  }
};

void check_config(const LaatConfig& cfg) {
  const auto errors = cfg.validate();
  if (!errors.empty()) {
    std::string msg = "invalid config:";
    for (const auto& e : errors) msg += "\n  " + e;
    throw_error(ErrorKind::argument, msg);
  }
}

EngineContext make_context(const NeighborhoodIndex& index,
                           const PointCloud& cloud, const LaatConfig& cfg) {
  EngineContext ctx;
  ctx.index = &index;
  ctx.beta = cfg.beta;
  const std::size_t edges = index.nbr.size();

  double kappa1 = 1.0 - cfg.kappa;
  double kappa2 = cfg.kappa;
  if (!cfg.rewards.empty()) {
    if (cfg.pheromone_weight >= 0.0) kappa1 = cfg.pheromone_weight;
    if (cfg.alignment_weight >= 0.0) kappa2 = cfg.alignment_weight;
  }
  ctx.pher_weight = kappa1;

  ctx.static_pref.resize(edges);
  for (std::size_t e = 0; e < edges; ++e) {
    ctx.static_pref[e] = kappa2 * index.pref[e];
  }

  for (const RewardTerm& term : cfg.rewards) {
    if (term.weight == 0.0) continue;
    const std::vector<double>* channel = cloud.attribute(term.attribute);
    if (channel == nullptr) {
      throw_error(ErrorKind::argument,
                  "reward attribute '" + term.attribute + "' not in cloud");
    }
    const double w = term.sign * term.weight;
    const std::vector<double>& a = *channel;
    for (std::size_t i = 0; i < index.n; ++i) {
      if (!index.active[i]) continue;
      const std::size_t begin = index.row_offset[i];
      const std::size_t end = index.row_offset[i + 1];
      double den = 0.0;
      for (std::size_t e = begin; e < end; ++e) {
        den += std::abs(a[index.nbr[e]] - a[i]);
      }
      if (den == 0.0) continue;  // constant channel: no directional signal
      for (std::size_t e = begin; e < end; ++e) {
        ctx.static_pref[e] += w * (a[index.nbr[e]] - a[i]) / den;
      }
    }
  }

  for (std::size_t i = 0; i < index.n; ++i) {
    ctx.max_degree = std::max(ctx.max_degree, index.degree(i));
  }
  return ctx;
}

// Unnormalized jump weights of point i into v; returns their sum.
double fill_jump_row(const EngineContext& ctx, const double* pheromone,
                     std::uint32_t i, double* gathered, double* v) {
  const NeighborhoodIndex& index = *ctx.index;
  const auto& kn = kernels::ops();
  const std::size_t begin = index.row_offset[i];
  const std::size_t m = index.row_offset[i + 1] - begin;
  assert(m > 0 && "degeneracy filter guarantees neighbors");

  const std::uint32_t* ids = index.nbr.data() + begin;
  for (std::size_t k = 0; k < m; ++k) gathered[k] = pheromone[ids[k]];
  const double pher_total = kn.sum(gathered, m);
  assert(pher_total > 0.0 && "pheromone starts at 1 and only decays");

  kn.axpby(ctx.pher_weight / pher_total, gathered, 1.0,
           ctx.static_pref.data() + begin, m, v);
  return kn.exp_shift_sum(v, m, ctx.beta);
}

std::uint32_t sample_jump(const EngineContext& ctx, const double* pheromone,
                          std::uint32_t i, WalkBuffers& buf,
                          std::mt19937_64& rng) {
  const NeighborhoodIndex& index = *ctx.index;
  const std::size_t begin = index.row_offset[i];
  const std::size_t m = index.row_offset[i + 1] - begin;
  const double total =
      fill_jump_row(ctx, pheromone, i, buf.gathered.data(), buf.v.data());
  const double u = next_uniform(rng) * total;
  double acc = 0.0;
  std::size_t pick = m - 1;
  for (std::size_t k = 0; k < m; ++k) {
    acc += buf.v[k];
    if (acc > u) {
      pick = k;
      break;
    }
  }
  return index.nbr[begin + pick];
}

void walk_into(const EngineContext& ctx, const double* pheromone,
               std::uint32_t start, int steps, WalkBuffers& buf,
               std::mt19937_64& rng) {
  std::uint32_t current = start;
  for (int s = 0; s < steps; ++s) {
    current = sample_jump(ctx, pheromone, current, buf, rng);
    if (buf.counts[current]++ == 0) buf.touched.push_back(current);
  }
}

std::vector<std::uint32_t> eligible_starts(const NeighborhoodIndex& index) {
  std::vector<std::uint32_t> out;
  for (std::size_t i = 0; i < index.n; ++i) {
    if (index.active[i] && index.degree(i) >= index.size_median) {
      out.push_back(static_cast<std::uint32_t>(i));
    }
  }
  return out;
}

// Balanced factorization of `count` into one factor per dimension.
std::vector<std::int64_t> subcube_grid(int count, std::size_t dims) {
  std::vector<std::int64_t> factors(dims, 1);
  std::int64_t remaining = count;
  for (std::size_t d = 0; d < dims; ++d) {
    const double target =
        std::pow(static_cast<double>(remaining),
                 1.0 / static_cast<double>(dims - d));
    std::int64_t best = 1;
    for (std::int64_t f = 1; f <= remaining; ++f) {
      if (remaining % f != 0) continue;
      if (std::abs(static_cast<double>(f) - target) <
          std::abs(static_cast<double>(best) - target)) {
        best = f;
      }
    }
    factors[d] = best;
    remaining /= best;
  }
  factors[dims - 1] *= remaining;  // only when count was not fully factored
  return factors;
}

}  // namespace

std::vector<std::string> LaatConfig::validate() const {
  std::vector<std::string> errors;
  if (epochs < 1) errors.push_back("epochs: must be >= 1");
  if (ants < 1) errors.push_back("ants: must be >= 1");
  if (steps < 1) errors.push_back("steps: must be >= 1");
  if (!(radius > 0.0)) errors.push_back("radius: must be > 0");
  if (!(deposit > 0.0)) errors.push_back("deposit: must be > 0");
  if (!(evaporation > 0.0 && evaporation < 1.0)) {
    errors.push_back("evaporation: must be in (0,1)");
  }
  if (!(beta > 0.0)) errors.push_back("beta: must be > 0");
  if (!(kappa >= 0.0 && kappa <= 1.0)) errors.push_back("kappa: must be in [0,1]");
  if (placement == Placement::subcube_stratified && subcubes < 1) {
    errors.push_back("subcubes: must be >= 1");
  }
  for (const RewardTerm& term : rewards) {
    if (term.attribute.empty()) errors.push_back("reward: empty attribute name");
    if (!(term.weight >= 0.0)) {
      errors.push_back("reward '" + term.attribute + "': weight must be >= 0");
    }
    if (term.sign != 1.0 && term.sign != -1.0) {
      errors.push_back("reward '" + term.attribute + "': sign must be +1 or -1");
    }
  }
  return errors;
}

std::vector<double> jump_probabilities(const NeighborhoodIndex& index,
                                       const PheromoneField& field,
                                       const LaatConfig& cfg, std::uint32_t i) {
  if (i >= index.n || !index.active[i] || index.degree(i) == 0) {
    throw_error(ErrorKind::argument,
                "jump probabilities need an active point with neighbors");
  }
  // plain two-term preference; reward terms are exercised through run_laat
  EngineContext ctx;
  ctx.index = &index;
  ctx.pher_weight = 1.0 - cfg.kappa;
  ctx.beta = cfg.beta;
  ctx.static_pref.resize(index.nbr.size());
  const std::size_t begin = index.row_offset[i];
  const std::size_t m = index.degree(i);
  for (std::size_t e = begin; e < begin + m; ++e) {
    ctx.static_pref[e] = cfg.kappa * index.pref[e];
  }

  std::vector<double> gathered(m);
  std::vector<double> v(m);
  const double total =
      fill_jump_row(ctx, field.values.data(), i, gathered.data(), v.data());
  for (double& p : v) p /= total;
  return v;
}

std::vector<std::uint32_t> select_start_points(const NeighborhoodIndex& index,
                                               const LaatConfig& cfg,
                                               std::mt19937_64& rng) {
  const std::vector<std::uint32_t> eligible = eligible_starts(index);
  if (eligible.empty()) {
    throw_error(ErrorKind::data, "placement: no eligible start points");
  }

  std::vector<std::uint32_t> starts;
  if (cfg.placement == Placement::median_filtered_random) {
    starts.reserve(static_cast<std::size_t>(cfg.ants));
    for (int a = 0; a < cfg.ants; ++a) {
      starts.push_back(eligible[next_below(rng, eligible.size())]);
    }
    return starts;
  }

  // subcube-stratified: split the bounding box, one ant per nonempty cube
  const std::size_t dims = index.dims;
  const auto grid = subcube_grid(cfg.subcubes, dims);
  std::vector<double> mins(dims, std::numeric_limits<double>::infinity());
  std::vector<double> maxs(dims, -std::numeric_limits<double>::infinity());
  for (std::size_t i = 0; i < index.n; ++i) {
    for (std::size_t d = 0; d < dims; ++d) {
      mins[d] = std::min(mins[d], index.coords[i * dims + d]);
      maxs[d] = std::max(maxs[d], index.coords[i * dims + d]);
    }
  }
  std::int64_t total_cubes = 1;
  for (std::size_t d = 0; d < dims; ++d) total_cubes *= grid[d];

  std::vector<std::vector<std::uint32_t>> members(
      static_cast<std::size_t>(total_cubes));
  for (const std::uint32_t id : eligible) {
    std::int64_t cube = 0;
    std::int64_t stride = 1;
    for (std::size_t d = 0; d < dims; ++d) {
      const double extent = maxs[d] - mins[d];
      std::int64_t idx = 0;
      if (extent > 0.0) {
        idx = static_cast<std::int64_t>(
            std::floor((index.coords[std::size_t{id} * dims + d] - mins[d]) /
                       extent * static_cast<double>(grid[d])));
        idx = std::clamp<std::int64_t>(idx, 0, grid[d] - 1);
      }
      cube += idx * stride;
      stride *= grid[d];
    }
    members[static_cast<std::size_t>(cube)].push_back(id);
  }
  for (const auto& cube : members) {
    if (!cube.empty()) starts.push_back(cube[next_below(rng, cube.size())]);
  }
  return starts;
}

AntRoute walk_ant(const NeighborhoodIndex& index, const PheromoneField& field,
                  const LaatConfig& cfg, std::uint32_t start,
                  std::mt19937_64& rng) {
  if (start >= index.n || !index.active[start]) {
    throw_error(ErrorKind::argument, "walk must start on an active point");
  }
  // standalone use; run_laat drives walk_into with persistent buffers
  PointCloud empty_cloud;
  empty_cloud.n = index.n;
  empty_cloud.dims = index.dims;
  LaatConfig plain = cfg;
  plain.rewards.clear();
  EngineContext ctx = make_context(index, empty_cloud, plain);
  WalkBuffers buf;
  buf.prepare(ctx);
  walk_into(ctx, field.values.data(), start, cfg.steps, buf, rng);

  AntRoute route;
  route.start = start;
  route.visits.reserve(buf.touched.size());
  for (const std::uint32_t j : buf.touched) {
    route.visits.emplace_back(j, buf.counts[j]);
  }
  return route;
}

void deposit_pheromone(PheromoneField& field, const AntRoute& route,
                       const LaatConfig& cfg) {
  for (const auto& [id, count] : route.visits) {
    field.values[id] += static_cast<double>(count) * cfg.deposit;
  }
}

void evaporate(PheromoneField& field, const LaatConfig& cfg) {
  kernels::ops().scale(field.values.data(), field.values.size(),
                       1.0 - cfg.evaporation);
}

namespace {

PheromoneField run_impl(const NeighborhoodIndex& index, const PointCloud& cloud,
                        const LaatConfig& cfg, const RunOptions& opts) {
  check_config(cfg);
  if (index.n != cloud.n) {
    throw_error(ErrorKind::argument, "index and cloud sizes differ");
  }
  const EngineContext ctx = make_context(index, cloud, cfg);

  PheromoneField field;
  field.values.assign(index.n, 1.0);

  const bool batched = opts.mode == WalkMode::epoch_batched;
  const int threads = std::max(1, opts.threads);

  WalkBuffers sequential_buf;
  if (!batched) sequential_buf.prepare(ctx);

  for (int epoch = 0; epoch < cfg.epochs; ++epoch) {
    auto placement_rng = make_stream(cfg.seed, static_cast<std::uint64_t>(epoch),
                                     kPlacementSalt);
    const std::vector<std::uint32_t> starts =
        select_start_points(index, cfg, placement_rng);
    field.epoch_ant_counts.push_back(static_cast<int>(starts.size()));

    if (!batched) {
      for (std::size_t a = 0; a < starts.size(); ++a) {
        auto rng = make_stream(cfg.seed, static_cast<std::uint64_t>(epoch), a);
        walk_into(ctx, field.values.data(), starts[a], cfg.steps,
                  sequential_buf, rng);
        for (const std::uint32_t j : sequential_buf.touched) {
          field.values[j] +=
              static_cast<double>(sequential_buf.counts[j]) * cfg.deposit;
        }
        sequential_buf.reset_counts();
      }
    } else {
      // ants of one epoch read the frozen epoch-start field; integer visit
      // counts merge associatively, so the result is thread-count invariant
      const int workers =
          static_cast<int>(std::min<std::size_t>(starts.size(),
                                                 static_cast<std::size_t>(threads)));
      std::vector<std::vector<std::uint32_t>> partial(
          static_cast<std::size_t>(workers));
      std::atomic<std::size_t> next_ant{0};
      auto worker_fn = [&](int w) {
        WalkBuffers buf;
        buf.prepare(ctx);
        for (;;) {
          const std::size_t a = next_ant.fetch_add(1);
          if (a >= starts.size()) break;
          auto rng = make_stream(cfg.seed, static_cast<std::uint64_t>(epoch), a);
          walk_into(ctx, field.values.data(), starts[a], cfg.steps, buf, rng);
        }
        partial[static_cast<std::size_t>(w)] = std::move(buf.counts);
      };
      if (workers <= 1) {
        worker_fn(0);
      } else {
        std::vector<std::thread> pool;
        for (int w = 0; w < workers; ++w) pool.emplace_back(worker_fn, w);
        for (auto& t : pool) t.join();
      }
      for (std::size_t j = 0; j < index.n; ++j) {
        std::uint64_t total = 0;
        for (const auto& p : partial) total += p[j];
        if (total > 0) {
          field.values[j] += static_cast<double>(total) * cfg.deposit;
        }
      }
    }

    evaporate(field, cfg);
    if (opts.snapshots) field.epoch_history.push_back(field.values);
  }
  return field;
}

}  // namespace

PheromoneField run_laat(const NeighborhoodIndex& index, const PointCloud& cloud,
                        const LaatConfig& cfg, const RunOptions& opts) {
  return run_impl(index, cloud, cfg, opts);
}

PheromoneField run_laat(const PointCloud& cloud, const LaatConfig& cfg,
                        const RunOptions& opts) {
  const NeighborhoodIndex index = build_index(cloud, cfg.radius, opts.threads);
  return run_impl(index, cloud, cfg, opts);
}

PheromoneField run_laat_multi_reward(const PointCloud& cloud, LaatConfig cfg,
                                     const std::vector<RewardTerm>& rewards,
                                     const RunOptions& opts) {
  cfg.rewards = rewards;
  return run_laat(cloud, cfg, opts);
}

}  // namespace laat
