#include "ncstein/search.hpp"

#include <cmath>

namespace ncstein {

namespace {

constexpr int kInitialDraws = 100;
constexpr int kRejectionsBeforeDecay = 20;
constexpr double kMinStep = 1e-6;
constexpr double kImprovement = 1e-12;

bool searchable(InequalityId id) {
  switch (id) {
    case InequalityId::kSteinIsometry:
    case InequalityId::kProjections:
    case InequalityId::kSemicommutative: return false;
    default: return true;
  }
}

int items_for(const SearchConfig& cfg) {
  return cfg.inequality == InequalityId::kDoobMaximal ? 1 : cfg.seq_len;
}

struct RestartOutcome {
  std::string error;
  double best = -1.0;
  OperatorSequence best_x;
  int evaluations = 0;
  std::vector<TrajectoryPoint> trajectory;  // local evaluation indices
};

class Climber {
 public:
  Climber(const SearchConfig& cfg, const Filtration& filt)
      : cfg_(cfg), filt_(filt), adapted_(cfg.adapted_only || search_requires_adapted(cfg.inequality)) {
    opts_ = cfg.check;
    opts_.linf.parallel = false;
  }

  OperatorSequence build(const OperatorSequence& z) const {
    OperatorSequence x;
    x.reserve(z.size());
    for (const Operator& zn : z) x.push_back(hermitian_part(zn.adjoint() * zn));
    if (adapted_) {
      x = project_adapted(x, filt_, cfg_.lag);
      for (Operator& xn : x) xn = hermitian_part(xn);
    }
    return x;
  }

  std::optional<double> score(const OperatorSequence& x, std::string* why) const {
    try {
      const RatioReport r =
          evaluate_inequality(cfg_.inequality, x, filt_, cfg_.p, cfg_.q, cfg_.lag, opts_);
      if (r.ratio) return r.ratio;
      if (why) *why = "ratio undefined (rhs = 0)";
    } catch (const Rejection& e) {
      if (why) *why = e.what();
    }
    return std::nullopt;
  }

  RestartOutcome run(int k, int budget) const {
    RestartOutcome out;
    auto rng = make_rng(cfg_.seed, 1000u + static_cast<std::uint64_t>(k));
    const int len = items_for(cfg_);
    OperatorSequence z;
    std::string why;
    for (int attempt = 0; attempt < kInitialDraws; ++attempt) {
      z.clear();
      for (int n = 0; n < len; ++n) {
        Operator g = random_gaussian(cfg_.dim, rng);
        // Restart 0 starts inside the level-0 algebra.
        if (k == 0 && attempt == 0) g = filt_.expect(0, g);
        z.push_back(std::move(g));
      }
      const OperatorSequence x = build(z);
      if (auto s = score(x, &why)) {
        out.best = *s;
        out.best_x = x;
        out.evaluations = 1;
        out.trajectory.push_back({1, *s});
        break;
      }
    }
    if (out.evaluations == 0) {
      out.error = "no admissible initial sample after " + std::to_string(kInitialDraws) +
                  " draws: " + why;
      return out;
    }

    double step = cfg_.step_scale;
    int rejections = 0;
    while (out.evaluations < budget && step >= kMinStep) {
      OperatorSequence trial = z;
      for (Operator& t : trial) t += step * random_gaussian(cfg_.dim, rng);
      const OperatorSequence x = build(trial);
      const std::optional<double> s = score(x, nullptr);
      ++out.evaluations;
      if (s && *s > out.best + kImprovement * std::abs(out.best)) {
        z = std::move(trial);
        out.best = *s;
        out.best_x = x;
        out.trajectory.push_back({out.evaluations, *s});
        rejections = 0;
      } else if (++rejections >= kRejectionsBeforeDecay) {
        step *= 0.5;
        rejections = 0;
      }
    }
    return out;
  }

 private:
  const SearchConfig& cfg_;
  const Filtration& filt_;
  bool adapted_;
  CheckOptions opts_;
};

SearchResult run_search(const SearchConfig& cfg, bool parallel) {
  validate_search_config(cfg);
  const Filtration filt = search_filtration(cfg);
  const Climber climber(cfg, filt);

  std::vector<RestartOutcome> outcomes(static_cast<std::size_t>(cfg.restarts));
  const int share = cfg.budget / cfg.restarts;
  const int extra = cfg.budget % cfg.restarts;
#pragma omp parallel for schedule(dynamic) if (parallel)
  for (int k = 0; k < cfg.restarts; ++k) {
    try {
      outcomes[static_cast<std::size_t>(k)] = climber.run(k, share + (k < extra ? 1 : 0));
    } catch (const std::exception& e) {
      outcomes[static_cast<std::size_t>(k)].error = e.what();
    }
  }

  SearchResult result;
  const RestartOutcome* best = nullptr;
  double running = -1.0;
  for (const RestartOutcome& o : outcomes) {
    if (!o.error.empty()) throw Rejection("estimate_constant: " + o.error);
    for (const TrajectoryPoint& t : o.trajectory) {
      if (t.best > running) {
        running = t.best;
        result.trajectory.push_back({result.evaluations_used + t.evaluation, running});
      }
    }
    result.evaluations_used += o.evaluations;
    if (!best || o.best > best->best) best = &o;
  }

  CheckOptions opts = cfg.check;
  opts.linf.parallel = false;
  const RatioReport raw =
      evaluate_inequality(cfg.inequality, best->best_x, filt, cfg.p, cfg.q, cfg.lag, opts);
  const double rhs = raw.rhs.upper_or_value();
  result.witness = best->best_x;
  for (Operator& x : result.witness) x /= rhs;
  result.report =
      evaluate_inequality(cfg.inequality, result.witness, filt, cfg.p, cfg.q, cfg.lag, opts);
  result.best_ratio = result.report.ratio.value_or(best->best);
  return result;
}

}  // namespace

bool search_requires_adapted(InequalityId id) {
  return id == InequalityId::kQiuS12 || id == InequalityId::kCrpStein;
}

void validate_search_config(const SearchConfig& cfg) {
  if (!(cfg.restarts >= 1 && cfg.budget >= cfg.restarts)) {
    throw Rejection("budget ≥ restarts ≥ 1");
  }
  if (cfg.dim < 1 || cfg.seq_len < 1) throw Rejection("dim and seq_len must be ≥ 1");
  if (!(cfg.step_scale > 0.0)) throw Rejection("step_scale must be positive");
  if (!searchable(cfg.inequality)) {
    throw Rejection("inequality '" + to_string(cfg.inequality) + "' is not searchable");
  }
  validate_parameters(cfg.inequality, cfg.p, cfg.q, cfg.lag);
  const Filtration filt = search_filtration(cfg);
  const bool adapted = cfg.adapted_only || search_requires_adapted(cfg.inequality);
  const int need = items_for(cfg) + (adapted ? cfg.lag : 0);
  if (need > filt.size()) {
    throw Rejection("seq_len " + std::to_string(cfg.seq_len) + " with lag " +
                    std::to_string(cfg.lag) + " needs " + std::to_string(need) +
                    " filtration levels, the filtration has " + std::to_string(filt.size()));
  }
}

Filtration search_filtration(const SearchConfig& cfg) {
  return make_filtration(cfg.filtration, cfg.dim, cfg.local_dims);
}

RatioReport evaluate_inequality(InequalityId id, const OperatorSequence& seq,
                                const Filtration& filt, Exponent p, Exponent q, int lag,
                                const CheckOptions& opts) {
  switch (id) {
    case InequalityId::kSteinPQ:
    case InequalityId::kSteinQQ: {
      RatioReport r = check_stein_pq(seq, filt, p, q.value(), lag);
      r.id = id;
      return r;
    }
    case InequalityId::kQiuS12: return check_qiu_s12(seq, filt, lag);
    case InequalityId::kDualDoob: return check_dual_doob(seq, filt, p);
    case InequalityId::kDoobMaximal:
      require_nonempty(seq, "doob_max");
      return check_doob_maximal(seq.front(), filt, p, opts);
    case InequalityId::kSteinPInf: return check_sp_inf(seq, filt, p, lag, opts);
    case InequalityId::kCrpStein: return check_crp_stein(seq, filt, p, lag, opts);
    default:
      throw Rejection("inequality '" + to_string(id) + "' has no sequence evaluator");
  }
}

SearchResult estimate_constant(const SearchConfig& cfg) { return run_search(cfg, true); }

SearchResult estimate_constant_serial(const SearchConfig& cfg) { return run_search(cfg, false); }

std::vector<SweepPoint> sweep(const std::vector<std::pair<Exponent, Exponent>>& grid,
                              const SearchConfig& base) {
  std::vector<SweepPoint> out;
  out.reserve(grid.size());
  for (const auto& [p, q] : grid) {
    SweepPoint point{p, q, std::nullopt, {}};
    SearchConfig cfg = base;
    cfg.p = p;
    cfg.q = q;
    try {
      point.result = estimate_constant(cfg);
    } catch (const std::exception& e) {
      point.error = e.what();
    }
    out.push_back(std::move(point));
  }
  return out;
}

}  // namespace ncstein
