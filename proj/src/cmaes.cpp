#include <algorithm>
#include <cmath>
#include <deque>
#include <numeric>
#include <random>
#include <string>

#include <Eigen/Dense>

#include "kronlow/errors.hpp"
#include "kronlow/optimize.hpp"
#include "kronlow/parallel.hpp"

namespace kronlow {
namespace {

using Vec = Eigen::VectorXd;
using Mat = Eigen::MatrixXd;

std::vector<Interval> effective_bounds(const OptimizerConfig& config, std::size_t dim) {
  return config.bounds.empty() ? std::vector<Interval>(dim, kParameterBox) : config.bounds;
}

double sanitize(double v) { return std::isfinite(v) ? v : 1.0; }

// One stream per run, independent of how many runs exist.
std::mt19937_64 run_stream(std::uint64_t seed, std::size_t run) {
  std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                    static_cast<std::uint32_t>(run), 0x6b726f6eu};
  return std::mt19937_64(seq);
}

struct Tracker {
  OptResult& result;

  void offer(const std::vector<Vec>& xs, const std::vector<double>& fs) {
    for (std::size_t k = 0; k < xs.size(); ++k) {
      if (result.best_params.empty() || fs[k] < result.best_value) {
        result.best_value = fs[k];
        result.best_params.assign(xs[k].data(), xs[k].data() + xs[k].size());
      }
    }
    result.evals_used += xs.size();
    result.history.push_back(result.best_value);
  }
};

std::vector<double> evaluate_all(const Objective& objective, const std::vector<Vec>& xs, std::size_t threads) {
  std::vector<double> fs(xs.size());
  parallel_for(xs.size(), threads, [&](std::size_t k) {
    fs[k] = sanitize(objective(std::span<const double>(xs[k].data(), static_cast<std::size_t>(xs[k].size()))));
  });
  return fs;
}

// Strategy parameters from the standard defaults.
struct Strategy {
  std::size_t dim, lambda, mu;
  Vec weights;
  double mueff, cc, cs, c1, cmu, damps, chi_n;

  Strategy(std::size_t n, std::size_t lam) : dim(n), lambda(lam), mu(lam / 2) {
    const double N = static_cast<double>(n);
    weights.resize(static_cast<Eigen::Index>(mu));
    for (std::size_t i = 0; i < mu; ++i)
      weights[static_cast<Eigen::Index>(i)] = std::log(static_cast<double>(mu) + 0.5) - std::log(static_cast<double>(i + 1));
    weights /= weights.sum();
    mueff = 1.0 / weights.squaredNorm();
    cc = (4.0 + mueff / N) / (N + 4.0 + 2.0 * mueff / N);
    cs = (mueff + 2.0) / (N + mueff + 5.0);
    c1 = 2.0 / ((N + 1.3) * (N + 1.3) + mueff);
    cmu = std::min(1.0 - c1, 2.0 * (mueff - 2.0 + 1.0 / mueff) / ((N + 2.0) * (N + 2.0) + mueff));
    damps = 1.0 + 2.0 * std::max(0.0, std::sqrt((mueff - 1.0) / (N + 1.0)) - 1.0) + cs;
    chi_n = std::sqrt(N) * (1.0 - 1.0 / (4.0 * N) + 1.0 / (21.0 * N * N));
  }
};

// A single descent from one starting mean. step() returns false once the
// search distribution has collapsed or the fitness has flattened out.
class Descent {
 public:
  Descent(const Strategy& s, const std::vector<Interval>& box, Vec mean, double sigma)
      : s_(s), box_(box), mean_(std::move(mean)), sigma_(sigma) {
    const auto n = static_cast<Eigen::Index>(s.dim);
    C_ = Mat::Identity(n, n);
    B_ = Mat::Identity(n, n);
    D_ = Vec::Ones(n);
    pc_ = Vec::Zero(n);
    ps_ = Vec::Zero(n);
  }

  std::vector<Vec> sample(std::mt19937_64& rng) {
    const auto n = static_cast<Eigen::Index>(s_.dim);
    std::normal_distribution<double> normal(0.0, 1.0);
    std::vector<Vec> xs(s_.lambda);
    for (auto& x : xs) {
      Vec z(n);
      for (Eigen::Index j = 0; j < n; ++j) z[j] = normal(rng);
      x = mean_ + sigma_ * (B_ * D_.cwiseProduct(z));
      for (Eigen::Index j = 0; j < n; ++j) x[j] = reflect_into(x[j], box_[static_cast<std::size_t>(j)]);
    }
    return xs;
  }

  bool update(const std::vector<Vec>& xs, const std::vector<double>& fs) {
    const auto n = static_cast<Eigen::Index>(s_.dim);
    std::vector<std::size_t> order(xs.size());
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
      return fs[a] != fs[b] ? fs[a] < fs[b] : a < b;
    });

    const Vec old_mean = mean_;
    Mat ys(n, static_cast<Eigen::Index>(s_.mu));
    mean_.setZero();
    for (std::size_t i = 0; i < s_.mu; ++i) {
      const Vec& x = xs[order[i]];
      mean_ += s_.weights[static_cast<Eigen::Index>(i)] * x;
      ys.col(static_cast<Eigen::Index>(i)) = (x - old_mean) / sigma_;
    }
    const Vec y_w = (mean_ - old_mean) / sigma_;

    const Mat inv_sqrt_c = B_ * D_.cwiseInverse().asDiagonal() * B_.transpose();
    ps_ = (1.0 - s_.cs) * ps_ + std::sqrt(s_.cs * (2.0 - s_.cs) * s_.mueff) * (inv_sqrt_c * y_w);
    ++generation_;
    const double ps_norm = ps_.norm();
    const double decay = 1.0 - std::pow(1.0 - s_.cs, 2.0 * static_cast<double>(generation_));
    const bool hsig = ps_norm / std::sqrt(decay) / s_.chi_n < 1.4 + 2.0 / (static_cast<double>(s_.dim) + 1.0);
    pc_ = (1.0 - s_.cc) * pc_ + (hsig ? std::sqrt(s_.cc * (2.0 - s_.cc) * s_.mueff) : 0.0) * y_w;

    Mat rank_mu = Mat::Zero(n, n);
    for (std::size_t i = 0; i < s_.mu; ++i) {
      const auto col = ys.col(static_cast<Eigen::Index>(i));
      rank_mu += s_.weights[static_cast<Eigen::Index>(i)] * col * col.transpose();
    }
    const double hsig_correction = hsig ? 0.0 : s_.cc * (2.0 - s_.cc);
    C_ = (1.0 - s_.c1 - s_.cmu) * C_ + s_.c1 * (pc_ * pc_.transpose() + hsig_correction * C_) + s_.cmu * rank_mu;
    C_ = 0.5 * (C_ + C_.transpose());
    sigma_ *= std::exp((s_.cs / s_.damps) * (ps_norm / s_.chi_n - 1.0));

    Eigen::SelfAdjointEigenSolver<Mat> eig(C_);
    if (eig.info() != Eigen::Success) return false;
    Vec eigenvalues = eig.eigenvalues().cwiseMax(1e-300);
    B_ = eig.eigenvectors();
    D_ = eigenvalues.cwiseSqrt();

    gen_best_.push_back(fs[order.front()]);
    const std::size_t window = 10 + static_cast<std::size_t>(std::ceil(30.0 * static_cast<double>(s_.dim) /
                                                                          static_cast<double>(s_.lambda)));
    if (gen_best_.size() > window) gen_best_.pop_front();

    // stopping rules: tolx, condition number, diverged spread, flat fitness
    const double spread = sigma_ * D_.maxCoeff();
    if (!std::isfinite(spread) || spread < 1e-12 || spread > 1e3) return false;
    if (D_.maxCoeff() > 1e7 * D_.minCoeff()) return false;
    if (gen_best_.size() == window) {
      const auto [lo, hi] = std::minmax_element(gen_best_.begin(), gen_best_.end());
      const double gen_range = fs[order.back()] - fs[order.front()];
      if (*hi - *lo < 1e-12 && gen_range < 1e-12) return false;
    }
    return true;
  }

 private:
  const Strategy& s_;
  const std::vector<Interval>& box_;
  Vec mean_;
  double sigma_;
  Mat C_, B_;
  Vec D_, pc_, ps_;
  std::size_t generation_ = 0;
  std::deque<double> gen_best_;
};

Vec uniform_point(const std::vector<Interval>& box, std::mt19937_64& rng) {
  Vec x(static_cast<Eigen::Index>(box.size()));
  for (std::size_t j = 0; j < box.size(); ++j) {
    std::uniform_real_distribution<double> u(box[j].lo, box[j].hi);
    x[static_cast<Eigen::Index>(j)] = u(rng);
  }
  return x;
}

}  // namespace

std::size_t default_population(std::size_t dim) noexcept {
  const double log_dim = dim > 0 ? std::log(static_cast<double>(dim)) : 0.0;
  return std::max<std::size_t>(6, 4 + static_cast<std::size_t>(std::floor(3.0 * log_dim)));
}

void validate(const OptimizerConfig& config, std::size_t dim) {
  if (dim == 0) throw ConfigError("optimizer: dimension must be >= 1");
  const std::size_t lambda = config.population.value_or(default_population(dim));
  if (lambda < 2) throw ConfigError("optimizer: population must be >= 2");
  if (config.runs == 0) throw ConfigError("optimizer: runs must be >= 1");
  if (config.budget_evals < lambda)
    throw ConfigError("optimizer: budget_evals " + std::to_string(config.budget_evals) + " is below population " +
                      std::to_string(lambda));
  if (!(config.initial_step > 0.0) || !std::isfinite(config.initial_step))
    throw ConfigError("optimizer: initial_step must be positive");
  if (!config.bounds.empty() && config.bounds.size() != dim)
    throw ConfigError("optimizer: bounds must have one interval per coordinate");
  for (const auto& b : config.bounds) {
    if (!(b.lo > 0.0 && b.hi < 1.0 && b.lo < b.hi)) throw ConfigError("optimizer: bounds must satisfy 0 < lo < hi < 1");
  }
}

double reflect_into(double x, Interval box) noexcept {
  const double width = box.hi - box.lo;
  if (!std::isfinite(x)) return box.lo + 0.5 * width;
  if (x >= box.lo && x <= box.hi) return x;
  double y = std::fmod(x - box.lo, 2.0 * width);
  if (y < 0.0) y += 2.0 * width;
  if (y > width) y = 2.0 * width - y;
  return std::clamp(box.lo + y, box.lo, box.hi);
}

OptResult cmaes_minimize(const Objective& objective, std::size_t dim, const OptimizerConfig& config) {
  validate(config, dim);
  const auto box = effective_bounds(config, dim);
  const Strategy strategy(dim, config.population.value_or(default_population(dim)));

  OptResult result;
  result.seed = config.seed;
  Tracker tracker{result};
  for (std::size_t run = 0; run < config.runs; ++run) {
    auto rng = run_stream(config.seed, run);
    std::size_t spent = 0;
    while (spent + strategy.lambda <= config.budget_evals) {
      Descent descent(strategy, box, uniform_point(box, rng), config.initial_step);
      bool alive = true;
      while (alive && spent + strategy.lambda <= config.budget_evals) {
        const auto xs = descent.sample(rng);
        const auto fs = evaluate_all(objective, xs, config.threads);
        spent += xs.size();
        tracker.offer(xs, fs);
        alive = descent.update(xs, fs);
      }
    }
  }
  return result;
}

OptResult random_search(const Objective& objective, std::size_t dim, const OptimizerConfig& config) {
  validate(config, dim);
  const auto box = effective_bounds(config, dim);
  const std::size_t batch = config.population.value_or(default_population(dim));

  OptResult result;
  result.seed = config.seed;
  Tracker tracker{result};
  for (std::size_t run = 0; run < config.runs; ++run) {
    auto rng = run_stream(config.seed, run);
    std::size_t spent = 0;
    while (spent < config.budget_evals) {
      const std::size_t take = std::min(batch, config.budget_evals - spent);
      std::vector<Vec> xs(take);
      for (auto& x : xs) x = uniform_point(box, rng);
      const auto fs = evaluate_all(objective, xs, config.threads);
      spent += take;
      tracker.offer(xs, fs);
    }
  }
  return result;
}

}  // namespace kronlow
