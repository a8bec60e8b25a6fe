#pragma once

// Multi-start maximization of a function on S^{d−1}: seed values on a δ-net
// (or random points when a net of that resolution is too large), then
// pattern-search ascent along random tangent frames from the best seeds.

#include "waistlab/sphere_geometry.hpp"

#include <map>
#include <mutex>

namespace waistlab {

struct OptimizerConfig {
  int restarts = 50;
  std::size_t seed_points = 2000;   ///< random seeds when no net is used
  double net_delta = kPi / 40;
  std::size_t max_net_size = 2000;  ///< larger nets fall back to random seeds
  int max_iterations = 3000;
  double initial_step = 0.25;        ///< radians
  double min_step = 1e-10;
  int extra_directions = 4;
};

struct OptimizerResult {
  double value = -kInf;
  Vec argmax;
  bool net_seeded = false;
  double net_resolution = 0.0;   ///< certified δ when net_seeded
  bool net_exhaustive = false;
  double best_seed_value = -kInf;  ///< max over the seed set
  std::size_t evaluations = 0;
};

namespace detail {

inline std::shared_ptr<const SphereNet> cached_net(int d, double delta) {
  static std::mutex mu;
  static std::map<std::pair<int, double>, std::shared_ptr<const SphereNet>> cache;
  std::lock_guard<std::mutex> lock(mu);
  auto key = std::make_pair(d, delta);
  auto it = cache.find(key);
  if (it != cache.end()) return it->second;
  auto net = std::make_shared<const SphereNet>(build_net(d, delta, 0x4E37));
  cache.emplace(key, net);
  return net;
}

inline bool net_feasible(int d, const OptimizerConfig& cfg) {
  return d >= 2 && d <= 8 && cfg.net_delta > 0.0 && cfg.net_delta < kPi / 2 &&
         net_size_estimate(d, cfg.net_delta) <= static_cast<double>(cfg.max_net_size);
}

/// Orthonormal basis of the tangent space at x, randomly oriented.
inline Mat random_tangent_frame(const Vec& x, Rng& rng) {
  const int d = static_cast<int>(x.size());
  Mat G(d, d);
  G.col(0) = x;
  for (int j = 1; j < d; ++j) G.col(j) = gaussian_vector(d, rng);
  Eigen::HouseholderQR<Mat> qr(G);
  Mat Q = qr.householderQ() * Mat::Identity(d, d);
  return Q.rightCols(d - 1);
}

}  // namespace detail

template <class F>
OptimizerResult maximize_on_sphere(F&& f, int d, const OptimizerConfig& cfg, std::uint64_t seed) {
  if (d < 1) throw DomainError("maximize_on_sphere: dimension must be >= 1");
  OptimizerResult res;
  auto eval = [&](const Vec& x) {
    ++res.evaluations;
    return f(x);
  };
  if (d == 1) {
    Vec p = Vec::Ones(1);
    double a = eval(p);
    double b = eval(-p);
    res.value = std::max(a, b);
    res.best_seed_value = res.value;
    res.argmax = a >= b ? p : Vec(-p);
    res.net_seeded = true;
    res.net_exhaustive = true;
    return res;
  }

  Rng rng = make_rng(seed, 0x0971);
  std::vector<Vec> seeds;
  if (detail::net_feasible(d, cfg)) {
    auto net = detail::cached_net(d, cfg.net_delta);
    for (Eigen::Index i = 0; i < net->points.cols(); ++i) seeds.push_back(net->points.col(i));
    res.net_seeded = true;
    res.net_resolution = net->resolution;
    res.net_exhaustive = net->exhaustive;
  } else {
    for (std::size_t i = 0; i < cfg.seed_points; ++i) seeds.push_back(uniform_on_sphere(d, rng));
  }
  for (int i = 0; i < d; ++i) {
    seeds.push_back(unit_vector(d, i));
    seeds.push_back(-unit_vector(d, i));
  }
  std::vector<std::pair<double, std::size_t>> scored;
  scored.reserve(seeds.size());
  for (std::size_t i = 0; i < seeds.size(); ++i) scored.emplace_back(eval(seeds[i]), i);
  std::sort(scored.begin(), scored.end(), [](const auto& a, const auto& b) {
    return a.first > b.first || (a.first == b.first && a.second < b.second);
  });
  res.best_seed_value = scored.front().first;
  res.value = scored.front().first;
  res.argmax = seeds[scored.front().second];

  const int starts = std::min<int>(cfg.restarts, static_cast<int>(scored.size()));
  for (int s = 0; s < starts; ++s) {
    Vec x = seeds[scored[s].second];
    double fx = scored[s].first;
    double step = cfg.initial_step;
    for (int it = 0; it < cfg.max_iterations && step > cfg.min_step; ++it) {
      Mat T = detail::random_tangent_frame(x, rng);
      Vec best_x = x;
      double best_f = fx;
      auto try_dir = [&](const Vec& t) {
        Vec y = std::cos(step) * x + std::sin(step) * t;
        y.normalize();
        double fy = eval(y);
        if (fy > best_f) {
          best_f = fy;
          best_x = y;
        }
      };
      for (Eigen::Index j = 0; j < T.cols(); ++j) {
        try_dir(T.col(j));
        try_dir(-T.col(j));
      }
      for (int j = 0; j < cfg.extra_directions; ++j) {
        Vec t = gaussian_vector(d, rng);
        t -= t.dot(x) * x;
        double len = t.norm();
        if (len > 0) try_dir(t / len);
      }
      if (best_f > fx) {
        x = best_x;
        fx = best_f;
        step = std::min(step * 1.5, cfg.initial_step);
      } else {
        step *= 0.5;
      }
    }
    if (fx > res.value) {
      res.value = fx;
      res.argmax = x;
    }
  }
  return res;
}

}  // namespace waistlab
