#include "kaonlab/chsh.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <numeric>
#include <string>
#include <thread>

#include "kaonlab/errors.hpp"

namespace kaonlab {

double s_photon(double phi_ab, double phi_ac, double phi_db) {
  return std::abs(std::cos(phi_ab) - std::cos(phi_ac)) +
         std::abs(std::cos(phi_db) + std::cos(-phi_ab + phi_ac + phi_db));
}

std::optional<StrangenessTimes> strangeness_times(double t_a, double phi_ab, double phi_ac,
                                                  double phi_db,
                                                  const PhysicalConstants& constants) {
  const double dm = constants.delta_m_unit();
  StrangenessTimes t{t_a, t_a + phi_ab / dm, t_a + phi_ac / dm, 0.0};
  t.t_d = t.t_b - phi_db / dm;
  if (!(t.t_a >= 0.0 && t.t_b >= 0.0 && t.t_c >= 0.0 && t.t_d >= 0.0)) return std::nullopt;
  return t;
}

std::optional<double> try_s_kaon_strangeness(double t_a, double phi_ab, double phi_ac,
                                             double phi_db,
                                             const PhysicalConstants& constants) {
  const auto t = strangeness_times(t_a, phi_ab, phi_ac, phi_db, constants);
  if (!t) return std::nullopt;
  const double g = constants.rates().gamma();
  const auto damp = [g](double x, double y) { return std::exp(-g * (x + y)); };
  return std::abs(std::cos(phi_ab) * damp(t->t_a, t->t_b) -
                  std::cos(phi_ac) * damp(t->t_a, t->t_c)) +
         std::abs(std::cos(phi_db) * damp(t->t_d, t->t_b) +
                  std::cos(-phi_ab + phi_ac + phi_db) * damp(t->t_d, t->t_c));
}

double s_kaon_strangeness(double t_a, double phi_ab, double phi_ac, double phi_db,
                          const PhysicalConstants& constants) {
  const auto v = try_s_kaon_strangeness(t_a, phi_ab, phi_ac, phi_db, constants);
  if (!v) throw MathError("s_kaon_strangeness: parameters map to a negative detection time");
  return *v;
}

namespace {

double agreement(const QuasiSpinState& left, double t_l, const QuasiSpinState& right,
                 double t_r, const PhysicalConstants& c) {
  const auto table = joint_outcome_table(left, t_l, right, t_r, c);
  return table.p_yy + table.p_nn;
}

}  // namespace

double expectation_qm(const QuasiSpinState& k_n, double t_a, const QuasiSpinState& k_m,
                      double t_b, const PhysicalConstants& constants) {
  return -1.0 + 2.0 * agreement(k_n, t_a, k_m, t_b, constants);
}

double s_generalized(const ChshSetting& s, const PhysicalConstants& constants) {
  const double nm = agreement(s.k_n, s.t_a, s.k_m, s.t_b, constants);
  const double nn = agreement(s.k_n, s.t_a, s.k_n_prime, s.t_c, constants);
  const double mm = agreement(s.k_m_prime, s.t_d, s.k_m, s.t_b, constants);
  const double mn = agreement(s.k_m_prime, s.t_d, s.k_n_prime, s.t_c, constants);
  return std::abs(nm - nn) + std::abs(-1.0 + mm + mn);
}

double s_generalized_correlation_form(const ChshSetting& s, const PhysicalConstants& constants) {
  const double m1 = expectation_qm(s.k_n, s.t_a, s.k_m, s.t_b, constants);
  const double m2 = expectation_qm(s.k_n, s.t_a, s.k_n_prime, s.t_c, constants);
  const double m3 = expectation_qm(s.k_m_prime, s.t_d, s.k_n_prime, s.t_c, constants);
  const double m4 = expectation_qm(s.k_m_prime, s.t_d, s.k_m, s.t_b, constants);
  return std::abs(m1 - m2) + std::abs(m3 + m4);
}

// --- maximization ---------------------------------------------------------

namespace {

constexpr double kInfeasible = -std::numeric_limits<double>::infinity();

double evaluate(const Objective& f, std::span<const double> x) {
  const auto v = f(x);
  return v && std::isfinite(*v) ? *v : kInfeasible;
}

void clamp_into(std::vector<double>& x, std::span<const Interval> bounds) {
  for (std::size_t i = 0; i < x.size(); ++i) x[i] = std::clamp(x[i], bounds[i].lo, bounds[i].hi);
}

struct Refined {
  std::vector<double> x;
  double value;
  long long evaluations;
};

// Nelder-Mead on -f with every trial point clamped into the box.
Refined nelder_mead(const Objective& f, std::vector<double> start, double start_value,
                    std::span<const Interval> bounds, int max_iters) {
  const std::size_t n = start.size();
  long long evals = 0;
  std::vector<std::vector<double>> simplex{start};
  std::vector<double> values{start_value};
  for (std::size_t i = 0; i < n; ++i) {
    std::vector<double> v = start;
    const double width = bounds[i].hi - bounds[i].lo;
    double step = 0.05 * width;
    if (v[i] + step > bounds[i].hi) step = -step;
    v[i] += step;
    clamp_into(v, bounds);
    simplex.push_back(v);
    values.push_back(evaluate(f, v));
    ++evals;
  }

  std::vector<std::size_t> order(n + 1);
  const auto trial = [&](const std::vector<double>& centroid, const std::vector<double>& worst,
                         double coeff) {
    std::vector<double> p(n);
    for (std::size_t i = 0; i < n; ++i) p[i] = centroid[i] + coeff * (worst[i] - centroid[i]);
    clamp_into(p, bounds);
    return p;
  };

  for (int iter = 0; iter < max_iters; ++iter) {
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(),
                     [&](std::size_t a, std::size_t b) { return values[a] > values[b]; });
    const std::size_t best = order.front();
    const std::size_t worst = order.back();
    const std::size_t second_worst = order[n - 1];
    if (std::isfinite(values[worst]) && values[best] - values[worst] < 1e-14) break;

    std::vector<double> centroid(n, 0.0);
    for (std::size_t k = 0; k < n; ++k) {
      for (std::size_t i = 0; i < n; ++i) centroid[i] += simplex[order[k]][i] / double(n);
    }

    const auto reflected = trial(centroid, simplex[worst], -1.0);
    const double fr = evaluate(f, reflected);
    ++evals;
    if (fr > values[best]) {
      const auto expanded = trial(centroid, simplex[worst], -2.0);
      const double fe = evaluate(f, expanded);
      ++evals;
      if (fe > fr) {
        simplex[worst] = expanded;
        values[worst] = fe;
      } else {
        simplex[worst] = reflected;
        values[worst] = fr;
      }
      continue;
    }
    if (fr > values[second_worst]) {
      simplex[worst] = reflected;
      values[worst] = fr;
      continue;
    }
    const auto contracted = trial(centroid, simplex[worst], 0.5);
    const double fc = evaluate(f, contracted);
    ++evals;
    if (fc > values[worst]) {
      simplex[worst] = contracted;
      values[worst] = fc;
      continue;
    }
    for (std::size_t k = 1; k <= n; ++k) {
      auto& v = simplex[order[k]];
      for (std::size_t i = 0; i < n; ++i) v[i] = simplex[best][i] + 0.5 * (v[i] - simplex[best][i]);
      values[order[k]] = evaluate(f, v);
      ++evals;
    }
  }
  const auto it = std::max_element(values.begin(), values.end());
  return {simplex[std::size_t(it - values.begin())], *it, evals};
}

}  // namespace

MaximizationReport maximize(const Objective& objective, std::span<const Interval> bounds,
                            const MaximizeOptions& options) {
  if (bounds.empty()) throw MathError("maximize: empty bounds");
  for (const auto& b : bounds) {
    if (!(b.lo <= b.hi) || !std::isfinite(b.lo) || !std::isfinite(b.hi)) {
      throw MathError("maximize: each interval needs finite lo <= hi");
    }
  }
  if (options.grid_steps < 8) throw MathError("maximize: grid_steps must be at least 8");
  if (options.seeds < 1) throw MathError("maximize: need at least one seed");

  const std::size_t dims = bounds.size();
  std::vector<int> steps(dims);
  long long total = 1;
  for (std::size_t i = 0; i < dims; ++i) {
    steps[i] = bounds[i].lo == bounds[i].hi ? 1 : options.grid_steps;
    total *= steps[i];
  }
  const auto point_at = [&](long long index) {
    std::vector<double> x(dims);
    for (std::size_t i = dims; i-- > 0;) {
      const int k = int(index % steps[i]);
      index /= steps[i];
      x[i] = steps[i] == 1 ? bounds[i].lo
                           : bounds[i].lo + (bounds[i].hi - bounds[i].lo) * k / (steps[i] - 1);
    }
    return x;
  };

  std::vector<double> grid(std::size_t(total), kInfeasible);
  unsigned workers = options.threads > 0 ? unsigned(options.threads)
                                         : std::max(1u, std::thread::hardware_concurrency());
  workers = unsigned(std::min<long long>(workers, total));
  {
    std::vector<std::jthread> pool;
    const long long chunk = (total + workers - 1) / workers;
    for (unsigned w = 0; w < workers; ++w) {
      pool.emplace_back([&, w] {
        const long long begin = w * chunk;
        const long long end = std::min(total, begin + chunk);
        for (long long k = begin; k < end; ++k) grid[std::size_t(k)] = evaluate(objective, point_at(k));
      });
    }
  }

  std::vector<long long> ranked(static_cast<std::size_t>(total));
  std::iota(ranked.begin(), ranked.end(), 0LL);
  const std::size_t seed_count = std::min<std::size_t>(std::size_t(options.seeds), ranked.size());
  std::partial_sort(ranked.begin(), ranked.begin() + long(seed_count), ranked.end(),
                    [&](long long a, long long b) {
                      if (grid[std::size_t(a)] != grid[std::size_t(b)]) {
                        return grid[std::size_t(a)] > grid[std::size_t(b)];
                      }
                      return a < b;
                    });
  if (!std::isfinite(grid[std::size_t(ranked.front())])) {
    throw MathError("maximize: objective undefined on every grid point");
  }

  MaximizationReport report;
  report.grid_steps = options.grid_steps;
  report.refine_iters = options.refine_iters;
  report.evaluations = total;
  report.best_grid_value = grid[std::size_t(ranked.front())];
  report.best_value = report.best_grid_value;
  report.argmax = point_at(ranked.front());

  for (std::size_t s = 0; s < seed_count; ++s) {
    const long long idx = ranked[s];
    if (!std::isfinite(grid[std::size_t(idx)])) break;
    auto refined = nelder_mead(objective, point_at(idx), grid[std::size_t(idx)], bounds,
                               options.refine_iters);
    report.evaluations += refined.evaluations;
    report.seed_values.push_back(refined.value);
    if (refined.value > report.best_value) {
      report.best_value = refined.value;
      report.argmax = std::move(refined.x);
    }
  }
  return report;
}

std::string_view to_string(ChshFunction f) {
  switch (f) {
    case ChshFunction::photon: return "photon";
    case ChshFunction::kaon_strangeness: return "kaon";
    case ChshFunction::generalized_restricted: return "generalized";
  }
  return "photon";
}

ChshFunction parse_chsh_function(std::string_view text) {
  if (text == "photon") return ChshFunction::photon;
  if (text == "kaon" || text == "kaon_strangeness") return ChshFunction::kaon_strangeness;
  if (text == "generalized" || text == "generalized_restricted") {
    return ChshFunction::generalized_restricted;
  }
  throw ConfigError("unknown CHSH function '" + std::string(text) + "'");
}

std::vector<Interval> default_bounds(ChshFunction f) {
  constexpr double two_pi = 2.0 * std::numbers::pi;
  switch (f) {
    case ChshFunction::photon: return {{0, two_pi}, {0, two_pi}, {0, two_pi}};
    case ChshFunction::kaon_strangeness: return {{0, 4}, {0, two_pi}, {0, two_pi}, {0, two_pi}};
    case ChshFunction::generalized_restricted: return {{0, 4}, {0, 4}, {0, 4}, {0, 4}};
  }
  return {};
}

MaximizationReport maximize_s(ChshFunction f, std::span<const Interval> bounds,
                              const MaximizeOptions& options,
                              const PhysicalConstants& constants) {
  const std::size_t expected = f == ChshFunction::photon ? 3 : 4;
  if (bounds.size() != expected) {
    throw MathError("maximize_s: " + std::string(to_string(f)) + " takes " +
                    std::to_string(expected) + " parameters");
  }
  Objective objective;
  switch (f) {
    case ChshFunction::photon:
      objective = [](std::span<const double> x) -> std::optional<double> {
        return s_photon(x[0], x[1], x[2]);
      };
      break;
    case ChshFunction::kaon_strangeness:
      objective = [&constants](std::span<const double> x) {
        return try_s_kaon_strangeness(x[0], x[1], x[2], x[3], constants);
      };
      break;
    case ChshFunction::generalized_restricted: {
      const QuasiSpinState anti = named_state(StateKind::k0bar, constants);
      objective = [&constants, anti](std::span<const double> x) -> std::optional<double> {
        for (double t : x) {
          if (t < 0.0) return std::nullopt;
        }
        return s_generalized(ChshSetting{anti, anti, anti, anti, x[0], x[1], x[2], x[3]},
                             constants);
      };
      break;
    }
  }
  return maximize(objective, bounds, options);
}

}  // namespace kaonlab
