#include "autospec/stats.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <tuple>

namespace autospec {

namespace {

// Regularized incomplete beta I_x(a, b) by the modified Lentz continued
// fraction (the standard numerical-recipes construction).
double betacf(double a, double b, double x) {
  constexpr int kMaxIter = 300;
  // 1e-14 rather than a few ulps: with FMA contraction the last factor can
  // jitter by ~2 ulp forever and a tighter stop never fires.
  constexpr double kEps = 1e-14;
  constexpr double kFpMin = 1e-300;
  const double qab = a + b, qap = a + 1.0, qam = a - 1.0;
  double c = 1.0;
  double d = 1.0 - qab * x / qap;
  if (std::fabs(d) < kFpMin) d = kFpMin;
  d = 1.0 / d;
  double h = d;
  for (int m = 1; m <= kMaxIter; ++m) {
    const int m2 = 2 * m;
    double aa = m * (b - m) * x / ((qam + m2) * (a + m2));
    d = 1.0 + aa * d;
    if (std::fabs(d) < kFpMin) d = kFpMin;
    c = 1.0 + aa / c;
    if (std::fabs(c) < kFpMin) c = kFpMin;
    d = 1.0 / d;
    h *= d * c;
    aa = -(a + m) * (qab + m) * x / ((a + m2) * (qap + m2));
    d = 1.0 + aa * d;
    if (std::fabs(d) < kFpMin) d = kFpMin;
    c = 1.0 + aa / c;
    if (std::fabs(c) < kFpMin) c = kFpMin;
    d = 1.0 / d;
    const double del = d * c;
    h *= del;
    if (std::fabs(del - 1.0) < kEps) return h;
  }
  throw ConvergenceError("incomplete beta continued fraction did not converge");
}

double betai(double a, double b, double x) {
  if (x <= 0.0) return 0.0;
  if (x >= 1.0) return 1.0;
  const double bt = std::exp(std::lgamma(a + b) - std::lgamma(a) - std::lgamma(b) +
                             a * std::log(x) + b * std::log1p(-x));
  if (x < (a + 1.0) / (a + b + 2.0)) return bt * betacf(a, b, x) / a;
  return 1.0 - bt * betacf(b, a, 1.0 - x) / b;
}

double sample_mean(const std::vector<double>& v) {
  double s = 0.0;
  for (double x : v) s += x;
  return s / static_cast<double>(v.size());
}

double sample_var(const std::vector<double>& v, double mean) {
  double s = 0.0;
  for (double x : v) s += (x - mean) * (x - mean);
  return s / static_cast<double>(v.size() - 1);
}

}  // namespace

double t_cdf(double t, double df) {
  if (!(df > 0.0)) {
    throw DomainError("t_cdf: degrees of freedom must be positive, got " + std::to_string(df));
  }
  if (!std::isfinite(t)) return t > 0.0 ? 1.0 : 0.0;
  if (t == 0.0) return 0.5;
  const double x = df / (df + t * t);
  const double tail = 0.5 * betai(0.5 * df, 0.5, x);  // P(|T| > |t|) / 2
  return t > 0.0 ? 1.0 - tail : tail;
}

WelchResult welch_t(const std::vector<double>& xs, const std::vector<double>& ys) {
  if (xs.size() < 2 || ys.size() < 2) {
    throw DomainError("welch_t: both samples need at least 2 observations, got " +
                      std::to_string(xs.size()) + " and " + std::to_string(ys.size()));
  }
  const double nx = static_cast<double>(xs.size()), ny = static_cast<double>(ys.size());
  const double mx = sample_mean(xs), my = sample_mean(ys);
  const double vx = sample_var(xs, mx), vy = sample_var(ys, my);
  const double se2 = vx / nx + vy / ny;
  WelchResult out;
  if (se2 == 0.0) {
    out.degenerate = true;
    out.df = 0.0;
    if (mx == my) {
      out.t = 0.0;
      out.p = 1.0;
    } else {
      out.t = mx > my ? std::numeric_limits<double>::infinity()
                      : -std::numeric_limits<double>::infinity();
      out.p = 0.0;
    }
    return out;
  }
  out.t = (mx - my) / std::sqrt(se2);
  const double a = (vx / nx) * (vx / nx) / (nx - 1.0);
  const double b = (vy / ny) * (vy / ny) / (ny - 1.0);
  out.df = se2 * se2 / (a + b);
  out.p = std::clamp(2.0 * t_cdf(-std::fabs(out.t), out.df), 0.0, 1.0);
  return out;
}

Correction correction_from_string(const std::string& s) {
  if (s == "none") return Correction::none;
  if (s == "bonferroni") return Correction::bonferroni;
  throw ConfigError("unknown correction '" + s + "' (expected none or bonferroni)");
}

std::string to_string(Correction c) {
  return c == Correction::none ? "none" : "bonferroni";
}

std::vector<TrajectoryMatrix> trajectories_from_snapshots(
    const std::vector<SpectrumSnapshot>& snapshots) {
  using Key = std::tuple<int, int, int>;  // layer_id, statistic, group
  std::map<Key, std::vector<const SpectrumSnapshot*>> buckets;
  for (const auto& s : snapshots) {
    buckets[{s.layer_id, static_cast<int>(s.statistic), s.group}].push_back(&s);
  }
  std::vector<TrajectoryMatrix> out;
  out.reserve(buckets.size());
  for (auto& [key, snaps] : buckets) {
    std::stable_sort(snaps.begin(), snaps.end(),
                     [](const SpectrumSnapshot* a, const SpectrumSnapshot* b) {
                       return a->epoch < b->epoch;
                     });
    TrajectoryMatrix tm;
    tm.layer_id = std::get<0>(key);
    tm.statistic = static_cast<Statistic>(std::get<1>(key));
    tm.group = std::get<2>(key);
    tm.layer_name = snaps.front()->layer_name;
    const std::size_t k = snaps.front()->sigma.size();
    tm.epochs.reserve(snaps.size());
    tm.values = Tensor({snaps.size(), k});
    for (std::size_t e = 0; e < snaps.size(); ++e) {
      const SpectrumSnapshot* s = snaps[e];
      if (s->sigma.size() != k) {
        throw ContractError("trajectory for layer " + std::to_string(tm.layer_id) +
                            " has inconsistent spectrum lengths (" + std::to_string(k) + " vs " +
                            std::to_string(s->sigma.size()) + ")");
      }
      if (!tm.epochs.empty() && s->epoch == tm.epochs.back()) {
        throw ContractError("duplicate epoch " + std::to_string(s->epoch) +
                            " in trajectory for layer " + std::to_string(tm.layer_id));
      }
      tm.epochs.push_back(s->epoch);
      for (std::size_t j = 0; j < k; ++j) tm.values.at(e, j) = s->sigma[j];
    }
    out.push_back(std::move(tm));
  }
  return out;
}

namespace {

void require_same_grid(const TrajectoryMatrix& a, const TrajectoryMatrix& b) {
  if (a.epochs != b.epochs) {
    throw ContractError("trajectories cover different epoch grids (" +
                        std::to_string(a.epochs.size()) + " vs " +
                        std::to_string(b.epochs.size()) + " epochs)");
  }
}

}  // namespace

std::vector<double> per_epoch_significance(const TrajectoryMatrix& a, const TrajectoryMatrix& b) {
  require_same_grid(a, b);
  if (a.values.cols() < 2 || b.values.cols() < 2) {
    throw DomainError("per_epoch_significance needs at least 2 singular values per side");
  }
  std::vector<double> out;
  out.reserve(a.epochs.size());
  for (std::size_t e = 0; e < a.epochs.size(); ++e) {
    std::vector<double> xs(a.values.cols()), ys(b.values.cols());
    for (std::size_t k = 0; k < xs.size(); ++k) xs[k] = a.values.at(e, k);
    for (std::size_t k = 0; k < ys.size(); ++k) ys[k] = b.values.at(e, k);
    out.push_back(welch_t(xs, ys).p);
  }
  return out;
}

std::vector<double> per_sv_significance(const TrajectoryMatrix& a, const TrajectoryMatrix& b) {
  require_same_grid(a, b);
  if (a.epochs.size() < 2) {
    throw DomainError("per_sv_significance needs at least 2 epochs");
  }
  const std::size_t shared = std::min(a.values.cols(), b.values.cols());
  std::vector<double> out;
  out.reserve(shared);
  for (std::size_t k = 0; k < shared; ++k) {
    std::vector<double> xs(a.epochs.size()), ys(b.epochs.size());
    for (std::size_t e = 0; e < xs.size(); ++e) xs[e] = a.values.at(e, k);
    for (std::size_t e = 0; e < ys.size(); ++e) ys[e] = b.values.at(e, k);
    out.push_back(welch_t(xs, ys).p);
  }
  return out;
}

std::vector<SignificanceReport> pairwise_reports(const std::vector<TrajectoryMatrix>& trajectories,
                                                 double alpha, Correction correction) {
  if (!(alpha > 0.0 && alpha < 1.0)) {
    throw DomainError("alpha must be in (0, 1), got " + std::to_string(alpha));
  }
  using Key = std::pair<int, int>;  // layer_id, statistic
  std::map<Key, std::map<int, const TrajectoryMatrix*>> by_series;
  for (const auto& tm : trajectories) {
    if (tm.group == SpectrumSnapshot::kAllGroups) continue;
    by_series[{tm.layer_id, static_cast<int>(tm.statistic)}][tm.group] = &tm;
  }
  std::vector<SignificanceReport> out;
  for (const auto& [key, groups] : by_series) {
    for (auto ia = groups.begin(); ia != groups.end(); ++ia) {
      for (auto ib = std::next(ia); ib != groups.end(); ++ib) {
        SignificanceReport rep;
        rep.layer_id = key.first;
        rep.statistic = static_cast<Statistic>(key.second);
        rep.layer_name = ia->second->layer_name;
        rep.group_a = ia->first;
        rep.group_b = ib->first;
        rep.epochs = ia->second->epochs;
        rep.per_epoch_p = per_epoch_significance(*ia->second, *ib->second);
        rep.per_sv_p = per_sv_significance(*ia->second, *ib->second);
        rep.alpha = alpha;
        rep.correction = correction;
        out.push_back(std::move(rep));
      }
    }
  }
  return out;
}

namespace {

std::vector<bool> apply_alpha(const std::vector<double>& ps, double alpha, Correction c) {
  const double cut = c == Correction::bonferroni && !ps.empty()
                         ? alpha / static_cast<double>(ps.size())
                         : alpha;
  std::vector<bool> out(ps.size());
  for (std::size_t i = 0; i < ps.size(); ++i) out[i] = ps[i] < cut;
  return out;
}

}  // namespace

std::vector<bool> epoch_flags(const SignificanceReport& report) {
  return apply_alpha(report.per_epoch_p, report.alpha, report.correction);
}

std::vector<bool> sv_flags(const SignificanceReport& report) {
  return apply_alpha(report.per_sv_p, report.alpha, report.correction);
}

}  // namespace autospec
