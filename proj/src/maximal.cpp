#include "roughbv/maximal.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <stdexcept>

#include "roughbv/lp.hpp"

namespace roughbv {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

// Sorted scan of the balls around one center: the distinct closed balls are
// the prefixes of the distance-sorted point list, one per realized radius.
struct BallScan {
  std::vector<int> order;       // points by increasing distance from center
  std::vector<double> d;        // distances in the same order
  std::vector<int> group_end;   // exclusive prefix length per distinct radius
  std::vector<double> radius;   // realized radius per group
  std::vector<int> group_of;    // point id -> its group index

  BallScan(const MetricMeasureSpace& X, int center) {
    const int m = X.n();
    order.resize(m);
    std::iota(order.begin(), order.end(), 0);
    std::vector<double> row = X.dist_row(center);
    std::stable_sort(order.begin(), order.end(),
                     [&](int a, int b) { return row[a] < row[b]; });
    d.resize(m);
    for (int k = 0; k < m; ++k) d[k] = row[order[k]];
    group_of.resize(m);
    int k = 0;
    while (k < m) {
      int e = k + 1;
      while (e < m && d[e] <= d[k] + kTieTol) ++e;
      for (int l = k; l < e; ++l) group_of[order[l]] = static_cast<int>(radius.size());
      radius.push_back(d[e - 1]);
      group_end.push_back(e);
      k = e;
    }
  }
  int groups() const { return static_cast<int>(radius.size()); }
};

// Fenwick trees over value ranks: enough order statistics to locate weighted
// medians and evaluate int_B |f - c| incrementally while a ball grows.
struct MedianAccum {
  explicit MedianAccum(int n) : w(n + 1, 0.0), wf(n + 1, 0.0), n_(n) {}
  void add(int rank, double weight, double value) {
    for (int i = rank + 1; i <= n_; i += i & (-i)) {
      w[i] += weight;
      wf[i] += weight * value;
    }
    total_w += weight;
    total_wf += weight * value;
  }
  // cumulative weight over ranks <= rank
  double cum_w(int rank) const {
    double s = 0.0;
    for (int i = rank + 1; i > 0; i -= i & (-i)) s += w[i];
    return s;
  }
  double cum_wf(int rank) const {
    double s = 0.0;
    for (int i = rank + 1; i > 0; i -= i & (-i)) s += wf[i];
    return s;
  }
  // smallest rank with cumulative weight >= half the total
  int median_rank() const {
    double half = 0.5 * total_w;
    int pos = 0;
    double acc = 0.0;
    int logn = 1;
    while ((1 << logn) <= n_) ++logn;
    for (int k = logn; k >= 0; --k) {
      int next = pos + (1 << k);
      if (next <= n_ && acc + w[next] < half - 1e-300) {
        pos = next;
        acc += w[next];
      }
    }
    return pos;  // 0-based rank
  }
  // int |f - c| given c and its rank (all mass at ranks <= rank has f <= c)
  double abs_dev(int rank, double c) const {
    double wb = cum_w(rank), sb = cum_wf(rank);
    double wa = total_w - wb, sa = total_wf - sb;
    return c * wb - sb + (sa - c * wa);
  }

  std::vector<double> w, wf;
  double total_w = 0.0, total_wf = 0.0;
  int n_;
};

std::vector<int> value_ranks(const BoundaryFunction& f) {
  const int m = static_cast<int>(f.size());
  std::vector<int> idx(m);
  std::iota(idx.begin(), idx.end(), 0);
  std::stable_sort(idx.begin(), idx.end(), [&](int a, int b) { return f[a] < f[b]; });
  std::vector<int> rank(m);
  for (int k = 0; k < m; ++k) rank[idx[k]] = k;
  return rank;
}

void check_sizes(const MetricMeasureSpace& X, const BoundaryFunction& f) {
  if (static_cast<int>(f.size()) != X.n())
    throw std::invalid_argument("function length does not match space size");
  for (double v : f)
    if (!std::isfinite(v)) throw std::invalid_argument("function values must be finite");
}

}  // namespace

bool hajlasz_certified(const MetricMeasureSpace& X, const BoundaryFunction& f,
                       const BoundaryFunction& grad, double tol) {
  const int m = X.n();
  for (double g : grad)
    if (g < 0 || !std::isfinite(g)) return false;
  for (int i = 0; i < m; ++i)
    for (int j = i + 1; j < m; ++j) {
      double d = X.dist(i, j);
      if (std::abs(f[i] - f[j]) > d * (grad[i] + grad[j]) + tol) return false;
    }
  return true;
}

BoundaryFunction hl_maximal(const MetricMeasureSpace& X, const BoundaryFunction& f,
                            MaxVariant variant, double t) {
  check_sizes(X, f);
  if (variant == MaxVariant::kTruncated && !(t > 0))
    throw std::invalid_argument("truncated maximal operator needs t > 0");
  const int m = X.n();
  BoundaryFunction out(m, 0.0);

  if (variant == MaxVariant::kUncentered) {
    for (int z = 0; z < m; ++z) {
      BallScan scan(X, z);
      const int G = scan.groups();
      std::vector<double> avg(G);
      double sw = 0.0, sf = 0.0;
      int k = 0;
      for (int g = 0; g < G; ++g) {
        for (; k < scan.group_end[g]; ++k) {
          int y = scan.order[k];
          sw += X.weight[y];
          sf += X.weight[y] * std::abs(f[y]);
        }
        avg[g] = sf / sw;
      }
      // suffix max: the balls around z eligible for x are those reaching x
      for (int g = G - 2; g >= 0; --g) avg[g] = std::max(avg[g], avg[g + 1]);
      for (int x = 0; x < m; ++x) out[x] = std::max(out[x], avg[scan.group_of[x]]);
    }
    return out;
  }

  for (int x = 0; x < m; ++x) {
    BallScan scan(X, x);
    double sw = 0.0, sf = 0.0;
    double best = 0.0;
    int k = 0;
    for (int g = 0; g < scan.groups(); ++g) {
      if (variant == MaxVariant::kTruncated && g > 0 && scan.radius[g] >= t) break;
      for (; k < scan.group_end[g]; ++k) {
        int y = scan.order[k];
        sw += X.weight[y];
        sf += X.weight[y] * std::abs(f[y]);
      }
      best = std::max(best, sf / sw);
    }
    out[x] = best;
  }
  return out;
}

BoundaryFunction calderon_sharp(const MetricMeasureSpace& X, const BoundaryFunction& f) {
  check_sizes(X, f);
  const int m = X.n();
  BoundaryFunction out(m, 0.0);
  for (int x = 0; x < m; ++x) {
    BallScan scan(X, x);
    double best = 0.0;
    double sw = 0.0, sf = 0.0;
    int k = 0;
    for (int g = 0; g < scan.groups(); ++g) {
      for (; k < scan.group_end[g]; ++k) {
        int y = scan.order[k];
        sw += X.weight[y];
        sf += X.weight[y] * f[y];
      }
      if (g == 0 && scan.radius[0] <= kTieTol) continue;  // singleton: oscillation 0
      const double mean = sf / sw;
      double dev = 0.0;
      for (int l = 0; l < scan.group_end[g]; ++l) {
        int y = scan.order[l];
        dev += X.weight[y] * std::abs(f[y] - mean);
      }
      best = std::max(best, dev / sw / scan.radius[g]);
    }
    out[x] = best;
  }
  return out;
}

BoundaryFunction grand_maximal_dual(const MetricMeasureSpace& X, const BoundaryFunction& f,
                                    bool centered) {
  check_sizes(X, f);
  const int m = X.n();
  std::vector<int> rank = value_ranks(f);
  std::vector<double> sorted_f(m);
  for (int i = 0; i < m; ++i) sorted_f[rank[i]] = f[i];
  BoundaryFunction out(m, 0.0);

  for (int z = 0; z < m; ++z) {
    BallScan scan(X, z);
    const int G = scan.groups();
    MedianAccum acc(m);
    std::vector<double> val(G, 0.0);
    int k = 0;
    for (int g = 0; g < G; ++g) {
      for (; k < scan.group_end[g]; ++k) {
        int y = scan.order[k];
        acc.add(rank[y], X.weight[y], f[y]);
      }
      if (g == 0 && scan.radius[0] <= kTieTol) continue;
      int mr = acc.median_rank();
      double c = sorted_f[mr];
      val[g] = acc.abs_dev(mr, c) / acc.total_w / scan.radius[g];
    }
    if (centered) {
      out[z] = *std::max_element(val.begin(), val.end());
    } else {
      for (int g = G - 2; g >= 0; --g) val[g] = std::max(val[g], val[g + 1]);
      for (int x = 0; x < m; ++x) out[x] = std::max(out[x], val[scan.group_of[x]]);
    }
  }
  return out;
}

GradientPair hajlasz_gradient(const MetricMeasureSpace& X, const BoundaryFunction& f, double p,
                              GradMethod method) {
  check_sizes(X, f);
  const int m = X.n();
  GradientPair pair;
  pair.f = f;

  if (method == GradMethod::kLpExact) {
    if (p != 1.0) throw std::invalid_argument("lp_exact gradient requires p = 1");
    if (m > kLpMaxPoints)
      throw std::invalid_argument("lp_exact gradient limited to spaces with <= " +
                                  std::to_string(kLpMaxPoints) + " points (got " +
                                  std::to_string(m) + ")");
    std::vector<PairConstraint> cons;
    cons.reserve(static_cast<size_t>(m) * (m - 1) / 2);
    for (int i = 0; i < m; ++i)
      for (int j = i + 1; j < m; ++j) {
        double d = X.dist(i, j);
        double df = std::abs(f[i] - f[j]);
        if (df <= 0) continue;
        if (d <= kTieTol)
          throw std::invalid_argument("distinct values at zero distance: not a function on X");
        cons.push_back({i, j, df / d});
      }
    pair.grad = solve_pair_covering_lp(X.weight, cons);
    // lift by the residual violation so the certificate is exact
    double viol = 0.0;
    for (const auto& c : cons)
      viol = std::max(viol, c.w - pair.grad[c.i] - pair.grad[c.j]);
    if (viol > 0)
      for (double& g : pair.grad) g += 0.5 * viol * (1.0 + 1e-12);
  } else {
    BoundaryFunction sharp = calderon_sharp(X, f);
    double C = 0.0;
    for (int i = 0; i < m; ++i)
      for (int j = i + 1; j < m; ++j) {
        double d = X.dist(i, j);
        double df = std::abs(f[i] - f[j]);
        if (df <= 0) continue;
        if (d <= kTieTol)
          throw std::invalid_argument("distinct values at zero distance: not a function on X");
        double den = d * (sharp[i] + sharp[j]);
        if (den <= 0) throw std::runtime_error("vanishing sharp function on nonconstant data");
        C = std::max(C, df / den);
      }
    C *= 1.0 + 1e-12;
    pair.grad.resize(m);
    for (int i = 0; i < m; ++i) pair.grad[i] = C * sharp[i];
  }
  pair.certified = hajlasz_certified(X, pair.f, pair.grad);
  return pair;
}

double poincare_check(const MetricMeasureSpace& X, const GradientPair& pair, double p,
                      PoincareVariant variant, Ball B) {
  check_sizes(X, pair.f);
  const int m = X.n();
  const auto& f = pair.f;
  const auto& g = pair.grad;

  if (variant == PoincareVariant::kZeroMean) {
    if (p < 1.0) throw std::invalid_argument("zero-mean Poincare requires p >= 1");
    auto powp = [p](double v) {
      if (p == 1.0) return v;
      if (p == 2.0) return v * v;
      return std::pow(v, p);
    };
    std::vector<double> gp(m);
    for (int i = 0; i < m; ++i) gp[i] = powp(g[i]);
    double best = 0.0;
    for (int x = 0; x < m; ++x) {
      BallScan scan(X, x);
      int k = 0;
      double sw = 0.0, sf = 0.0, sg = 0.0;
      for (int gi = 0; gi < scan.groups(); ++gi) {
        for (; k < scan.group_end[gi]; ++k) {
          int y = scan.order[k];
          sw += X.weight[y];
          sf += X.weight[y] * f[y];
          sg += X.weight[y] * gp[y];
        }
        if (gi == 0 && scan.radius[0] <= kTieTol) continue;
        const double mean = sf / sw;
        double lhs = 0.0;
        for (int l = 0; l < scan.group_end[gi]; ++l) {
          int y = scan.order[l];
          lhs += X.weight[y] * powp(std::abs(f[y] - mean));
        }
        const double rhs = sg * powp(scan.radius[gi]);
        if (lhs <= 0) continue;
        if (rhs <= 0) return kInf;
        best = std::max(best, lhs / rhs);
      }
    }
    return best;
  }

  // compact support variant on the given ball
  if (!(p > 0)) throw std::invalid_argument("compact-support Poincare requires p > 0");
  if (B.center < 0 || B.center >= m) throw std::invalid_argument("ball center out of range");
  const double lam = X.lambda;
  double lhs = 0.0, rhs = 0.0;
  bool lam_ball_is_all = true;
  for (int y = 0; y < m; ++y) {
    double d = X.dist(B.center, y);
    bool in_b = d <= B.radius + kTieTol;
    bool in_lam = d <= lam * B.radius + kTieTol;
    if (!in_lam) lam_ball_is_all = false;
    if (!in_b && std::abs(f[y]) > kTieTol)
      throw std::invalid_argument("compact-support Poincare: f not supported in B");
    if (in_b) lhs += X.weight[y] * std::pow(std::abs(f[y]), p);
    if (in_lam) rhs += X.weight[y] * std::pow(g[y], p);
  }
  if (lam_ball_is_all)
    throw std::invalid_argument("compact-support Poincare requires lambda B != X");
  rhs *= std::pow(B.radius, p);
  if (lhs <= 0) return 0.0;
  if (rhs <= 0) return kInf;
  return lhs / rhs;
}

double lp_norm(const MetricMeasureSpace& X, const BoundaryFunction& f, double p) {
  check_sizes(X, f);
  double s = 0.0;
  for (int i = 0; i < X.n(); ++i) s += X.weight[i] * std::pow(std::abs(f[i]), p);
  return std::pow(s, 1.0 / p);
}

double linf_norm(const BoundaryFunction& f) {
  double s = 0.0;
  for (double v : f) s = std::max(s, std::abs(v));
  return s;
}

double mtau_norm(const MetricMeasureSpace& X, const GradientPair& pair, double p, double tau) {
  double g = lp_norm(X, pair.grad, p);
  if (std::isinf(tau)) return g;
  return lp_norm(X, pair.f, p) / tau + g;
}

double weighted_median(std::vector<double> values, std::vector<double> weights) {
  if (values.empty()) throw std::invalid_argument("weighted_median of empty data");
  std::vector<int> idx(values.size());
  std::iota(idx.begin(), idx.end(), 0);
  std::stable_sort(idx.begin(), idx.end(), [&](int a, int b) { return values[a] < values[b]; });
  double total = std::accumulate(weights.begin(), weights.end(), 0.0);
  double acc = 0.0;
  for (int i : idx) {
    acc += weights[i];
    if (acc >= 0.5 * total - 1e-300) return values[i];
  }
  return values[idx.back()];
}

}  // namespace roughbv
