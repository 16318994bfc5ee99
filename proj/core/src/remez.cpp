#include <Eigen/Dense>

#include <algorithm>
#include <limits>
#include <cmath>
#include <numbers>
#include <string>
#include <utility>
#include <vector>

#include "divest/approx.hpp"

namespace divest::approx {

namespace {

// The exchange works on t in [-1, 1] in the Chebyshev basis; conversion to
// the monomial basis of the raw variable happens once, at the end.
struct Mapping {
  Interval dom;
  double to_x(double t) const noexcept {
    if (t <= -1.0) return dom.lo;
    if (t >= 1.0) return dom.hi;
    return dom.lo + dom.width() * (t + 1.0) * 0.5;
  }
};

double clenshaw(const std::vector<double>& c, double t) noexcept {
  double b1 = 0.0, b2 = 0.0;
  for (std::size_t k = c.size(); k-- > 1;) {
    const double b0 = 2.0 * t * b1 - b2 + c[k];
    b2 = b1;
    b1 = b0;
  }
  return t * b1 - b2 + c[0];
}

struct Extremum {
  double t;
  double err;
};

struct LevelledSolution {
  std::vector<double> cheb;  // K+1 Chebyshev coefficients
  double levelled;           // signed E
};

LevelledSolution solve_levelled(const std::vector<double>& ref, const std::vector<double>& fvals,
                                int degree) {
  const int n = degree + 2;
  Eigen::MatrixXd a(n, n);
  Eigen::VectorXd b(n);
  for (int i = 0; i < n; ++i) {
    const double t = ref[i];
    double tkm1 = 1.0, tk = t;
    a(i, 0) = 1.0;
    if (degree >= 1) a(i, 1) = t;
    for (int k = 2; k <= degree; ++k) {
      const double next = 2.0 * t * tk - tkm1;
      tkm1 = tk;
      tk = next;
      a(i, k) = tk;
    }
    a(i, degree + 1) = (i % 2 == 0) ? 1.0 : -1.0;
    b(i) = fvals[i];
  }
  const Eigen::VectorXd sol = a.partialPivLu().solve(b);
  LevelledSolution out;
  out.cheb.assign(sol.data(), sol.data() + degree + 1);
  out.levelled = sol(degree + 1);
  return out;
}

template <typename G>
std::pair<double, double> golden_max(const G& g, double a, double b) {
  constexpr double kInvPhi = 0.6180339887498949;
  double c = b - kInvPhi * (b - a);
  double d = a + kInvPhi * (b - a);
  double gc = g(c), gd = g(d);
  for (int it = 0; it < 200 && (b - a) > 1e-15 * (1.0 + std::abs(a) + std::abs(b)); ++it) {
    if (gc > gd) {
      b = d;
      d = c;
      gd = gc;
      c = b - kInvPhi * (b - a);
      gc = g(c);
    } else {
      a = c;
      c = d;
      gc = gd;
      d = a + kInvPhi * (b - a);
      gd = g(d);
    }
  }
  return gc > gd ? std::pair{c, gc} : std::pair{d, gd};
}

// One local extremum of the error per maximal run of constant sign on a grid
// oversampled between consecutive reference points.
template <typename E>
std::vector<Extremum> locate_extrema(const E& err, const std::vector<double>& ref, int oversample) {
  std::vector<double> breaks;
  breaks.reserve(ref.size() + 2);
  breaks.push_back(-1.0);
  for (double t : ref) {
    if (t > breaks.back()) breaks.push_back(t);
  }
  if (breaks.back() < 1.0) breaks.push_back(1.0);

  std::vector<double> grid;
  grid.reserve((breaks.size() - 1) * oversample + 1);
  for (std::size_t i = 0; i + 1 < breaks.size(); ++i) {
    const double a = breaks[i], b = breaks[i + 1];
    for (int j = 0; j < oversample; ++j) grid.push_back(a + (b - a) * j / oversample);
  }
  grid.push_back(1.0);

  std::vector<double> vals(grid.size());
  for (std::size_t i = 0; i < grid.size(); ++i) vals[i] = err(grid[i]);

  std::vector<Extremum> out;
  std::size_t i = 0;
  int prev_sign = 0;
  while (i < grid.size()) {
    int sign = (vals[i] > 0) - (vals[i] < 0);
    if (sign == 0) sign = prev_sign == 0 ? 1 : prev_sign;
    std::size_t best = i, j = i;
    while (j < grid.size()) {
      int sj = (vals[j] > 0) - (vals[j] < 0);
      if (sj != 0 && sj != sign) break;
      if (std::abs(vals[j]) > std::abs(vals[best])) best = j;
      ++j;
    }
    const double lo = grid[best == 0 ? 0 : best - 1];
    const double hi = grid[std::min(best + 1, grid.size() - 1)];
    Extremum ext{grid[best], vals[best]};
    if (hi > lo) {
      const double s = static_cast<double>(sign);
      auto [t, v] = golden_max([&](double t) { return s * err(t); }, lo, hi);
      if (v > s * ext.err) ext = {t, s * v};
    }
    out.push_back(ext);
    prev_sign = sign;
    i = j;
  }
  return out;
}

// Reduce an alternating list of extrema to exactly n points, never dropping
// the global maximum and preserving alternation.
void trim_extrema(std::vector<Extremum>& ex, std::size_t n) {
  while (ex.size() > n) {
    if (ex.size() - n == 1) {
      if (std::abs(ex.front().err) < std::abs(ex.back().err)) {
        ex.erase(ex.begin());
      } else {
        ex.pop_back();
      }
      continue;
    }
    std::size_t imin = 0;
    for (std::size_t i = 1; i < ex.size(); ++i) {
      if (std::abs(ex[i].err) < std::abs(ex[imin].err)) imin = i;
    }
    if (imin == 0 || imin + 1 == ex.size()) {
      ex.erase(ex.begin() + static_cast<std::ptrdiff_t>(imin));
    } else {
      const std::size_t nb =
          std::abs(ex[imin - 1].err) < std::abs(ex[imin + 1].err) ? imin - 1 : imin + 1;
      const std::size_t first = std::min(imin, nb);
      ex.erase(ex.begin() + static_cast<std::ptrdiff_t>(first),
               ex.begin() + static_cast<std::ptrdiff_t>(first + 2));
    }
  }
}

Polynomial to_monomial(const std::vector<double>& cheb, Interval dom) {
  const std::size_t n = cheb.size();
  // Monomial coefficients in t.
  std::vector<long double> pt(n, 0.0L);
  std::vector<long double> tprev(n, 0.0L), tcur(n, 0.0L), tnext(n, 0.0L);
  tprev[0] = 1.0L;
  pt[0] += cheb[0];
  if (n > 1) {
    tcur[1] = 1.0L;
    pt[1] += cheb[1];
  }
  for (std::size_t k = 2; k < n; ++k) {
    std::fill(tnext.begin(), tnext.end(), 0.0L);
    for (std::size_t j = 0; j + 1 < n; ++j) tnext[j + 1] += 2.0L * tcur[j];
    for (std::size_t j = 0; j < n; ++j) tnext[j] -= tprev[j];
    for (std::size_t j = 0; j <= k; ++j) pt[j] += static_cast<long double>(cheb[k]) * tnext[j];
    std::swap(tprev, tcur);
    std::swap(tcur, tnext);
  }
  // Substitute t = alpha x + beta.
  const long double alpha = 2.0L / (static_cast<long double>(dom.hi) - dom.lo);
  const long double beta =
      -(static_cast<long double>(dom.hi) + dom.lo) / (static_cast<long double>(dom.hi) - dom.lo);
  std::vector<long double> px(n, 0.0L);
  px[0] = pt[n - 1];
  std::size_t deg = 0;
  for (std::size_t k = n - 1; k-- > 0;) {
    std::vector<long double> next(n, 0.0L);
    for (std::size_t j = 0; j <= deg; ++j) {
      next[j + 1] += alpha * px[j];
      next[j] += beta * px[j];
    }
    next[0] += pt[k];
    px = std::move(next);
    ++deg;
  }
  return Polynomial{std::move(px), dom};
}

}  // namespace

ApproxResult remez_best_approx(const RealFunction& f, int degree, Interval domain,
                               const RemezOptions& options) {
  domain = Interval::checked(domain.lo, domain.hi);
  if (degree < 0) throw Error(Errc::kInvalidParams, "degree must be >= 0");
  if (!(options.tol > 0.0)) throw Error(Errc::kInvalidParams, "tol must be > 0");
  if (options.oversample < 2) throw Error(Errc::kInvalidParams, "oversample must be >= 2");

  const Mapping map{domain};
  const int n = degree + 2;
  std::vector<double> ref(n);
  for (int i = 0; i < n; ++i) ref[i] = -std::cos(std::numbers::pi * i / (n - 1));

  auto fx = [&](double t) { return f(map.to_x(t)); };

  double fscale = 0.0;
  for (int i = 0; i <= 64; ++i) fscale = std::max(fscale, std::abs(fx(-1.0 + 2.0 * i / 64)));
  const double exact_floor = 64.0 * std::numeric_limits<double>::epsilon() * std::max(1.0, fscale);
  // Spread of the reference errors cannot be resolved below a few ulps of f.
  const double noise_floor = 16.0 * std::numeric_limits<double>::epsilon() * std::max(1.0, fscale);

  ApproxResult result;
  double spread = 0.0;
  std::vector<double> fvals(n);
  for (int iter = 1; iter <= options.max_iterations; ++iter) {
    for (int i = 0; i < n; ++i) fvals[i] = fx(ref[i]);
    const LevelledSolution sol = solve_levelled(ref, fvals, degree);
    auto err = [&](double t) { return fx(t) - clenshaw(sol.cheb, t); };

    std::vector<Extremum> ex = locate_extrema(err, ref, options.oversample);
    double max_abs = 0.0;
    for (const auto& e : ex) max_abs = std::max(max_abs, std::abs(e.err));

    result.poly = to_monomial(sol.cheb, domain);
    result.iterations = iter;

    if (max_abs <= exact_floor) {
      // f is (numerically) in the approximation space.
      result.levelled_error = max_abs;
      result.equioscillation_points.clear();
      for (double t : ref) result.equioscillation_points.push_back(map.to_x(t));
      return result;
    }
    if (ex.size() < static_cast<std::size_t>(n)) {
      throw NonConvergence("error curve lost alternation at iteration " + std::to_string(iter),
                           result, 1.0);
    }
    trim_extrema(ex, static_cast<std::size_t>(n));

    double lo_abs = std::abs(ex[0].err), hi_abs = lo_abs;
    for (const auto& e : ex) {
      lo_abs = std::min(lo_abs, std::abs(e.err));
      hi_abs = std::max(hi_abs, std::abs(e.err));
    }
    spread = (hi_abs - lo_abs) / hi_abs;

    result.levelled_error = hi_abs;
    result.equioscillation_points.clear();
    for (const auto& e : ex) result.equioscillation_points.push_back(map.to_x(e.t));
    for (int i = 0; i < n; ++i) ref[i] = ex[i].t;

    if (spread < options.tol || hi_abs - lo_abs <= noise_floor) return result;
  }
  throw NonConvergence("Remez exchange did not level within " +
                           std::to_string(options.max_iterations) + " iterations",
                       result, spread);
}

}  // namespace divest::approx
