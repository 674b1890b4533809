#include "fvlab/two_point.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "fvlab/oracle.hpp"

namespace fvlab {

Model tp_model(double a, double b, double p1, double p2) {
  if (!(a > 0.0 && b > 0.0)) throw InvalidModel("two-point model requires a > 0 and b > 0");
  Eigen::MatrixXd Q(2, 2);
  Q << 0.0, a, b, 0.0;
  Eigen::VectorXd p0(2);
  p0 << p1, p2;
  return make_model(Q, p0);
}

void check_chain(const BirthDeathChain& chain) {
  if (chain.N < 1) throw InvalidModel("birth-death chain requires N >= 1");
  if (int(chain.b.size()) != chain.N || int(chain.d.size()) != chain.N)
    throw InvalidModel("birth-death chain: rate arrays must have length N");
  for (int n = 0; n < chain.N; ++n)
    if (!(chain.b[n] > 0.0) || !(chain.d[n] > 0.0))
      throw InvalidModel("birth-death chain: rates must be positive");
}

BirthDeathChain bd_marginal(double a, double b, double p1, double p2, int N) {
  if (N < 2) throw InvalidModel("bd_marginal requires N >= 2");
  BirthDeathChain c;
  c.N = N;
  c.b.resize(N);
  c.d.resize(N);
  for (int n = 0; n < N; ++n) c.b[n] = (N - n) * (b + p2 * n / (N - 1.0));
  for (int n = 1; n <= N; ++n) c.d[n - 1] = n * (a + p1 * (N - n) / (N - 1.0));
  return c;
}

Eigen::MatrixXd bd_generator(const BirthDeathChain& chain) {
  check_chain(chain);
  if (chain.N + 1 > kMaxDenseGenerator) throw InvalidModel("bd_generator: size guard exceeded");
  const int n = chain.N + 1;
  Eigen::MatrixXd G = Eigen::MatrixXd::Zero(n, n);
  for (int x = 0; x < n; ++x) {
    if (x < chain.N) G(x, x + 1) = chain.birth(x);
    if (x > 0) G(x, x - 1) = chain.death(x);
    G(x, x) = -(chain.birth(x) + chain.death(x));
  }
  return G;
}

namespace {

// log pi, normalized
Eigen::VectorXd log_invariant(const BirthDeathChain& chain) {
  check_chain(chain);
  Eigen::VectorXd lp(chain.N + 1);
  lp(0) = 0.0;
  for (int n = 1; n <= chain.N; ++n) lp(n) = lp(n - 1) + std::log(chain.birth(n - 1)) - std::log(chain.death(n));
  const double top = lp.maxCoeff();
  const double z = (lp.array() - top).exp().sum();
  return lp.array() - top - std::log(z);
}

double log_add(double x, double y) {
  if (x == -std::numeric_limits<double>::infinity()) return y;
  if (y == -std::numeric_limits<double>::infinity()) return x;
  const double m = std::max(x, y);
  return m + std::log1p(std::exp(-std::abs(x - y)));
}

}  // namespace

Eigen::VectorXd bd_invariant(const BirthDeathChain& chain) {
  Eigen::VectorXd pi = log_invariant(chain).array().exp();
  return pi / pi.sum();
}

double detailed_balance_residual(const BirthDeathChain& chain, const Eigen::VectorXd& pi) {
  double r = 0.0;
  for (int n = 0; n < chain.N; ++n) r = std::max(r, std::abs(pi(n) * chain.birth(n) - pi(n + 1) * chain.death(n + 1)));
  return r;
}

bool is_unimodal(const BirthDeathChain& chain) {
  check_chain(chain);
  for (int i = 0; i + 1 < chain.N; ++i) {
    // b_i / d_{i+1} > b_{i+1} / d_{i+2}, cross-multiplied
    if (!(chain.birth(i) * chain.death(i + 2) > chain.birth(i + 1) * chain.death(i + 1))) return false;
  }
  return true;
}

HardyPair hardy_quantities(const BirthDeathChain& chain, int i) {
  check_chain(chain);
  if (i < 0 || i > chain.N) throw InvalidModel("hardy_quantities: i out of range");
  const Eigen::VectorXd lp = log_invariant(chain);
  const int n = chain.N;
  const double ninf = -std::numeric_limits<double>::infinity();

  // log pi([x, N]) and log pi([0, x])
  std::vector<double> tail(n + 2, ninf), head(n + 1, ninf);
  for (int x = n; x >= 0; --x) tail[x] = log_add(tail[x + 1], lp(x));
  for (int x = 0; x <= n; ++x) head[x] = log_add(x > 0 ? head[x - 1] : ninf, lp(x));

  HardyPair out;
  double acc = ninf, best = ninf;
  for (int x = i + 1; x <= n; ++x) {
    acc = log_add(acc, -lp(x) - std::log(chain.death(x)));
    best = std::max(best, acc + tail[x]);
  }
  out.B_plus = i < n ? std::exp(best) : 0.0;

  acc = ninf;
  best = ninf;
  for (int x = i - 1; x >= 0; --x) {
    acc = log_add(acc, -lp(x) - std::log(chain.birth(x)));
    best = std::max(best, acc + head[x]);
  }
  out.B_minus = i > 0 ? std::exp(best) : 0.0;
  return out;
}

HardyRoots hardy_roots(double a, double b, double p1, double p2, int N) {
  if (p1 == p2) throw InvalidModel("hardy_roots requires p1 != p2");
  const double lin = N * (a + b + p1 - p2) - (a + b + 2.0 * p1);
  HardyRoots r;
  r.discriminant = lin * lin - 4.0 * (N - 1.0) * (b * N - a - p1) * (p1 - p2);
  const double sq = std::sqrt(r.discriminant);  // NaN for negative discriminant
  const double x = (lin - sq) / (2.0 * (p1 - p2));
  const double y = (lin + sq) / (2.0 * (p1 - p2));
  r.i1 = std::min(x, y);
  r.i2 = std::max(x, y);
  return r;
}

namespace {

int argmax_invariant(const BirthDeathChain& chain) {
  const Eigen::VectorXd lp = log_invariant(chain);
  int best = 0;
  for (int x = 1; x <= chain.N; ++x)
    if (lp(x) > lp(best) + 1e-12) best = x;
  return best;
}

int mode_index(double a, double b, double p1, double p2, int N, const BirthDeathChain& chain) {
  if (p1 == p2) return argmax_invariant(chain);
  if (p1 < p2) {
    // n -> N - n swaps (a, p1) with (b, p2)
    const BirthDeathChain mirror = bd_marginal(b, a, p2, p1, N);
    return N - mode_index(b, a, p2, p1, N, mirror);
  }
  const HardyRoots r = hardy_roots(a, b, p1, p2, N);
  if (!std::isfinite(r.i1)) return argmax_invariant(chain);
  return std::clamp(static_cast<int>(std::floor(r.i1)) + 1, 0, N);
}

}  // namespace

HardyReport gap_report(double a, double b, double p1, double p2, int N) {
  const BirthDeathChain chain = bd_marginal(a, b, p1, p2, N);
  check_chain(chain);
  HardyReport rep;
  const double nan = std::numeric_limits<double>::quiet_NaN();
  rep.i1 = rep.i2 = nan;
  if (p1 != p2) {
    const HardyRoots r = hardy_roots(a, b, p1, p2, N);
    rep.i1 = r.i1;
    rep.i2 = r.i2;
  }
  rep.i_star = mode_index(a, b, p1, p2, N, chain);
  const HardyPair h = hardy_quantities(chain, rep.i_star);
  rep.B_plus = h.B_plus;
  rep.B_minus = h.B_minus;
  rep.gap_lower_bound = 1.0 / (4.0 * std::max(h.B_plus, h.B_minus));
  rep.unimodal = is_unimodal(chain);
  return rep;
}

nlohmann::json to_json(const HardyReport& r) {
  auto num = [](double v) -> nlohmann::json { return std::isfinite(v) ? nlohmann::json(v) : nlohmann::json(); };
  return {{"i_star", r.i_star},       {"B_plus", r.B_plus}, {"B_minus", r.B_minus},
          {"gap_lower_bound", r.gap_lower_bound}, {"i1", num(r.i1)}, {"i2", num(r.i2)},
          {"unimodal", r.unimodal}};
}

double lambda_u(const BirthDeathChain& chain, const std::vector<double>& u) {
  check_chain(chain);
  if (int(u.size()) != chain.N) throw InvalidModel("lambda_u: weights must have length N");
  for (double w : u)
    if (!(w > 0.0)) throw InvalidModel("lambda_u: nonpositive weight");
  double best = std::numeric_limits<double>::infinity();
  for (int k = 0; k < chain.N; ++k) {
    double v = chain.death(k + 1) + chain.birth(k);
    if (k > 0) v -= chain.death(k) * u[k - 1] / u[k];
    if (k + 1 < chain.N) v -= chain.birth(k + 1) * u[k + 1] / u[k];
    best = std::min(best, v);
  }
  return best;
}

Eigen::VectorXd bd_spectrum(const BirthDeathChain& chain) {
  check_chain(chain);
  if (chain.N > kMaxBirthDeathSize) throw InvalidModel("bd_gap_exact: size guard exceeded (N <= 5000)");
  const int n = chain.N + 1;
  Eigen::VectorXd diag(n), off(n - 1);
  for (int x = 0; x < n; ++x) diag(x) = chain.birth(x) + chain.death(x);
  for (int x = 0; x + 1 < n; ++x) off(x) = -std::sqrt(chain.birth(x) * chain.death(x + 1));
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver;
  solver.computeFromTridiagonal(diag, off, Eigen::EigenvaluesOnly);
  Eigen::VectorXd ev = solver.eigenvalues();
  std::sort(ev.data(), ev.data() + ev.size());
  return ev;
}

double bd_gap_exact(const BirthDeathChain& chain) {
  return bd_spectrum(chain)(1);
}

}  // namespace fvlab
