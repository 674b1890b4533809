#include "fvlab/oracle.hpp"

#include <algorithm>
#include <cmath>

#include "fvlab/coupling.hpp"
#include "fvlab/simulator.hpp"

namespace fvlab {

double binomial(long n, long k) {
  if (k < 0 || k > n) return 0.0;
  k = std::min(k, n - k);
  double r = 1.0;
  for (long i = 1; i <= k; ++i) r = r * double(n - k + i) / double(i);
  return std::round(r);
}

int EnumeratedSpace::find(const Configuration& eta) const {
  auto it = index.find(eta);
  if (it == index.end()) throw InvalidModel("configuration not in the enumerated space");
  return it->second;
}

namespace {

void enumerate_rec(int site, int remaining, Configuration& current, EnumeratedSpace& out) {
  const int K = static_cast<int>(current.size());
  if (site == K - 1) {
    current[site] = remaining;
    out.index.emplace(current, out.size());
    out.configs.push_back(current);
    return;
  }
  for (int n = remaining; n >= 0; --n) {
    current[site] = n;
    enumerate_rec(site + 1, remaining - n, current, out);
  }
}

void require_dense(long n, long limit, const char* what) {
  if (n > limit)
    throw InvalidModel(std::string(what) + ": size " + std::to_string(n) + " exceeds the limit " +
                       std::to_string(limit));
}

// Chunked Poisson mixture of powers of P = I + A / c. `step` maps x to xP
// (or Px); chunk lengths keep c*h <= 30 so the Poisson weights stay in range.
template <class Vec, class Step>
Vec uniformize(const Eigen::MatrixXd& A, Vec v, double t, Step step) {
  if (t < 0.0) throw InvalidModel("uniformization requires t >= 0");
  const double c = 1.01 * A.diagonal().cwiseAbs().maxCoeff();
  if (t == 0.0 || c == 0.0) return v;
  const Eigen::MatrixXd P = Eigen::MatrixXd::Identity(A.rows(), A.cols()) + A / c;
  const int chunks = std::max(1, static_cast<int>(std::ceil(c * t / 30.0)));
  const double lam = c * t / chunks;
  const int cap = static_cast<int>(lam + 20.0 * std::sqrt(lam) + 60.0);
  for (int s = 0; s < chunks; ++s) {
    double w = std::exp(-lam);
    double mass = w;
    Vec term = v;
    Vec acc = w * v;
    for (int n = 1; n <= cap && 1.0 - mass > 1e-14; ++n) {
      term = step(P, term);
      w *= lam / n;
      mass += w;
      acc += w * term;
    }
    v = acc;
  }
  return v;
}

}  // namespace

EnumeratedSpace enumerate_configurations(int K, int N) {
  if (K < 1 || N < 0) throw InvalidModel("enumerate_configurations: need K >= 1, N >= 0");
  const double count = binomial(N + K - 1, K - 1);
  if (count > double(kMaxEnumeration))
    throw InvalidModel("enumerate_configurations: |E| exceeds the enumeration guard");
  EnumeratedSpace out;
  out.K = K;
  out.N = N;
  out.configs.reserve(static_cast<std::size_t>(count));
  Configuration current(K, 0);
  enumerate_rec(0, N, current, out);
  return out;
}

Eigen::MatrixXd generator_matrix(const Model& model, int N, const EnumeratedSpace& space) {
  require_dense(space.size(), kMaxDenseGenerator, "generator_matrix");
  const int n = space.size();
  Eigen::MatrixXd L = Eigen::MatrixXd::Zero(n, n);
  for (int a = 0; a < n; ++a) {
    const auto& eta = space.configs[a];
    for (const auto& mv : transition_rates(model, N, eta)) {
      Configuration next = eta;
      --next[mv.from];
      ++next[mv.to];
      const int b = space.find(next);
      L(a, b) += mv.rate;
      L(a, a) -= mv.rate;
    }
  }
  return L;
}

Eigen::MatrixXd generator_matrix(const Model& model, int N) {
  return generator_matrix(model, N, enumerate_configurations(model.K, N));
}

Eigen::MatrixXd coupled_generator_matrix(const Model& model, int N, const EnumeratedSpace& space) {
  const long n = space.size();
  require_dense(n * n, kMaxDenseGenerator, "coupled_generator_matrix");
  Eigen::MatrixXd L = Eigen::MatrixXd::Zero(n * n, n * n);
  for (int a = 0; a < n; ++a) {
    for (int b = 0; b < n; ++b) {
      const CoupledPair pair{space.configs[a], space.configs[b]};
      const long from = a * n + b;
      for (const auto& mv : coupled_rates(model, N, pair)) {
        Configuration x = pair.eta, y = pair.eta_prime;
        --x[mv.i];
        ++x[mv.j];
        --y[mv.ip];
        ++y[mv.jp];
        const long to = space.find(x) * n + space.find(y);
        L(from, to) += mv.rate;
        L(from, from) -= mv.rate;
      }
    }
  }
  return L;
}

Eigen::VectorXd stationary_exact(const Eigen::MatrixXd& generator) {
  const long n = generator.rows();
  require_dense(n, kMaxDenseGenerator, "stationary_exact");
  // pi L = 0 with the last balance equation replaced by normalization.
  Eigen::MatrixXd A = generator.transpose();
  A.row(n - 1).setOnes();
  Eigen::VectorXd rhs = Eigen::VectorXd::Zero(n);
  rhs(n - 1) = 1.0;
  Eigen::FullPivLU<Eigen::MatrixXd> lu(A);
  if (lu.rank() < n) throw InvalidModel("stationary_exact: generator null space is not one-dimensional");
  Eigen::VectorXd pi = lu.solve(rhs);
  const double residual = (pi.transpose() * generator).cwiseAbs().maxCoeff();
  if (residual > 1e-10 * std::max(1.0, generator.cwiseAbs().maxCoeff()))
    throw InvalidModel("stationary_exact: residual above tolerance");
  return pi;
}

Eigen::VectorXd stationary_exact(const Model& model, int N) {
  return stationary_exact(generator_matrix(model, N));
}

Eigen::RowVectorXd evolve_distribution(const Eigen::MatrixXd& A, const Eigen::RowVectorXd& v, double t) {
  return uniformize(A, v, t, [](const Eigen::MatrixXd& P, const Eigen::RowVectorXd& x) {
    return Eigen::RowVectorXd(x * P);
  });
}

Eigen::VectorXd apply_semigroup(const Eigen::MatrixXd& A, const Eigen::VectorXd& f, double t) {
  return uniformize(A, f, t, [](const Eigen::MatrixXd& P, const Eigen::VectorXd& x) {
    return Eigen::VectorXd(P * x);
  });
}

double transient_covariance(const Model& model, int N, const Configuration& eta0, int k, int l,
                            double t) {
  const auto space = enumerate_configurations(model.K, N);
  const auto L = generator_matrix(model, N, space);
  Eigen::RowVectorXd p = Eigen::RowVectorXd::Zero(space.size());
  p(space.find(eta0)) = 1.0;
  p = evolve_distribution(L, p, t);
  double ek = 0.0, el = 0.0, ekl = 0.0;
  for (int a = 0; a < space.size(); ++a) {
    const auto& eta = space.configs[a];
    ek += p(a) * eta[k];
    el += p(a) * eta[l];
    ekl += p(a) * eta[k] * eta[l];
  }
  return ekl - ek * el;
}

Eigen::VectorXd spectrum(const Eigen::MatrixXd& A) {
  require_dense(A.rows(), kMaxSpectrumSize, "spectrum");
  Eigen::EigenSolver<Eigen::MatrixXd> solver(A, false);
  if (solver.info() != Eigen::Success) throw InvalidModel("spectrum: eigensolver failed");
  Eigen::VectorXd ev = solver.eigenvalues().real();
  std::sort(ev.data(), ev.data() + ev.size());
  return ev;
}

Eigen::VectorXd reversible_spectrum(const Eigen::MatrixXd& A, const Eigen::VectorXd& pi) {
  const long n = A.rows();
  require_dense(n, kMaxSpectrumSize, "reversible_spectrum");
  const Eigen::VectorXd s = pi.cwiseSqrt();
  Eigen::MatrixXd S = s.asDiagonal() * A * s.cwiseInverse().asDiagonal();
  S = 0.5 * (S + S.transpose()).eval();

  bool tridiagonal = true;
  for (long r = 0; r < n && tridiagonal; ++r)
    for (long c = 0; c < n; ++c)
      if (std::abs(r - c) > 1 && S(r, c) != 0.0) {
        tridiagonal = false;
        break;
      }

  Eigen::VectorXd ev;
  if (tridiagonal && n > 1) {
    Eigen::VectorXd diag = S.diagonal();
    Eigen::VectorXd off(n - 1);
    for (long r = 0; r + 1 < n; ++r) off(r) = S(r, r + 1);
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver;
    solver.computeFromTridiagonal(diag, off, Eigen::EigenvaluesOnly);
    ev = solver.eigenvalues();
  } else {
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(S, Eigen::EigenvaluesOnly);
    ev = solver.eigenvalues();
  }
  std::sort(ev.data(), ev.data() + ev.size());
  return ev;
}

double carre_du_champ(const Model& model, int N, const std::function<double(const Configuration&)>& f,
                      const Configuration& eta) {
  const double base = f(eta);
  double s = 0.0;
  for (const auto& mv : transition_rates(model, N, eta)) {
    Configuration next = eta;
    --next[mv.from];
    ++next[mv.to];
    const double d = f(next) - base;
    s += mv.rate * d * d;
  }
  return s;
}

Eigen::VectorXd carre_du_champ_from_generator(const Eigen::MatrixXd& generator, const Eigen::VectorXd& f) {
  const Eigen::VectorXd f2 = f.cwiseProduct(f);
  return generator * f2 - 2.0 * f.cwiseProduct(generator * f);
}

}  // namespace fvlab
