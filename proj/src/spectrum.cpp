#include "fredholm/spectrum.hpp"

#include "fredholm/errors.hpp"

#include <Eigen/Eigenvalues>
#include <Eigen/SVD>

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <exception>
#include <sstream>
#include <thread>

namespace fredholm {

std::string format_double(double x) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

ShiftedEigen solve_shifted_eigen(const ShiftedForm& shifted, const Matrix& M) {
  const Matrix& S = shifted.S();
  if (M.rows() != S.rows() || M.cols() != S.cols())
    throw Error(ErrorKind::DimensionMismatch, "solve_shifted_eigen: M does not match S");

  // Cholesky of M, reduction to a standard symmetric problem, back-transform.
  Eigen::GeneralizedSelfAdjointEigenSolver<Matrix> ges(S, M, Eigen::ComputeEigenvectors | Eigen::Ax_lBx);
  if (ges.info() != Eigen::Success)
    throw Error(ErrorKind::EigenFailure, "generalized symmetric eigensolve did not converge");

  ShiftedEigen out{ges.eigenvalues(), ges.eigenvectors()};
  for (Eigen::Index k = 0; k < out.mu_tilde.size(); ++k) {
    if (!(out.mu_tilde(k) > 0.0)) {
      std::ostringstream os;
      os << "nonpositive shifted eigenvalue " << out.mu_tilde(k) << " at index " << k;
      throw Error(ErrorKind::EigenFailure, os.str(), out.mu_tilde(k));
    }
    auto v = out.vectors.col(k);
    v /= std::sqrt(v.dot(S * v));
  }
  return out;
}

namespace {

bool sign_is_negative(const Eigen::Ref<const Vector>& v) {
  Eigen::Index best = 0;
  for (Eigen::Index i = 1; i < v.size(); ++i)
    if (std::abs(v(i)) > std::abs(v(best))) best = i;
  return v.size() > 0 && v(best) < 0.0;
}

}  // namespace

void fix_sign(Eigen::Ref<Vector> v) {
  if (sign_is_negative(v)) v = -v;
}

SpectralData canonical_data_with_shift(const FormTriple& triple, double lambda, double tau) {
  const ShiftedForm shifted = shifted_form(triple, lambda, tau);
  const ShiftedEigen eig = solve_shifted_eigen(shifted, triple.M());

  SpectralData out;
  out.lambda = lambda;
  out.tau = tau;
  out.mu_tilde = eig.mu_tilde;
  out.mu = eig.mu_tilde.array() - tau;
  out.E_shift = eig.vectors;
  out.E_canon = eig.vectors;
  for (Eigen::Index k = 0; k < out.mu.size(); ++k) {
    out.E_canon.col(k) *= std::sqrt(out.mu_tilde(k));
    if (sign_is_negative(out.E_canon.col(k))) {
      out.E_canon.col(k) = -out.E_canon.col(k);
      out.E_shift.col(k) = -out.E_shift.col(k);
    }
  }
  return out;
}

SpectralData canonical_data(const FormTriple& triple, double lambda) {
  const ShiftedForm shifted = find_coercive_shift(triple, lambda);
  return canonical_data_with_shift(triple, lambda, shifted.tau());
}

std::vector<Cluster> clusters(const Vector& mu, double tol) {
  std::vector<Cluster> out;
  Eigen::Index first = 0;
  for (Eigen::Index k = 1; k <= mu.size(); ++k) {
    const bool split =
        k == mu.size() || std::abs(mu(k) - mu(k - 1)) > tol * (1.0 + std::abs(mu(k - 1)));
    if (split) {
      out.push_back({first, k});
      first = k;
    }
  }
  return out;
}

namespace {

// sin of the largest principal angle between the spans of two m-orthonormal
// column sets, i.e. the m-operator-norm distance of their projectors.
double projector_distance(const Matrix& L_t, const Matrix& E1, const Matrix& E2) {
  const Matrix X1 = L_t * E1;
  const Matrix X2 = L_t * E2;
  const Matrix R2 = X2 - X1 * (X1.transpose() * X2);
  const Matrix R1 = X1 - X2 * (X2.transpose() * X1);
  Eigen::JacobiSVD<Matrix> s1(R1), s2(R2);
  return std::max(s1.singularValues()(0), s2.singularValues()(0));
}

}  // namespace

InvarianceReport verify_tau_invariance(const FormTriple& triple, double lambda, double tau1,
                                       double tau2) {
  const SpectralData d1 = canonical_data_with_shift(triple, lambda, tau1);
  const SpectralData d2 = canonical_data_with_shift(triple, lambda, tau2);

  InvarianceReport r;
  r.tau1 = tau1;
  r.tau2 = tau2;
  const Eigen::Index n = d1.size();
  for (Eigen::Index k = 0; k < n; ++k) {
    r.max_mu_diff = std::max(r.max_mu_diff, std::abs(d1.mu(k) - d2.mu(k)) / (1.0 + std::abs(d1.mu(k))));
    const double rel = d2.mu_tilde(k) - d1.mu_tilde(k) - (tau2 - tau1);
    r.max_shift_relation_err =
        std::max(r.max_shift_relation_err, std::abs(rel) / (1.0 + std::abs(d1.mu_tilde(k))));
  }

  const Matrix L_t = Eigen::LLT<Matrix>(triple.M()).matrixU();
  for (const Cluster& c : clusters(d1.mu)) {
    const auto width = c.last - c.first;
    if (width == 1) {
      const auto a = d1.E_canon.col(c.first);
      const auto b = d2.E_canon.col(c.first);
      r.max_vector_diff = std::max(r.max_vector_diff, std::min((a - b).norm(), (a + b).norm()));
    }
    r.max_projector_diff =
        std::max(r.max_projector_diff, projector_distance(L_t, d1.E_canon.middleCols(c.first, width),
                                                          d2.E_canon.middleCols(c.first, width)));
  }

  r.mu_pass = r.max_mu_diff <= kTauMuTol;
  r.shift_relation_pass = r.max_shift_relation_err <= kTauShiftTol;
  r.vector_pass = r.max_vector_diff <= kTauVectorTol;
  r.projector_pass = r.max_projector_diff <= kTauVectorTol;
  r.pass = r.mu_pass && r.shift_relation_pass && r.vector_pass && r.projector_pass;
  return r;
}

namespace {

unsigned thread_cap(unsigned requested) {
  if (requested > 0) return requested;
  unsigned cap = std::max(1u, std::thread::hardware_concurrency());
  if (const char* env = std::getenv("FREDHOLM_THREADS")) {
    const long v = std::strtol(env, nullptr, 10);
    if (v >= 1) cap = std::min(cap, static_cast<unsigned>(v));
  }
  return cap;
}

}  // namespace

EigencurveTable trace_eigencurves(const FormTriple& triple, const std::vector<double>& lambda_grid,
                                  int K, unsigned max_threads) {
  if (lambda_grid.empty()) throw Error(ErrorKind::InvalidArgument, "trace_eigencurves: empty lambda grid");
  if (K < 1 || K > triple.dim()) {
    std::ostringstream os;
    os << "trace_eigencurves: K=" << K << " must lie in [1, " << triple.dim() << "]";
    throw Error(ErrorKind::InvalidArgument, os.str());
  }
  for (std::size_t i = 1; i < lambda_grid.size(); ++i)
    if (!(lambda_grid[i] > lambda_grid[i - 1]))
      throw Error(ErrorKind::InvalidArgument, "trace_eigencurves: lambda grid must be ascending");

  const std::size_t npts = lambda_grid.size();
  std::vector<Vector> mus(npts);
  std::vector<std::exception_ptr> errors(npts);
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t i = next++; i < npts; i = next++) {
      try {
        mus[i] = canonical_data(triple, lambda_grid[i]).mu.head(K);
      } catch (...) {
        errors[i] = std::current_exception();
      }
    }
  };
  const unsigned nthreads = std::min<unsigned>(thread_cap(max_threads), static_cast<unsigned>(npts));
  std::vector<std::thread> pool;
  for (unsigned t = 1; t < nthreads; ++t) pool.emplace_back(worker);
  worker();
  for (auto& th : pool) th.join();

  for (std::size_t i = 0; i < npts; ++i) {
    if (!errors[i]) continue;
    try {
      std::rethrow_exception(errors[i]);
    } catch (const Error& e) {
      std::ostringstream os;
      os << "at lambda=" << format_double(lambda_grid[i]) << ": " << e.what();
      throw Error(e.kind(), os.str(), lambda_grid[i]);
    }
  }

  EigencurveTable table;
  table.grid = lambda_grid;
  table.K = K;
  table.rows.reserve(npts * static_cast<std::size_t>(K));
  for (std::size_t i = 0; i < npts; ++i)
    for (int k = 0; k < K; ++k) table.rows.push_back({lambda_grid[i], k + 1, mus[i](k)});
  return table;
}

std::string to_csv(const EigencurveTable& table) {
  std::string out = "lambda,k,mu\n";
  for (const auto& row : table.rows) {
    out += format_double(row.lambda);
    out += ',';
    out += std::to_string(row.k);
    out += ',';
    out += format_double(row.mu);
    out += '\n';
  }
  return out;
}

ResonanceGroup resonance_group(const SpectralData& spectral, double mu, double tol) {
  if (!(tol > 0.0)) throw Error(ErrorKind::InvalidArgument, "resonance_group: tol must be positive");
  const double band = tol * (1.0 + std::abs(mu));

  ResonanceGroup g;
  g.lambda = spectral.lambda;
  g.mu = mu;
  g.tol_used = tol;
  for (Eigen::Index k = 0; k < spectral.size(); ++k) {
    const double d = std::abs(spectral.mu(k) - mu);
    if (d <= band) {
      g.J.push_back(k);
    } else if (d <= 10.0 * band) {
      std::ostringstream os;
      os << "mu_" << k + 1 << "=" << format_double(spectral.mu(k)) << " lies within 10x the resonance tolerance of mu="
         << format_double(mu) << "; refine tol";
      throw Error(ErrorKind::AmbiguousResonance, os.str(), spectral.mu(k));
    }
  }

  if (!g.J.empty()) {
    // Widen to whole clusters so E_basis spans the full eigenspace.
    std::vector<Eigen::Index> widened;
    for (const Cluster& c : clusters(spectral.mu)) {
      const bool hit = std::any_of(g.J.begin(), g.J.end(),
                                   [&](Eigen::Index k) { return k >= c.first && k < c.last; });
      if (hit)
        for (auto k = c.first; k < c.last; ++k) widened.push_back(k);
    }
    g.J = std::move(widened);
    for (auto k : g.J)
      g.tol_used = std::max(g.tol_used, std::abs(spectral.mu(k) - mu) / (1.0 + std::abs(mu)));
  }

  g.E_basis.resize(spectral.E_canon.rows(), static_cast<Eigen::Index>(g.J.size()));
  for (std::size_t j = 0; j < g.J.size(); ++j) g.E_basis.col(static_cast<Eigen::Index>(j)) = spectral.E_canon.col(g.J[j]);
  return g;
}

}  // namespace fredholm
