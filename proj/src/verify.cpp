#include "fredholm/verify.hpp"

#include "fredholm/errors.hpp"
#include "fredholm/linear.hpp"
#include "fredholm/spectrum.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <functional>
#include <random>
#include <cstdio>
#include <sstream>

namespace fredholm {

std::string VerifyReport::table() const {
  std::ostringstream os;
  os << "suite      property                                  value                    tol        result\n";
  for (const auto& r : rows) {
    char line[256];
    std::snprintf(line, sizeof line, "%-10s %-41s %-24.17g %-10.3g %s", r.suite.c_str(), r.name.c_str(), r.value,
                  r.tol, r.pass ? "PASS" : "FAIL");
    os << line;
    if (!r.note.empty()) os << "  (" << r.note << ")";
    os << '\n';
  }
  os << (pass ? "all properties passed" : "some properties failed") << '\n';
  return os.str();
}

namespace {

std::string label(double x) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%g", x);
  return buf;
}

class Runner {
 public:
  Runner(const Problem& problem, const VerifyOptions& options)
      : problem_(problem), options_(options), rng_(options.seed) {}

  VerifyReport run() {
    const std::string& s = options_.suite;
    if (s != "all" && s != "spectrum" && s != "bounds" && s != "nonlinear" && s != "nemytskii")
      throw Error(ErrorKind::InvalidArgument, "unknown suite \"" + s + "\"");
    if (s == "all" || s == "spectrum") spectrum();
    if (s == "all" || s == "bounds") bounds();
    if (s == "all" || s == "nonlinear") nonlinear();
    if (s == "all" || s == "nemytskii") nemytskii();
    for (const auto& r : report_.rows) report_.pass = report_.pass && r.pass;
    return report_;
  }

 private:
  double residual_tol(double fallback) const { return options_.tol.value_or(fallback); }

  void record(const char* suite, std::string name, double value, double tol, bool pass, std::string note = {}) {
    report_.rows.push_back({suite, std::move(name), value, tol, pass, std::move(note)});
  }

  // Runs body; an exception becomes a failing row named after the property.
  void guard(const char* suite, const std::string& name, const std::function<void()>& body) {
    try {
      body();
    } catch (const std::exception& e) {
      record(suite, name, std::nan(""), 0.0, false, e.what());
    }
  }

  Vector random_vector(Eigen::Index n) {
    std::normal_distribution<double> g(0.0, 1.0);
    Vector v(n);
    for (Eigen::Index i = 0; i < n; ++i) v(i) = g(rng_);
    return v;
  }

  Matrix random_matrix(Eigen::Index n) {
    std::normal_distribution<double> g(0.0, 1.0);
    Matrix X(n, n);
    for (Eigen::Index j = 0; j < n; ++j)
      for (Eigen::Index i = 0; i < n; ++i) X(i, j) = g(rng_);
    return X;
  }

  FormTriple random_triple(Eigen::Index n) {
    const Matrix QA = random_matrix(n), QB = random_matrix(n), QM = random_matrix(n);
    Matrix A = QA.transpose() * QA + static_cast<double>(n) * Matrix::Identity(n, n);
    Matrix B = 0.5 * (QB + QB.transpose());
    Matrix M = QM.transpose() * QM + Matrix::Identity(n, n);
    return FormTriple(std::move(A), std::move(B), std::move(M));
  }

  bool triple_valid() {
    if (!problem_.triple) {
      record("spectrum", "problem triple admissible", std::nan(""), 0.0, false, "coefficients incompatible");
      return false;
    }
    const ValidationReport v = validate_triple(*problem_.triple);
    if (!v.pass) {
      for (const auto& c : v.checks)
        if (!c.pass) record("spectrum", "validate: " + c.name, c.value, 0.0, false);
    }
    return v.pass;
  }

  void spectrum() {
    if (!triple_valid()) return;
    const FormTriple triple = problem_.triple->symmetrized();
    const double tol = residual_tol(1e-9);
    for (double lambda : {-0.5, 0.0, 0.5}) {
      const std::string at = " @lambda=" + label(lambda);
      guard("spectrum", "m-orthonormality" + at, [&] {
        const SpectralData sd = canonical_data(triple, lambda);
        const Eigen::Index n = sd.size();
        const double err =
            (sd.E_canon.transpose() * triple.M() * sd.E_canon - Matrix::Identity(n, n)).cwiseAbs().maxCoeff();
        record("spectrum", "m-orthonormality" + at, err, tol, err <= tol);
        const Matrix R = triple.A() * sd.E_canon - lambda * triple.B() * sd.E_canon -
                         triple.M() * sd.E_canon * sd.mu.asDiagonal();
        const double scale = 1.0 + triple.A().norm() + std::abs(lambda) * triple.B().norm() +
                             sd.mu.cwiseAbs().maxCoeff() * triple.M().norm();
        const double res = R.cwiseAbs().maxCoeff() / scale;
        record("spectrum", "eigen residual" + at, res, tol, res <= tol);
        bool sorted = true;
        for (Eigen::Index k = 1; k < n; ++k) sorted = sorted && sd.mu(k - 1) <= sd.mu(k);
        record("spectrum", "eigenvalues ascending" + at, sorted ? 0.0 : 1.0, 0.0, sorted);
      });
      guard("spectrum", "tau invariance" + at, [&] {
        const double t1 = find_coercive_shift(triple, lambda).tau();
        const double t2 = 2.0 * t1 + 1.0;
        const InvarianceReport r = verify_tau_invariance(triple, lambda, t1, t2);
        record("spectrum", "tau invariance: mu" + at, r.max_mu_diff, kTauMuTol, r.mu_pass);
        record("spectrum", "tau invariance: shift relation" + at, r.max_shift_relation_err, kTauShiftTol,
               r.shift_relation_pass);
        record("spectrum", "tau invariance: projectors" + at, r.max_projector_diff, kTauVectorTol, r.projector_pass);
      });
    }
    guard("spectrum", "random tau invariance", [&] {
      double worst_mu = 0.0, worst_proj = 0.0, worst_shift = 0.0;
      bool ok = true;
      for (int t = 0; t < options_.trials; ++t) {
        const FormTriple rt = random_triple(8);
        std::uniform_real_distribution<double> lam(-1.0, 1.0);
        const double lambda = lam(rng_);
        const double t1 = find_coercive_shift(rt, lambda).tau();
        const InvarianceReport r = verify_tau_invariance(rt, lambda, t1, 3.0 * t1 + 5.0);
        worst_mu = std::max(worst_mu, r.max_mu_diff);
        worst_shift = std::max(worst_shift, r.max_shift_relation_err);
        worst_proj = std::max(worst_proj, r.max_projector_diff);
        ok = ok && r.pass;
      }
      record("spectrum", "random triples: mu agreement", worst_mu, kTauMuTol, worst_mu <= kTauMuTol);
      record("spectrum", "random triples: shift relation", worst_shift, kTauShiftTol, worst_shift <= kTauShiftTol);
      record("spectrum", "random triples: projector agreement", worst_proj, kTauVectorTol, ok);
    });
  }

  void bounds() {
    if (!problem_.triple) {
      record("bounds", "problem triple admissible", std::nan(""), 0.0, false, "coefficients incompatible");
      return;
    }
    if (!validate_triple(*problem_.triple).pass) {
      record("bounds", "problem triple valid", std::nan(""), 0.0, false, "validate_triple failed");
      return;
    }
    const FormTriple triple = problem_.triple->symmetrized();
    const Eigen::Index n = triple.dim();
    const double tol = residual_tol(1e-8);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    guard("bounds", "bound below mu_1", [&] {
      double min_slack = std::numeric_limits<double>::infinity(), worst_rel = 0.0, worst_res = 0.0;
      bool holds = true;
      for (int t = 0; t < options_.trials; ++t) {
        const double lambda = 2.0 * unit(rng_) - 1.0;
        const SpectralData sd = canonical_data(triple, lambda);
        const double mu = sd.mu(0) - 0.1 - 5.0 * unit(rng_);
        const double tau = std::max(find_coercive_shift(triple, lambda).tau(), -mu) + unit(rng_);
        const Vector ell = random_vector(n);
        const BoundReport b = bound_below_first(triple, sd, mu, ell, tau);
        min_slack = std::min(min_slack, b.slack / (1.0 + b.bound));
        holds = holds && b.holds;

        const LinearSolution sol = solve_nonresonant(triple, sd, mu, ell);
        const Matrix K = triple.A() - lambda * triple.B() - mu * triple.M();
        const Vector direct = K.partialPivLu().solve(ell);
        worst_rel = std::max(worst_rel, (sol.u - direct).norm() / std::max(direct.norm(), 1e-300));
        worst_res = std::max(worst_res, sol.residual);
      }
      record("bounds", "bound below mu_1: min relative slack", min_slack, 0.0, holds);
      record("bounds", "spectral vs direct solve", worst_rel, tol, worst_rel <= tol);
      record("bounds", "linear residual", worst_res, tol, worst_res <= tol);
    });
    if (n < 2) return;
    guard("bounds", "bound between mu_k0 and mu_k0+1", [&] {
      double min_slack = std::numeric_limits<double>::infinity();
      bool holds = true;
      int trials = 0;
      for (int t = 0; t < options_.trials; ++t) {
        const double lambda = 2.0 * unit(rng_) - 1.0;
        const SpectralData sd = canonical_data(triple, lambda);
        const Eigen::Index k0 = 1 + static_cast<Eigen::Index>(unit(rng_) * static_cast<double>(n - 1)) % (n - 1);
        const double lo = sd.mu(k0 - 1), hi = sd.mu(k0);
        if (hi - lo <= 1e-6 * (1.0 + std::abs(hi))) continue;
        const double mu = lo + (0.1 + 0.8 * unit(rng_)) * (hi - lo);
        const double tau = std::max(find_coercive_shift(triple, lambda).tau(), -sd.mu(0)) + unit(rng_);
        const BoundReport b = bound_between(triple, sd, mu, random_vector(n), tau, k0);
        min_slack = std::min(min_slack, b.slack / (1.0 + b.bound));
        holds = holds && b.holds;
        ++trials;
      }
      record("bounds", "bound between eigenvalues: min relative slack", trials ? min_slack : 0.0, 0.0, holds,
             std::to_string(trials) + " trials");
    });
  }

  void nonlinear() {
    if (!problem_.triple || !validate_triple(*problem_.triple).pass) {
      record("nonlinear", "problem triple valid", std::nan(""), 0.0, false, "validate_triple failed");
      return;
    }
    const FormTriple triple = problem_.triple->symmetrized();
    const Eigen::Index n = triple.dim();
    NonlinearSpec spec;
    std::string note;
    if (problem_.spec) {
      spec = *problem_.spec;
    } else {
      spec.affine = triple.M() * Vector::Ones(n);
      spec.power_terms.push_back({1.0, triple.M() * Vector::Ones(n), 3.0});
      note = "default affine+power spec";
    }
    const double tol = residual_tol(1e-8);

    guard("nonlinear", "jacobian vs finite differences", [&] {
      const Vector u = 0.5 * random_vector(n);
      const Matrix J = eval_DF(spec, u);
      Matrix Jfd(n, n);
      const double h = 1e-6;
      for (Eigen::Index j = 0; j < n; ++j) {
        Vector up = u, um = u;
        up(j) += h;
        um(j) -= h;
        Jfd.col(j) = (eval_F(spec, up) - eval_F(spec, um)) / (2.0 * h);
      }
      const double err = (J - Jfd).cwiseAbs().maxCoeff() / (1.0 + J.cwiseAbs().maxCoeff());
      record("nonlinear", "jacobian vs finite differences", err, 1e-6, err <= 1e-6);
    });

    guard("nonlinear", "newton nonresonant", [&] {
      const SpectralData sd = canonical_data(triple, 0.0);
      const double mu = sd.mu(0) - 1.0;
      for (double eps : {0.1, 0.05}) {
        const std::string at = " @eps=" + label(eps);
        const NonlinearSolution sn = newton_solve_nonresonant(triple, sd, mu, spec, eps, Vector::Zero(n));
        record("nonlinear", "newton residual" + at, sn.residual, tol, sn.residual <= tol, note);
        try {
          const NonlinearSolution sp = picard_solve(triple, sd, mu, spec, eps, Vector::Zero(n));
          const double diff = (sp.u - sn.u).norm() / (1.0 + sn.u.norm());
          record("nonlinear", "picard vs newton" + at, diff, tol, diff <= tol);
        } catch (const Error& e) {
          if (e.kind() != ErrorKind::PicardNotContracting) throw;
          record("nonlinear", "picard vs newton" + at, std::nan(""), tol, true, "picard not contracting; skipped");
        }
      }
    });

    guard("nonlinear", "zero solution of pure power terms", [&] {
      if (spec.power_terms.empty()) return;
      NonlinearSpec pure;
      pure.power_terms = spec.power_terms;
      const SpectralData sd = canonical_data(triple, 0.0);
      const NonlinearSolution s =
          newton_solve_nonresonant(triple, sd, sd.mu(0) - 1.0, pure, 0.05, 1e-3 * random_vector(n));
      record("nonlinear", "pure power terms: |u|", s.u.norm(), 1e-10, s.u.norm() <= 1e-10);
    });
  }

  void nemytskii() {
    const Mesh1D mesh = problem_.mesh ? *problem_.mesh : Mesh1D::uniform(64);
    const Vector u = mesh.interpolate([](double x) { return x; });
    const Vector h = mesh.interpolate([](double x) { return x * (1.0 - x); });
    std::vector<std::string> names;
    if (problem_.spec && problem_.spec->nemytskii) names.push_back(problem_.spec->nemytskii->fn.name);
    else names = {"sin", "tanh", "affine"};
    for (const auto& name : names) {
      guard("nemytskii", "derivative check " + name, [&] {
        const DerivativeCheckReport r = nemytskii_derivative_check(mesh, nemytskii_fn(name), u, h, 8);
        if (r.max_remainder <= 1e-12)
          record("nemytskii", "derivative check " + name + ": max remainder", r.max_remainder, 1e-12, r.pass);
        else
          record("nemytskii", "derivative check " + name + ": ratio band", r.band, 10.0, r.pass);
      });
    }
  }

  const Problem& problem_;
  const VerifyOptions& options_;
  std::mt19937_64 rng_;
  VerifyReport report_;
};

}  // namespace

VerifyReport run_verify(const Problem& problem, const VerifyOptions& options) {
  return Runner(problem, options).run();
}

}  // namespace fredholm
