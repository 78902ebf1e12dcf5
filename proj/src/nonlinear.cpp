#include "fredholm/nonlinear.hpp"

#include "fredholm/errors.hpp"
#include "json_writer.hpp"

#include <Eigen/LU>
#include <Eigen/QR>
#include <Eigen/SVD>

#include <cmath>
#include <limits>
#include <sstream>

namespace fredholm {

const char* to_string(NonlinearMethod m) noexcept {
  return m == NonlinearMethod::Picard ? "picard" : "newton";
}

NemytskiiFn nemytskii_fn(const std::string& name) {
  NemytskiiFn fn;
  fn.name = name;
  if (name == "sin") {
    fn.f = [](double s) { return std::sin(s); };
    fn.df = [](double s) { return std::cos(s); };
    fn.d2f = [](double s) { return -std::sin(s); };
    fn.sup_df = 1.0;
    fn.sup_d2f = 1.0;
  } else if (name == "tanh") {
    fn.f = [](double s) { return std::tanh(s); };
    fn.df = [](double s) {
      const double c = 1.0 / std::cosh(s);
      return c * c;
    };
    fn.d2f = [](double s) {
      const double c = 1.0 / std::cosh(s);
      return -2.0 * std::tanh(s) * c * c;
    };
    fn.sup_df = 1.0;
    fn.sup_d2f = 4.0 / (3.0 * std::sqrt(3.0));
  } else if (name == "identity") {
    fn.f = [](double s) { return s; };
    fn.df = [](double) { return 1.0; };
    fn.d2f = [](double) { return 0.0; };
    fn.sup_df = 1.0;
    fn.sup_d2f = 0.0;
  } else if (name == "affine") {
    fn.f = [](double s) { return 2.0 * s + 1.0; };
    fn.df = [](double) { return 2.0; };
    fn.d2f = [](double) { return 0.0; };
    fn.sup_df = 2.0;
    fn.sup_d2f = 0.0;
  } else if (name == "square") {
    fn.f = [](double s) { return s * s; };
    fn.df = [](double s) { return 2.0 * s; };
    fn.d2f = [](double) { return 2.0; };
    fn.sup_df = 20.0;
    fn.sup_d2f = 2.0;
  } else {
    throw Error(ErrorKind::InvalidArgument, "unknown Nemytskii function '" + name + "'");
  }
  return fn;
}

void check_spec(const NonlinearSpec& spec, Eigen::Index dim) {
  if (spec.affine && spec.affine->size() != dim)
    throw Error(ErrorKind::DimensionMismatch, "affine functional has the wrong dimension");
  for (const auto& term : spec.power_terms) {
    if (!(term.p > 2.0)) {
      std::ostringstream os;
      os << "power exponent p=" << term.p << " must exceed 2";
      throw Error(ErrorKind::InvalidExponent, os.str(), term.p);
    }
    if (term.ell.size() != dim)
      throw Error(ErrorKind::DimensionMismatch, "power-term functional has the wrong dimension");
  }
  if (spec.nemytskii && (spec.nemytskii->pairing.rows() != dim || spec.nemytskii->pairing.cols() != dim))
    throw Error(ErrorKind::DimensionMismatch, "Nemytskii pairing matrix has the wrong dimension");
}

Vector eval_F(const NonlinearSpec& spec, const Vector& u) {
  Vector F = spec.affine ? *spec.affine : Vector::Zero(u.size());
  for (const auto& term : spec.power_terms) {
    const double s = term.ell.dot(u);
    F += term.c * std::pow(std::abs(s), term.p - 2.0) * s * term.ell;
  }
  if (spec.nemytskii) F += spec.nemytskii->pairing * u.unaryExpr(spec.nemytskii->fn.f);
  return F;
}

Matrix eval_DF(const NonlinearSpec& spec, const Vector& u) {
  Matrix J = Matrix::Zero(u.size(), u.size());
  for (const auto& term : spec.power_terms) {
    const double s = term.ell.dot(u);
    J += term.c * (term.p - 1.0) * std::pow(std::abs(s), term.p - 2.0) * (term.ell * term.ell.transpose());
  }
  if (spec.nemytskii) J += spec.nemytskii->pairing * u.unaryExpr(spec.nemytskii->fn.df).asDiagonal();
  return J;
}

double residual(const FormTriple& triple, double lambda, double mu, const NonlinearSpec& spec, double eps,
                const Vector& u) {
  const Vector F = eval_F(spec, u);
  const Vector r = triple.A() * u - lambda * (triple.B() * u) - mu * (triple.M() * u) - eps * F;
  return r.norm() / (1.0 + std::abs(eps) * F.norm() + u.norm());
}

namespace {

void require_nonresonant(const SpectralData& spectral, double mu) {
  const ResonanceGroup g = resonance_group(spectral, mu);
  if (!g.empty()) {
    std::ostringstream os;
    os << "(lambda, mu) = (" << format_double(spectral.lambda) << ", " << format_double(mu)
       << ") is an eigenpair; use the resonant solver";
    throw Error(ErrorKind::ResonanceDetected, os.str(), mu);
  }
}

double m_norm(const Matrix& M, const Vector& v) { return std::sqrt(std::max(0.0, v.dot(M * v))); }

// Solves J x = rhs, throwing NewtonDiverged when J is numerically singular.
Vector newton_step(const Matrix& J, const Vector& rhs) {
  Eigen::PartialPivLU<Matrix> lu(J);
  if (!(lu.rcond() > 1e-14)) throw Error(ErrorKind::NewtonDiverged, "singular Newton Jacobian", lu.rcond());
  return lu.solve(rhs);
}

struct NewtonResult {
  Vector u;
  int iterations;
};

// Generic Newton loop on a map G with Jacobian JG.
template <class GFn, class JFn>
NewtonResult newton_loop(Vector u, GFn&& G, JFn&& JG, int max_iter) {
  for (int it = 0; it <= max_iter; ++it) {
    const Vector g = G(u);
    if (!g.allFinite()) throw Error(ErrorKind::NewtonDiverged, "non-finite Newton iterate");
    if (g.norm() <= 1e-14 * (1.0 + u.norm())) return {u, it};
    if (it == max_iter) break;
    const Vector step = newton_step(JG(u), -g);
    u += step;
    if (step.norm() <= 1e-15 * (1.0 + u.norm())) return {u, it + 1};
  }
  std::ostringstream os;
  os << "Newton did not converge in " << max_iter << " iterations";
  throw Error(ErrorKind::NewtonDiverged, os.str());
}

}  // namespace

NonlinearSolution picard_solve(const FormTriple& triple, const SpectralData& spectral, double mu,
                               const NonlinearSpec& spec, double eps, const Vector& u_init, double tol,
                               int max_iter) {
  check_spec(spec, spectral.size());
  require_nonresonant(spectral, mu);
  const Vector inv_gap = (spectral.mu.array() - mu).inverse();
  const Matrix& E = spectral.E_canon;
  auto H = [&](const Vector& u) -> Vector {
    return E * (eps * inv_gap.cwiseProduct(E.transpose() * eval_F(spec, u)));
  };

  Vector u = u_init.size() == 0 ? Vector::Zero(spectral.size()) : u_init;
  double prev_diff = -1.0;
  int slow_steps = 0;
  for (int it = 1; it <= max_iter; ++it) {
    Vector next = H(u);
    const double diff = m_norm(triple.M(), next - u);
    u = std::move(next);
    if (!u.allFinite()) throw Error(ErrorKind::PicardNotContracting, "Picard iterate became non-finite");
    if (diff <= tol) {
      NonlinearSolution sol;
      sol.u = u;
      sol.eps = eps;
      sol.iterations = it;
      sol.method = NonlinearMethod::Picard;
      sol.residual = residual(triple, spectral.lambda, mu, spec, eps, u);
      return sol;
    }
    if (prev_diff > 0.0 && diff > 0.99 * prev_diff) {
      if (++slow_steps >= 5) {
        std::ostringstream os;
        os << "iterate-difference ratio above 0.99 for 5 consecutive steps (last ratio " << diff / prev_diff
           << ")";
        throw Error(ErrorKind::PicardNotContracting, os.str(), diff / prev_diff);
      }
    } else {
      slow_steps = 0;
    }
    prev_diff = diff;
  }
  std::ostringstream os;
  os << "Picard iteration did not reach tol=" << tol << " in " << max_iter << " steps";
  throw Error(ErrorKind::MaxIterExceeded, os.str());
}

NonlinearSolution newton_solve_nonresonant(const FormTriple& triple, const SpectralData& spectral,
                                           double mu, const NonlinearSpec& spec, double eps,
                                           const Vector& u_init) {
  check_spec(spec, spectral.size());
  require_nonresonant(spectral, mu);
  const Vector inv_gap = (spectral.mu.array() - mu).inverse();
  const Matrix& E = spectral.E_canon;
  const Matrix P = E * inv_gap.asDiagonal() * E.transpose();  // sum_k e_k e_k^T / (mu_k - mu)
  const Matrix I = Matrix::Identity(spectral.size(), spectral.size());

  auto G = [&](const Vector& u) -> Vector { return u - eps * (P * eval_F(spec, u)); };
  auto JG = [&](const Vector& u) -> Matrix { return I - eps * (P * eval_DF(spec, u)); };

  const Vector start = u_init.size() == 0 ? Vector::Zero(spectral.size()) : u_init;
  const NewtonResult r = newton_loop(start, G, JG, kNewtonMaxIter);

  NonlinearSolution sol;
  sol.u = r.u;
  sol.eps = eps;
  sol.iterations = r.iterations;
  sol.method = NonlinearMethod::Newton;
  sol.residual = residual(triple, spectral.lambda, mu, spec, eps, r.u);
  return sol;
}

Matrix lambda_operator(const NonlinearSpec& spec, const Vector& w, const ResonanceGroup& group) {
  if (group.empty()) throw Error(ErrorKind::PreconditionViolated, "lambda_operator needs a nonempty group");
  return group.E_basis.transpose() * eval_DF(spec, w) * group.E_basis;
}

BifurcationPoint find_bifurcation_point(const ResonanceGroup& group, const NonlinearSpec& spec) {
  if (group.empty())
    throw Error(ErrorKind::PreconditionViolated, "find_bifurcation_point needs a nonempty group");
  check_spec(spec, group.E_basis.rows());
  const Matrix& E = group.E_basis;
  const auto dimJ = E.cols();
  auto phi = [&](const Vector& t) -> Vector { return E.transpose() * eval_F(spec, E * t); };

  std::vector<Vector> starts;
  starts.push_back(Vector::Zero(dimJ));
  static constexpr double kGrid[] = {-2.0, -1.0, -0.5, 0.5, 1.0, 2.0};
  std::vector<int> idx(static_cast<std::size_t>(dimJ), 0);
  while (true) {
    Vector t(dimJ);
    for (Eigen::Index j = 0; j < dimJ; ++j) t(j) = kGrid[idx[static_cast<std::size_t>(j)]];
    starts.push_back(t);
    Eigen::Index j = dimJ - 1;
    while (j >= 0 && ++idx[static_cast<std::size_t>(j)] == 6) idx[static_cast<std::size_t>(j--)] = 0;
    if (j < 0) break;
  }

  BifurcationPoint best;
  best.phi_norm = std::numeric_limits<double>::infinity();
  for (const Vector& start : starts) {
    Vector t = start;
    Vector f = phi(t);
    for (int it = 0; it < 100 && f.allFinite() && f.norm() > 1e-15; ++it) {
      const Matrix Jphi = E.transpose() * eval_DF(spec, E * t) * E;
      const Vector step = Jphi.completeOrthogonalDecomposition().solve(-f);
      if (!step.allFinite() || step.norm() == 0.0) break;
      Vector trial = t + step;
      Vector ftrial = phi(trial);
      if (!ftrial.allFinite()) break;
      const bool stalled = (trial - t).norm() <= 1e-16 * (1.0 + t.norm());
      t = std::move(trial);
      f = std::move(ftrial);
      if (stalled) break;
    }
    if (f.allFinite() && f.norm() < best.phi_norm) {
      best.phi_norm = f.norm();
      best.t = t;
    }
  }
  if (!(best.phi_norm <= kBifurcationTol)) {
    std::ostringstream os;
    os << "no start reached ||Phi|| <= " << kBifurcationTol << " (best " << best.phi_norm << ")";
    throw Error(ErrorKind::BifurcationRootNotFound, os.str(), best.phi_norm);
  }
  best.u0 = E * best.t;
  return best;
}

InjectivityReport injectivity_check(const Matrix& L) {
  if (L.rows() != L.cols() || L.rows() == 0)
    throw Error(ErrorKind::InvalidArgument, "injectivity_check needs a nonempty square matrix");
  Eigen::JacobiSVD<Matrix> svd(L);
  const auto& s = svd.singularValues();
  const double smax = s(0);
  const double smin = s(s.size() - 1);
  InjectivityReport r;
  r.ok = smax > 0.0 && smin >= 1e-10 * smax;
  r.condition_estimate = smin > 0.0 ? smax / smin : std::numeric_limits<double>::infinity();
  return r;
}

NonlinearSolution newton_solve_resonant(const FormTriple& triple, const SpectralData& spectral,
                                        const ResonanceGroup& group, const NonlinearSpec& spec, double eps,
                                        const Vector& u0) {
  check_spec(spec, spectral.size());
  if (group.empty()) throw Error(ErrorKind::PreconditionViolated, "newton_solve_resonant needs a nonempty group");

  const Matrix& EJ = group.E_basis;
  const double side0 = (EJ.transpose() * eval_F(spec, u0)).cwiseAbs().maxCoeff();
  if (side0 > kBifurcationTol) {
    std::ostringstream os;
    os << "u0 does not annihilate F on E_{lambda,mu}: max |F(u0, e_k)| = " << side0;
    throw Error(ErrorKind::PreconditionViolated, os.str(), side0);
  }
  const InjectivityReport inj = injectivity_check(lambda_operator(spec, u0, group));
  if (!inj.ok) {
    std::ostringstream os;
    os << "Lambda_{u0} is not injective on E_{lambda,mu} (condition " << inj.condition_estimate << ")";
    throw Error(ErrorKind::InjectivityFailed, os.str(), inj.condition_estimate);
  }

  const Eigen::Index n = spectral.size();
  std::vector<bool> in_j(static_cast<std::size_t>(n), false);
  for (auto k : group.J) in_j[static_cast<std::size_t>(k)] = true;
  Vector inv_gap = Vector::Zero(n);
  for (Eigen::Index k = 0; k < n; ++k)
    if (!in_j[static_cast<std::size_t>(k)]) inv_gap(k) = 1.0 / (spectral.mu(k) - group.mu);
  const Matrix& E = spectral.E_canon;
  const Matrix P_rest = E * inv_gap.asDiagonal() * E.transpose();
  const Matrix& M = triple.M();
  const Matrix I = Matrix::Identity(n, n);
  const Matrix PJ_m = EJ * (EJ.transpose() * M);  // u -> sum_{k in J} m(u, e_k) e_k

  auto G = [&](const Vector& u) -> Vector {
    const Vector F = eval_F(spec, u);
    return u - PJ_m * u + EJ * (EJ.transpose() * F) - eps * (P_rest * F);
  };
  auto JG = [&](const Vector& u) -> Matrix {
    const Matrix DF = eval_DF(spec, u);
    return I - PJ_m + EJ * (EJ.transpose() * DF) - eps * (P_rest * DF);
  };

  const NewtonResult r = newton_loop(u0, G, JG, kNewtonMaxIter);
  NonlinearSolution sol;
  sol.u = r.u;
  sol.eps = eps;
  sol.iterations = r.iterations;
  sol.method = NonlinearMethod::Newton;
  sol.resonant = true;
  sol.residual = residual(triple, spectral.lambda, group.mu, spec, eps, r.u);
  sol.side_condition = (EJ.transpose() * eval_F(spec, r.u)).cwiseAbs().maxCoeff();
  return sol;
}

BranchInfo resonant_branch(const FormTriple& triple, const SpectralData& spectral, const ResonanceGroup& group,
                           const NonlinearSpec& spec, const std::vector<double>& eps_values) {
  const BifurcationPoint bp = find_bifurcation_point(group, spec);
  BranchInfo info;
  info.u0 = bp.u0;
  info.phi_norm = bp.phi_norm;
  info.condition_estimate = injectivity_check(lambda_operator(spec, bp.u0, group)).condition_estimate;
  for (double eps : eps_values) {
    const NonlinearSolution s = newton_solve_resonant(triple, spectral, group, spec, eps, bp.u0);
    info.trace.push_back({eps, s.u, s.residual, s.side_condition});
  }
  return info;
}

std::string to_json(const NonlinearSolution& sol) {
  detail::JsonWriter w;
  w.begin_object();
  w.key("mode").value(sol.resonant ? "resonant" : "nonresonant");
  w.key("method").value(to_string(sol.method));
  w.key("eps").value(sol.eps);
  w.key("u").value(sol.u);
  w.key("iterations").value(sol.iterations);
  w.key("residual").value(sol.residual);
  if (sol.resonant) w.key("side_condition").value(sol.side_condition);
  if (sol.branch_info) {
    const BranchInfo& b = *sol.branch_info;
    w.key("branch_info").begin_object();
    w.key("u0").value(b.u0);
    w.key("phi_norm").value(b.phi_norm);
    w.key("condition_estimate").value(b.condition_estimate);
    w.key("trace").begin_array();
    for (const auto& p : b.trace) {
      w.begin_object();
      w.key("eps").value(p.eps);
      w.key("residual").value(p.residual);
      w.key("side_condition").value(p.side_condition);
      w.key("distance_to_u0").value((p.u - b.u0).norm());
      w.key("u").value(p.u);
      w.end_object();
    }
    w.end_array();
    w.end_object();
  }
  w.end_object();
  return w.str();
}

}  // namespace fredholm
