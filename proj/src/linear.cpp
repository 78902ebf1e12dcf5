#include "fredholm/linear.hpp"

#include "fredholm/errors.hpp"
#include "json_writer.hpp"

#include <cmath>
#include <sstream>

namespace fredholm {

const char* to_string(SolveMode mode) noexcept {
  return mode == SolveMode::Resonant ? "resonant" : "nonresonant";
}

namespace {

void check_dims(const SpectralData& spectral, const Vector& ell, const char* who) {
  if (ell.size() != spectral.size()) {
    std::ostringstream os;
    os << who << ": functional has " << ell.size() << " entries, expected " << spectral.size();
    throw Error(ErrorKind::DimensionMismatch, os.str());
  }
}

}  // namespace

double linear_residual(const FormTriple& triple, double lambda, double mu, const Vector& ell,
                       const Vector& u) {
  const Vector r = triple.A() * u - lambda * (triple.B() * u) - mu * (triple.M() * u) - ell;
  return r.norm() / (1.0 + ell.norm());
}

LinearSolution solve_nonresonant(const FormTriple& triple, const SpectralData& spectral, double mu,
                                 const Vector& ell) {
  check_dims(spectral, ell, "solve_nonresonant");
  const ResonanceGroup group = resonance_group(spectral, mu);
  if (!group.empty()) {
    std::ostringstream os;
    os << "mu=" << format_double(mu) << " coincides with mu_" << group.J.front() + 1 << "(lambda)";
    throw Error(ErrorKind::ResonanceDetected, os.str(), spectral.mu(group.J.front()));
  }

  LinearSolution sol;
  sol.mode = SolveMode::Nonresonant;
  const Vector ell_e = spectral.E_canon.transpose() * ell;
  sol.coefficients = ell_e.array() / (spectral.mu.array() - mu);
  sol.u = spectral.E_canon * sol.coefficients;
  sol.vhat = Vector::Zero(ell.size());
  sol.residual = linear_residual(triple, spectral.lambda, mu, ell, sol.u);
  sol.solvability_defect = 0.0;
  return sol;
}

Vector spectral_projection(const SpectralData& spectral, double mu, const Vector& ell, Eigen::Index k0) {
  const auto E = spectral.E_canon.leftCols(k0);
  const Vector c = (E.transpose() * ell).array() / (spectral.mu.head(k0).array() - mu);
  return E * c;
}

BoundReport bound_below_first(const FormTriple& triple, const SpectralData& spectral, double mu,
                              const Vector& ell, double tau) {
  const double mu1 = spectral.mu(0);
  if (!(mu < mu1)) {
    std::ostringstream os;
    os << "bound_below_first needs mu < mu_1 (mu=" << format_double(mu) << ", mu_1=" << format_double(mu1) << ")";
    throw Error(ErrorKind::PreconditionViolated, os.str());
  }
  if (mu + tau < 0.0) {
    std::ostringstream os;
    os << "bound_below_first needs mu + tau >= 0 (mu=" << format_double(mu) << ", tau=" << format_double(tau) << ")";
    throw Error(ErrorKind::PreconditionViolated, os.str());
  }
  const ShiftedForm shifted = shifted_form(triple, spectral.lambda, tau);
  const LinearSolution sol = solve_nonresonant(triple, spectral, mu, ell);

  BoundReport r;
  r.lhs = energy_norm(shifted, sol.u);
  r.bound = (mu1 + tau) / (mu1 - mu) * dual_norm(shifted, ell);
  r.slack = r.bound - r.lhs;
  r.holds = r.slack >= -1e-12 * (1.0 + r.bound);
  return r;
}

BoundReport bound_between(const FormTriple& triple, const SpectralData& spectral, double mu,
                          const Vector& ell, double tau, Eigen::Index k0) {
  const Eigen::Index n = spectral.size();
  if (k0 < 1 || k0 >= n || !(spectral.mu(k0 - 1) < mu && mu < spectral.mu(k0))) {
    std::ostringstream os;
    os << "bound_between needs mu_k0 < mu < mu_{k0+1} (k0=" << k0 << ", mu=" << format_double(mu) << ")";
    throw Error(ErrorKind::PreconditionViolated, os.str());
  }
  const ShiftedForm shifted = shifted_form(triple, spectral.lambda, tau);
  const LinearSolution sol = solve_nonresonant(triple, spectral, mu, ell);
  const Vector proj = spectral_projection(spectral, mu, ell, k0);

  const double mu1 = spectral.mu(0);
  const double mu_next = spectral.mu(k0);
  const double proj_factor = (mu + tau) * (mu_next - mu1) / ((mu1 + tau) * (mu_next - mu));
  const double dual_factor = (mu_next + tau) / (mu_next - mu);

  BoundReport r;
  r.lhs = energy_norm(shifted, sol.u);
  r.bound = proj_factor * energy_norm(shifted, proj) + dual_factor * dual_norm(shifted, ell);
  r.slack = r.bound - r.lhs;
  r.holds = r.slack >= -1e-12 * (1.0 + r.bound);
  return r;
}

Solvability solvability_check(const ResonanceGroup& group, const Vector& ell, double tol) {
  Solvability s;
  if (!group.empty()) {
    const Vector proj = group.E_basis.transpose() * ell;
    s.defect = proj.cwiseAbs().maxCoeff() / (1.0 + ell.norm());
  }
  s.solvable = s.defect <= tol;
  return s;
}

LinearSolution solve_resonant(const FormTriple& triple, const SpectralData& spectral,
                              const ResonanceGroup& group, const Vector& ell, const Vector& vhat,
                              double tol) {
  check_dims(spectral, ell, "solve_resonant");
  if (group.empty())
    throw Error(ErrorKind::PreconditionViolated, "solve_resonant called with an empty resonance group");

  const Solvability s = solvability_check(group, ell, tol);
  if (!s.solvable) {
    std::ostringstream os;
    os << "ell does not annihilate E_{lambda,mu}; defect " << format_double(s.defect);
    throw Error(ErrorKind::NotSolvable, os.str(), s.defect);
  }

  Vector v = vhat.size() == 0 ? Vector::Zero(ell.size()) : vhat;
  if (v.size() != ell.size()) throw Error(ErrorKind::DimensionMismatch, "solve_resonant: vhat size mismatch");
  const Vector in_e = group.E_basis * (group.E_basis.transpose() * (triple.M() * v));
  if ((v - in_e).norm() > 1e-8 * (1.0 + v.norm()))
    throw Error(ErrorKind::InvalidArgument, "solve_resonant: vhat does not lie in E_{lambda,mu}");

  LinearSolution sol;
  sol.mode = SolveMode::Resonant;
  const Vector ell_e = spectral.E_canon.transpose() * ell;
  sol.coefficients = Vector::Zero(spectral.size());
  std::vector<bool> in_j(static_cast<std::size_t>(spectral.size()), false);
  for (auto k : group.J) in_j[static_cast<std::size_t>(k)] = true;
  for (Eigen::Index k = 0; k < spectral.size(); ++k)
    if (!in_j[static_cast<std::size_t>(k)]) sol.coefficients(k) = ell_e(k) / (spectral.mu(k) - group.mu);
  sol.vhat = v;
  sol.u = spectral.E_canon * sol.coefficients + v;
  sol.residual = linear_residual(triple, spectral.lambda, group.mu, ell, sol.u);
  sol.solvability_defect = s.defect;
  return sol;
}

std::string to_json(const LinearSolution& sol) {
  detail::JsonWriter w;
  w.begin_object();
  w.key("mode").value(to_string(sol.mode));
  w.key("u").value(sol.u);
  w.key("coefficients").value(sol.coefficients);
  w.key("residual").value(sol.residual);
  w.key("solvability_defect").value(sol.solvability_defect);
  w.end_object();
  return w.str();
}

}  // namespace fredholm
