#include "fredholm/errors.hpp"
#include "fredholm/linear.hpp"
#include "fredholm/nonlinear.hpp"
#include "fredholm/steklov.hpp"
#include "oracles.hpp"

#include <doctest.h>

#include <cmath>

using namespace fredholm;

namespace {

FormTriple toy() {
  return FormTriple(Matrix::Identity(2, 2), Eigen::Vector2d(1, -1).asDiagonal().toDenseMatrix(),
                    Matrix::Identity(2, 2), BasisKind::Toy);
}

ErrorKind kind_of(const std::function<void()>& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.kind();
  }
  FAIL("no error thrown");
  return ErrorKind::Io;
}

NonlinearSpec power_only(Vector ell, double p = 3.0, double c = 1.0) {
  NonlinearSpec s;
  s.power_terms.push_back({c, std::move(ell), p});
  return s;
}

// affine (1,0) minus the cube-like term with ell_f = (1,0): Phi(t) = 1 - |t| t.
NonlinearSpec toy_resonant_spec() {
  NonlinearSpec s = power_only(Eigen::Vector2d(1, 0), 3.0, -1.0);
  s.affine = Eigen::Vector2d(1, 0);
  return s;
}

NonlinearSpec steklov_spec(const Mesh1D& mesh) {
  NonlinearSpec s;
  const Vector ell = build_rank_one_functional(mesh, {1.0}, Location::Interior);
  s.affine = ell;
  s.power_terms.push_back({1.0, ell, 3.0});
  return s;
}

}  // namespace

TEST_CASE("eval_F examples") {
  CHECK((eval_F(power_only(Eigen::Vector2d(1, 0)), Eigen::Vector2d(2, 0)) - Eigen::Vector2d(4, 0)).norm() == 0.0);
  CHECK(eval_F(power_only(Eigen::Vector2d(1, 0)), Vector::Zero(2)).norm() == 0.0);
  NonlinearSpec a;
  a.affine = Eigen::Vector2d(1, 1);
  CHECK((eval_F(a, Vector::Zero(2)) - Eigen::Vector2d(1, 1)).norm() == 0.0);
  // p = 4 gives the plain cube.
  const Vector F4 = eval_F(power_only(Eigen::Vector2d(1, 1), 4.0), Eigen::Vector2d(-0.5, -1.0));
  CHECK(F4(0) == doctest::Approx(std::pow(-1.5, 3)));
}

TEST_CASE("eval_DF examples and finite differences") {
  const Matrix J = eval_DF(power_only(Eigen::Vector2d(1, 0)), Eigen::Vector2d(2, 0));
  CHECK(J(0, 0) == doctest::Approx(4.0));
  CHECK(J.cwiseAbs().sum() == doctest::Approx(4.0));
  CHECK(eval_DF(power_only(Eigen::Vector2d(1, 0)), Vector::Zero(2)).norm() == 0.0);

  std::mt19937_64 rng(41);
  NonlinearSpec s = power_only(oracle::random_vector(6, rng), 3.5, 0.7);
  s.power_terms.push_back({-1.2, oracle::random_vector(6, rng), 4.0});
  NemytskiiTerm nt;
  nt.fn = nemytskii_fn("tanh");
  nt.pairing = Matrix::Identity(6, 6) + 0.1 * Matrix::Ones(6, 6);
  s.nemytskii = nt;
  const Vector u = oracle::random_vector(6, rng);
  const Vector h = oracle::random_vector(6, rng);
  const Matrix DF = eval_DF(s, u);
  double prev = 0.0;
  for (int j = 0; j < 6; ++j) {
    const double t = std::ldexp(1e-2, -j);
    const double rem = (eval_F(s, u + t * h) - eval_F(s, u) - DF * (t * h)).norm();
    const double ratio = rem / (t * t);
    if (j > 0) CHECK(ratio == doctest::Approx(prev).epsilon(0.1));
    prev = ratio;
  }
}

TEST_CASE("power-family Jacobian is symmetric") {
  std::mt19937_64 rng(43);
  NonlinearSpec s = power_only(oracle::random_vector(5, rng), 3.0);
  s.power_terms.push_back({2.0, oracle::random_vector(5, rng), 5.0});
  const Matrix J = eval_DF(s, oracle::random_vector(5, rng));
  CHECK((J - J.transpose()).norm() <= 1e-14 * J.norm());
}

TEST_CASE("check_spec rejects bad exponents and sizes") {
  CHECK(kind_of([] { check_spec(power_only(Eigen::Vector2d(1, 0), 2.0), 2); }) == ErrorKind::InvalidExponent);
  CHECK(kind_of([] { check_spec(power_only(Eigen::Vector3d(1, 0, 0)), 2); }) == ErrorKind::DimensionMismatch);
  CHECK(kind_of([] { nemytskii_fn("cosh"); }) == ErrorKind::InvalidArgument);
}

TEST_CASE("residual examples") {
  const FormTriple t = toy();
  NonlinearSpec a;
  a.affine = Eigen::Vector2d(1, 1);
  const LinearSolution lin = solve_nonresonant(t, canonical_data(t, 0.5), 0.0, Vector::Zero(2));
  CHECK(residual(t, 0.5, 0.0, a, 0.0, lin.u) <= 1e-12);
  CHECK(residual(t, 0.5, 0.0, power_only(Eigen::Vector2d(1, 1)), 0.3, Vector::Zero(2)) == 0.0);
  const Vector u(Eigen::Vector2d(0.3, -0.8));
  const Vector F = eval_F(a, u);
  const Vector r = t.A() * u - 0.5 * t.B() * u - 0.2 * u - 0.1 * F;
  CHECK(residual(t, 0.5, 0.2, a, 0.1, u) == doctest::Approx(r.norm() / (1.0 + 0.1 * F.norm() + u.norm())));
}

TEST_CASE("picard_solve examples") {
  const FormTriple t = toy();
  const SpectralData d = canonical_data(t, 1.0);
  NonlinearSpec a;
  a.affine = Eigen::Vector2d(1, 0);
  const NonlinearSolution s = picard_solve(t, d, 1.0, a, 0.1, Vector::Zero(2));
  CHECK((s.u - Eigen::Vector2d(-0.1, 0)).norm() <= 1e-15);
  CHECK(s.iterations <= 2);
  CHECK(s.method == NonlinearMethod::Picard);

  const NonlinearSolution z = picard_solve(t, d, 1.0, power_only(Eigen::Vector2d(1, 1)), 0.05, Vector::Zero(2));
  CHECK(z.u.norm() == 0.0);
}

TEST_CASE("picard_solve reports non-contraction") {
  const FormTriple t = toy();
  NonlinearSpec s;
  NemytskiiTerm nt;
  nt.fn = nemytskii_fn("identity");
  nt.pairing = Matrix::Identity(2, 2);
  s.nemytskii = nt;
  // u <- eps u/(mu_k - mu) with factor 3: expanding.
  CHECK(kind_of([&] { picard_solve(t, canonical_data(t, 1.0), 1.0, s, 3.0, Eigen::Vector2d(1, 1)); }) ==
        ErrorKind::PicardNotContracting);
  CHECK(kind_of([&] { picard_solve(t, canonical_data(t, 1.0), 0.0, s, 0.1, Vector::Zero(2)); }) ==
        ErrorKind::ResonanceDetected);
}

TEST_CASE("newton_solve_nonresonant examples") {
  const FormTriple t = toy();
  const SpectralData d = canonical_data(t, 1.0);
  NonlinearSpec a;
  a.affine = Eigen::Vector2d(1, 3);
  const NonlinearSolution s = newton_solve_nonresonant(t, d, 1.0, a, 0.1, Vector::Zero(2));
  CHECK(s.iterations == 1);
  CHECK((s.u - Eigen::Vector2d(-0.1, 0.3)).norm() <= 1e-15);

  const NonlinearSolution z =
      newton_solve_nonresonant(t, d, 1.0, power_only(Eigen::Vector2d(1, 1)), 0.05, Eigen::Vector2d(1e-3, -2e-3));
  CHECK(z.u.norm() <= 1e-10);
}

TEST_CASE("nonresonant solvers agree with the brute-force oracle on Steklov") {
  SteklovCoefficients c;
  c.c = {1.0};
  c.b0 = {1.0, 1.0};
  const Mesh1D mesh = Mesh1D::uniform(32);
  const FormTriple t = assemble_forms(mesh, c);
  const NonlinearSpec spec = steklov_spec(mesh);
  const double lambda = 0.3, mu = -1.0;
  const SpectralData d = canonical_data(t, lambda);
  const Matrix K = t.A() - lambda * t.B() - mu * t.M();
  double prev_norm = std::numeric_limits<double>::infinity();
  for (double eps : {0.2, 0.1, 0.05, 0.025}) {
    const NonlinearSolution p = picard_solve(t, d, mu, spec, eps, Vector::Zero(mesh.n_nodes()));
    const NonlinearSolution n = newton_solve_nonresonant(t, d, mu, spec, eps, Vector::Zero(mesh.n_nodes()));
    const Vector o = oracle::brute_newton(K, [&](const Vector& u) { return eval_F(spec, u); }, eps,
                                          Vector::Zero(mesh.n_nodes()));
    CHECK((p.u - n.u).norm() <= 1e-8 * (1.0 + n.u.norm()));
    CHECK((o - n.u).norm() <= 1e-8 * (1.0 + n.u.norm()));
    CHECK(n.residual <= 1e-8);
    CHECK(n.u.norm() < prev_norm);
    prev_norm = n.u.norm();
  }
}

TEST_CASE("lambda_operator and injectivity") {
  const FormTriple t = toy();
  const ResonanceGroup g = resonance_group(canonical_data(t, 1.0), 0.0);
  const Matrix L = lambda_operator(toy_resonant_spec(), Eigen::Vector2d(1, 0), g);
  REQUIRE(L.rows() == 1);
  CHECK(L(0, 0) == doctest::Approx(-2.0));
  CHECK(lambda_operator(toy_resonant_spec(), Vector::Zero(2), g).norm() == 0.0);

  CHECK(injectivity_check(L).ok);
  CHECK_FALSE(injectivity_check(Matrix::Zero(1, 1)).ok);
  Matrix D = Matrix::Identity(2, 2);
  D(1, 1) = 1e-14;
  const InjectivityReport r = injectivity_check(D);
  CHECK_FALSE(r.ok);
  CHECK(r.condition_estimate == doctest::Approx(1e14));
}

TEST_CASE("lambda_operator matches finite differences on a two-dimensional group") {
  std::mt19937_64 rng(47);
  const FormTriple t = toy();
  const ResonanceGroup g = resonance_group(canonical_data(t, 0.0), 1.0);
  REQUIRE(g.J.size() == 2);
  NonlinearSpec s = power_only(oracle::random_vector(2, rng), 3.0, 1.3);
  s.power_terms.push_back({-0.4, oracle::random_vector(2, rng), 4.5});
  const Vector w = oracle::random_vector(2, rng);
  const Matrix L = lambda_operator(s, w, g);
  const double h = 1e-6;
  for (int i = 0; i < 2; ++i) {
    const Vector ei = g.E_basis.col(i);
    const Vector dF = (eval_F(s, w + h * ei) - eval_F(s, w - h * ei)) / (2 * h);
    for (int j = 0; j < 2; ++j) CHECK(L(j, i) == doctest::Approx(g.E_basis.col(j).dot(dF)).epsilon(1e-6));
  }
}

TEST_CASE("find_bifurcation_point examples") {
  const FormTriple t = toy();
  const ResonanceGroup g = resonance_group(canonical_data(t, 1.0), 0.0);
  const BifurcationPoint bp = find_bifurcation_point(g, toy_resonant_spec());
  CHECK((bp.u0 - Eigen::Vector2d(1, 0)).norm() <= 1e-12);
  CHECK(bp.phi_norm <= kBifurcationTol);

  const BifurcationPoint zero = find_bifurcation_point(g, power_only(Eigen::Vector2d(1, 0)));
  CHECK(zero.u0.norm() == 0.0);
  CHECK_FALSE(injectivity_check(lambda_operator(power_only(Eigen::Vector2d(1, 0)), zero.u0, g)).ok);

  NonlinearSpec none;
  none.affine = Eigen::Vector2d(1, 0);  // Phi = 1 everywhere
  CHECK(kind_of([&] { find_bifurcation_point(g, none); }) == ErrorKind::BifurcationRootNotFound);
}

TEST_CASE("newton_solve_resonant on the toy problem") {
  const FormTriple t = toy();
  const SpectralData d = canonical_data(t, 1.0);
  const ResonanceGroup g = resonance_group(d, 0.0);
  NonlinearSpec spec = toy_resonant_spec();
  spec.affine = Eigen::Vector2d(1, 2);
  spec.power_terms[0].ell = Eigen::Vector2d(1, 1);
  const Vector u0 = find_bifurcation_point(g, spec).u0;

  const NonlinearSolution s0 = newton_solve_resonant(t, d, g, spec, 0.0, u0);
  CHECK((s0.u - u0).norm() == 0.0);

  std::vector<double> ratios;
  for (double eps : {0.02, -0.02, 0.01, -0.01, 0.005, -0.005}) {
    const NonlinearSolution s = newton_solve_resonant(t, d, g, spec, eps, u0);
    CHECK(s.resonant);
    CHECK(s.residual <= 1e-8);
    CHECK(s.side_condition <= 1e-8);
    const Vector o = oracle::constrained_gauss_newton(t.A() - t.B(), [&](const Vector& u) { return eval_F(spec, u); },
                                                      eps, g.E_basis, u0);
    CHECK((o - s.u).norm() <= 1e-8);
    ratios.push_back((s.u - u0).norm() / std::abs(eps));
  }
  const auto [lo, hi] = std::minmax_element(ratios.begin(), ratios.end());
  CHECK(*hi <= 2.0 * *lo);
}

TEST_CASE("newton_solve_resonant preconditions") {
  const FormTriple t = toy();
  const SpectralData d = canonical_data(t, 1.0);
  const ResonanceGroup g = resonance_group(d, 0.0);
  CHECK(kind_of([&] { newton_solve_resonant(t, d, g, toy_resonant_spec(), 0.01, Eigen::Vector2d(0.5, 0)); }) ==
        ErrorKind::PreconditionViolated);
  CHECK(kind_of([&] { newton_solve_resonant(t, d, g, power_only(Eigen::Vector2d(1, 0)), 0.01, Vector::Zero(2)); }) ==
        ErrorKind::InjectivityFailed);
}

TEST_CASE("resonant branch on a Steklov problem") {
  SteklovCoefficients c;
  c.c = {1.0};
  c.b0 = {1.0, 1.0};
  const Mesh1D mesh = Mesh1D::uniform(24);
  const FormTriple t = assemble_forms(mesh, c);
  const double lambda = 0.5;
  const SpectralData d = canonical_data(t, lambda);
  const ResonanceGroup g = resonance_group(d, d.mu(0));
  NonlinearSpec spec;
  const Vector ell = build_rank_one_functional(mesh, {1.0}, Location::Interior);
  spec.affine = ell;
  spec.power_terms.push_back({-1.0, ell, 3.0});
  const BranchInfo info = resonant_branch(t, d, g, spec, {0.02, -0.02, 0.01, -0.01});
  CHECK(info.phi_norm <= 1e-10);
  CHECK(std::isfinite(info.condition_estimate));
  for (const auto& p : info.trace) {
    CHECK(p.residual <= 1e-8);
    CHECK(p.side_condition <= 1e-8);
  }
  NonlinearSolution sol;
  sol.resonant = true;
  sol.branch_info = info;
  const std::string json = to_json(sol);
  CHECK(json.find("\"branch_info\"") != std::string::npos);
  CHECK(json.find("\"distance_to_u0\"") != std::string::npos);
}
