#include "fredholm/errors.hpp"
#include "fredholm/forms.hpp"
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

}  // namespace

TEST_CASE("validate_triple accepts the toy triple") {
  const ValidationReport r = validate_triple(toy());
  CHECK(r.pass);
  CHECK(r.checks.size() == 5);
}

TEST_CASE("validate_triple rejects the indefinite swap matrix") {
  Matrix A(2, 2);
  A << 0, 1, 1, 0;
  const ValidationReport r = validate_triple(FormTriple(A, Matrix::Zero(2, 2), Matrix::Identity(2, 2)));
  CHECK_FALSE(r.pass);
  for (const auto& c : r.checks) {
    if (c.name == "A positive definite") CHECK_FALSE(c.pass);
    if (c.name == "M positive definite") CHECK(c.pass);
  }
}

TEST_CASE("validate_triple flags asymmetry beyond 1e-12") {
  Matrix B = Matrix::Zero(2, 2);
  B(0, 1) = 1e-9;
  CHECK_FALSE(validate_triple(FormTriple(Matrix::Identity(2, 2), B, Matrix::Identity(2, 2))).pass);
  B(0, 1) = 1e-14;
  CHECK(validate_triple(FormTriple(Matrix::Identity(2, 2), B, Matrix::Identity(2, 2))).pass);
}

TEST_CASE("validate_triple rejects an indefinite M") {
  Matrix M = Matrix::Identity(2, 2);
  M(1, 1) = -1;
  CHECK_FALSE(validate_triple(FormTriple(Matrix::Identity(2, 2), Matrix::Zero(2, 2), M)).pass);
}

TEST_CASE("FormTriple rejects mismatched shapes") {
  CHECK(kind_of([] { FormTriple(Matrix::Identity(2, 2), Matrix::Identity(3, 3), Matrix::Identity(2, 2)); }) ==
        ErrorKind::DimensionMismatch);
  CHECK(kind_of([] { FormTriple(Matrix::Identity(2, 3), Matrix::Identity(2, 3), Matrix::Identity(2, 3)); }) ==
        ErrorKind::DimensionMismatch);
}

TEST_CASE("validate_triple passes on a Steklov assembly with n=65") {
  SteklovCoefficients c;
  c.c = {1.0};
  c.b0 = {1.0, 1.0};
  const FormTriple t = assemble_forms(Mesh1D::uniform(65), c);
  CHECK(validate_triple(t).pass);
  CHECK(Eigen::LLT<Matrix>(t.A()).info() == Eigen::Success);
}

TEST_CASE("symmetrized averages with the transpose") {
  Matrix A = Matrix::Identity(2, 2);
  A(0, 1) = 1e-13;
  const FormTriple s = FormTriple(A, Matrix::Zero(2, 2), Matrix::Identity(2, 2)).symmetrized();
  CHECK(s.A()(0, 1) == s.A()(1, 0));
  CHECK(s.A()(0, 1) == doctest::Approx(5e-14));
}

TEST_CASE("shifted_form on the toy triple") {
  const ShiftedForm s = shifted_form(toy(), 2.0, 2.0);
  CHECK(s.S()(0, 0) == 1.0);
  CHECK(s.S()(1, 1) == 5.0);
  const Matrix L = s.factor();
  CHECK(L(0, 0) == doctest::Approx(1.0));
  CHECK(L(1, 1) == doctest::Approx(std::sqrt(5.0)));
  CHECK((L * L.transpose() - s.S()).norm() <= 1e-10 * s.S().norm());

  try {
    shifted_form(toy(), 2.0, 1.0);
    FAIL("expected NotCoercive");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::NotCoercive);
    CHECK(e.value() <= 0.0);
  }
}

TEST_CASE("shifted_form is linear in the shift") {
  std::mt19937_64 rng(7);
  const auto t = oracle::random_triple(6, rng);
  const FormTriple triple(t.A, t.B, t.M);
  const ShiftedForm s1 = shifted_form(triple, 0.3, 4.0);
  const ShiftedForm s2 = shifted_form(triple, 0.3, 6.5);
  CHECK((s2.S() - s1.S() - 2.5 * t.M).cwiseAbs().maxCoeff() <= 1e-13);
}

TEST_CASE("shifted_form of a Steklov triple at lambda=0, tau=0 equals A") {
  SteklovCoefficients c;
  c.c = {1.0};
  c.b0 = {1.0, 1.0};
  const FormTriple t = assemble_forms(Mesh1D::uniform(32), c);
  const ShiftedForm s = shifted_form(t, 0.0, 0.0);
  CHECK((s.S() - t.A()).norm() == 0.0);
  CHECK(s.min_pivot() > 0.0);
}

TEST_CASE("find_coercive_shift doubles until coercive") {
  CHECK(find_coercive_shift(toy(), 0.0).tau() == 1.0);
  CHECK(find_coercive_shift(toy(), 2.0).tau() == 2.0);
  const ShiftedForm s = find_coercive_shift(toy(), 10.0);
  CHECK(s.tau() == 16.0);
  CHECK(s.S()(0, 0) == 7.0);
  CHECK(s.S()(1, 1) == 27.0);
}

TEST_CASE("find_coercive_shift gives up past 2^60") {
  Matrix M = Matrix::Identity(2, 2);
  M(1, 1) = 0.0;  // no shift can fix the second direction
  Matrix A = Matrix::Identity(2, 2);
  Matrix B = Matrix::Zero(2, 2);
  B(1, 1) = 1.0;
  CHECK(kind_of([&] { find_coercive_shift(FormTriple(A, B, M), 2.0); }) == ErrorKind::ShiftSearchExceeded);
}

TEST_CASE("energy and dual norms") {
  const ShiftedForm s = find_coercive_shift(toy(), 0.0);
  CHECK(energy_norm(s, Eigen::Vector2d(1, 0)) == doctest::Approx(std::sqrt(2.0)));
  CHECK(energy_norm(s, Vector::Zero(2)) == 0.0);
  CHECK(dual_norm(s, Eigen::Vector2d(2, 0)) == doctest::Approx(std::sqrt(2.0)));
  CHECK(dual_norm(s, Vector::Zero(2)) == 0.0);
}

TEST_CASE("energy norm of the constant on a Steklov mesh") {
  // S = A at lambda = 0, tau = 0; for u = 1: int c u^2 = c, no gradient, Robin adds b_c.
  SteklovCoefficients c;
  c.c = {2.0};
  c.b_c = {0.5, 0.25};
  const Mesh1D mesh = Mesh1D::uniform(40);
  const ShiftedForm s = shifted_form(assemble_forms(mesh, c), 0.0, 0.0);
  const Vector one = Vector::Ones(mesh.n_nodes());
  CHECK(std::abs(energy_norm(s, one) - std::sqrt(2.0 + 0.75)) <= 1e-10);
}

TEST_CASE("Riesz identity: dual norm of S u equals energy norm of u") {
  std::mt19937_64 rng(11);
  const auto t = oracle::random_triple(12, rng);
  const FormTriple triple(t.A, t.B, t.M);
  const ShiftedForm s = find_coercive_shift(triple, -0.7);
  for (int trial = 0; trial < 20; ++trial) {
    const Vector u = oracle::random_vector(12, rng);
    const double e = energy_norm(s, u);
    CHECK(std::abs(dual_norm(s, s.S() * u) - e) <= 1e-10 * e);
  }
}

TEST_CASE("dual norm bounds the Monte-Carlo supremum") {
  std::mt19937_64 rng(5);
  const Matrix Q = oracle::random_matrix(10, rng);
  const Matrix S = Q.transpose() * Q + Matrix::Identity(10, 10);
  const FormTriple triple(S, Matrix::Zero(10, 10), Matrix::Identity(10, 10));
  const ShiftedForm s = shifted_form(triple, 0.0, 0.0);
  const Vector ell = oracle::random_vector(10, rng);
  const double dn = dual_norm(s, ell);
  const double mc = oracle::monte_carlo_dual_norm(S, ell, 10000, rng);
  CHECK(mc <= dn * (1.0 + 1e-12));
  CHECK(mc >= 0.5 * dn);
  // The supremum is attained at S^{-1} ell.
  const Vector v = S.llt().solve(ell);
  CHECK(std::abs(ell.dot(v) / std::sqrt(v.dot(S * v)) - dn) <= 1e-10 * dn);
}

TEST_CASE("error kinds have stable names") {
  CHECK(std::string(to_string(ErrorKind::NotCoercive)) == "NotCoercive");
  CHECK(std::string(to_string(ErrorKind::Io)) == "IoError");
  CHECK(std::string(to_string(BasisKind::Steklov1D)) == "steklov-1d");
}
