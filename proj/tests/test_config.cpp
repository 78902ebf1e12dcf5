#include "fredholm/config.hpp"
#include "fredholm/errors.hpp"

#include <doctest.h>

#include <cstdio>

using namespace fredholm;

namespace {

const char* kToy = R"({"dim":2,"A":[[1,0],[0,1]],"B":[[1,0],[0,-1]],"M":[[1,0],[0,1]]})";

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

TEST_CASE("triple documents") {
  const Problem p = parse_problem(kToy);
  REQUIRE(p.triple);
  CHECK(p.triple->dim() == 2);
  CHECK(p.triple->B()(1, 1) == -1.0);
  CHECK(p.triple->basis() == BasisKind::UserSupplied);
  CHECK_FALSE(p.mesh);
  CHECK_FALSE(p.spec);
}

TEST_CASE("malformed documents") {
  CHECK(kind_of([] { parse_problem("{not json"); }) == ErrorKind::Parse);
  CHECK(kind_of([] { parse_problem("[1,2]"); }) == ErrorKind::Parse);
  CHECK(kind_of([] { parse_problem(R"({"dim":2,"A":[[1,0],[0,1]]})"); }) == ErrorKind::Parse);
  CHECK(kind_of([] { parse_problem(R"({"dim":2,"A":[[1,0]],"B":[[1,0],[0,1]],"M":[[1,0],[0,1]]})"); }) ==
        ErrorKind::Parse);
  CHECK(kind_of([] { parse_problem(R"({"dim":1,"A":[["x"]],"B":[[0]],"M":[[1]]})"); }) == ErrorKind::Parse);
  CHECK(kind_of([] { load_problem("/nonexistent/problem.json"); }) == ErrorKind::Io);
}

TEST_CASE("steklov documents") {
  const Problem p = parse_problem(
      R"({"mesh":{"n":4,"interval":[0,2]},"coeffs":{"A":1,"c":[1,1,2,2],"m0":1,"b_c":[0.5,0],"b0":[1,1]}})");
  REQUIRE(p.mesh);
  REQUIRE(p.triple);
  CHECK(p.mesh->n_nodes() == 5);
  CHECK(p.mesh->h(0) == 0.5);
  CHECK(p.coeffs->c.size() == 4);
  CHECK(p.triple->A()(0, 0) == doctest::Approx(2.0 + 0.5 / 3 + 0.5));
  CHECK(p.triple->basis() == BasisKind::Steklov1D);
}

TEST_CASE("incompatible steklov coefficients") {
  const char* doc = R"({"mesh":{"n":4},"coeffs":{"c":0,"b_c":[0,0]}})";
  CHECK(kind_of([&] { parse_problem(doc); }) == ErrorKind::IncompatibleCoefficients);
  const Problem p = parse_problem(doc, true);
  CHECK_FALSE(p.triple);
  CHECK(kind_of([&] { p.forms(); }) == ErrorKind::IncompatibleCoefficients);
}

TEST_CASE("nonlinearity documents") {
  const Problem p = parse_problem(R"({"mesh":{"n":4},"coeffs":{"c":1,"b0":[1,1]},
    "nonlinearity":{"affine":{"density":[1],"on":"interior"},
                    "power_terms":[{"c":-1,"p":3,"density":[1],"on":"interior"},
                                   {"p":4,"ell":[1,0,0,0,0]}],
                    "nemytskii":{"fn":"sin","on":"boundary"}}})");
  REQUIRE(p.spec);
  CHECK(p.spec->affine->coeff(0) == doctest::Approx(0.125));
  CHECK(p.spec->affine->coeff(2) == doctest::Approx(0.25));
  CHECK(p.spec->affine->sum() == doctest::Approx(1.0));
  REQUIRE(p.spec->power_terms.size() == 2);
  CHECK(p.spec->power_terms[0].c == -1.0);
  CHECK(p.spec->power_terms[1].c == 1.0);
  CHECK(p.spec->power_terms[1].p == 4.0);
  REQUIRE(p.spec->nemytskii);
  CHECK(p.spec->nemytskii->on == "boundary");
  CHECK(p.spec->nemytskii->pairing.sum() == 2.0);
}

TEST_CASE("strict mode rejects non-positive densities unless relaxed") {
  const char* strict = R"({"mesh":{"n":2},"coeffs":{"c":1},
    "nonlinearity":{"power_terms":[{"p":3,"density":[1,-1]}]}})";
  CHECK(kind_of([&] { parse_problem(strict); }) == ErrorKind::PositivityViolated);
  const char* relaxed = R"({"mesh":{"n":2},"coeffs":{"c":1},
    "nonlinearity":{"strict":false,"power_terms":[{"p":3,"density":[1,-1]}]}})";
  CHECK(parse_problem(relaxed).spec->power_terms.size() == 1);
}

TEST_CASE("nonlinearity errors") {
  CHECK(kind_of([] {
          parse_problem(R"({"dim":1,"A":[[1]],"B":[[0]],"M":[[1]],"nonlinearity":{"power_terms":[{"p":2,"ell":[1]}]}})");
        }) == ErrorKind::InvalidExponent);
  CHECK(kind_of([] {
          parse_problem(R"({"dim":1,"A":[[1]],"B":[[0]],"M":[[1]],"nonlinearity":{"affine":[1,2]}})");
        }) == ErrorKind::DimensionMismatch);
  CHECK(kind_of([] {
          parse_problem(R"({"dim":1,"A":[[1]],"B":[[0]],"M":[[1]],"nonlinearity":{"nemytskii":{"fn":"sin","on":"boundary"}}})");
        }) == ErrorKind::Parse);
  CHECK(kind_of([] {
          parse_problem(R"({"dim":1,"A":[[1]],"B":[[0]],"M":[[1]],"nonlinearity":{"nemytskii":{"fn":"exp"}}})");
        }) == ErrorKind::InvalidArgument);
}

TEST_CASE("functional descriptors") {
  const Problem toy = parse_problem(kToy);
  CHECK((parse_functional(toy, "1,2") - Eigen::Vector2d(1, 2)).norm() == 0.0);
  CHECK(kind_of([&] { parse_functional(toy, "1,2,3"); }) == ErrorKind::DimensionMismatch);
  CHECK(kind_of([&] { parse_functional(toy, "1,x"); }) == ErrorKind::Parse);
  CHECK(kind_of([&] { parse_functional(toy, "interior:1"); }) == ErrorKind::Parse);
  CHECK(kind_of([&] { parse_functional(toy, "volume:1"); }) == ErrorKind::Parse);

  const Problem st = parse_problem(R"({"mesh":{"n":2},"coeffs":{"c":1}})");
  CHECK((parse_functional(st, "interior:1") - Eigen::Vector3d(0.25, 0.5, 0.25)).norm() <= 1e-15);
  CHECK((parse_functional(st, "boundary:1,0") - Eigen::Vector3d(1, 0, 0)).norm() == 0.0);
}

TEST_CASE("file round trip") {
  const std::string path = "config_roundtrip_test.json";
  write_file(path, kToy);
  CHECK(read_file(path) == kToy);
  CHECK(load_problem(path).triple->dim() == 2);
  std::remove(path.c_str());
  CHECK(kind_of([] { write_file("/nonexistent-dir/x.json", "{}"); }) == ErrorKind::Io);
}
