#include "fredholm/config.hpp"
#include "fredholm/errors.hpp"
#include "fredholm/verify.hpp"

#include <doctest.h>

using namespace fredholm;

namespace {

const char* kToy = R"({"dim":2,"A":[[1,0],[0,1]],"B":[[1,0],[0,-1]],"M":[[1,0],[0,1]]})";

}  // namespace

TEST_CASE("every suite passes on the toy triple") {
  const Problem p = parse_problem(kToy);
  VerifyOptions o;
  o.seed = 1;
  const VerifyReport r = run_verify(p, o);
  CHECK(r.pass);
  for (const char* suite : {"spectrum", "bounds", "nonlinear", "nemytskii"}) {
    bool seen = false;
    for (const auto& row : r.rows) seen = seen || row.suite == suite;
    CHECK(seen);
  }
  CHECK(r.table().find("all properties passed") != std::string::npos);
}

TEST_CASE("suites pass on a steklov problem with a sin term") {
  const Problem p = parse_problem(R"({"mesh":{"n":32},"coeffs":{"c":1,"b0":[1,1]},
    "nonlinearity":{"affine":{"density":[1]},"nemytskii":{"fn":"sin"}}})");
  VerifyOptions o;
  o.seed = 5;
  const VerifyReport r = run_verify(p, o);
  INFO(r.table());
  CHECK(r.pass);
}

TEST_CASE("a corrupted mass matrix fails the spectrum suite") {
  const Problem p = parse_problem(R"({"dim":2,"A":[[1,0],[0,1]],"B":[[0,0],[0,0]],"M":[[1,0],[0,-1]]})");
  VerifyOptions o;
  o.suite = "spectrum";
  const VerifyReport r = run_verify(p, o);
  CHECK_FALSE(r.pass);
  CHECK(r.table().find("FAIL") != std::string::npos);
}

TEST_CASE("the same seed gives the same table") {
  const Problem p = parse_problem(kToy);
  VerifyOptions o;
  o.seed = 42;
  o.suite = "bounds";
  CHECK(run_verify(p, o).table() == run_verify(p, o).table());
}

TEST_CASE("unknown suites are rejected") {
  VerifyOptions o;
  o.suite = "everything";
  CHECK_THROWS_AS(run_verify(parse_problem(kToy), o), Error);
}
