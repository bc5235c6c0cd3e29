#include "catch_amalgamated.hpp"
#include "innerlevel/eval.hpp"
#include "innerlevel/zero_sequence.hpp"

using namespace innerlevel;

namespace {

// brute-force tail sum oracle for parametric kinds
double brute_tail(const ZeroSequence& s, std::size_t N, std::size_t upto) {
  double sum = 0.0;
  for (std::size_t n = N + 1; n <= upto; ++n) sum += 1.0 - std::abs(s.zero(n));
  return sum;
}

}  // namespace

TEST_CASE("geometric enumeration and tail bound") {
  ZeroSequence s = ZeroSequence::geometric(0.5);
  CHECK(s.zero(1).real() == Catch::Approx(0.5));
  CHECK(s.zero(3).real() == Catch::Approx(0.875));
  for (std::size_t N : {0u, 1u, 5u, 20u}) {
    double bound = s.tail_bound(N);
    double brute = brute_tail(s, N, N + 400);
    CHECK(brute <= bound);
    CHECK(bound <= brute * 1.0001 + 1e-30);  // the geometric bound is exact
  }
}

TEST_CASE("factorial enumeration and tail bound") {
  ZeroSequence s = ZeroSequence::factorial();
  CHECK(std::abs(s.zero(1)) == 0.0);                       // 1 - 1/1!
  CHECK(s.zero(2).real() == Catch::Approx(0.5));           // 1 - 1/2!
  CHECK(s.zero(4).real() == Catch::Approx(1.0 - 1.0 / 24.0));
  for (std::size_t N : {1u, 3u, 8u, 12u}) {
    double bound = s.tail_bound(N);
    double brute = brute_tail(s, N, N + 60);
    CHECK(brute <= bound);
    CHECK(bound <= 2.5 * brute);  // 2/(N+1)! overshoots by less than (N+2)/(N+1)
  }
}

TEST_CASE("negated mirror interleaves and doubles the tail") {
  ZeroSequence s = ZeroSequence::negated_mirror(ZeroSequence::geometric(0.5));
  CHECK(s.zero(1).real() == Catch::Approx(0.5));
  CHECK(s.zero(2).real() == Catch::Approx(-0.5));
  CHECK(s.zero(3).real() == Catch::Approx(0.75));
  CHECK(s.zero(4).real() == Catch::Approx(-0.75));
  for (std::size_t N : {0u, 2u, 7u}) {
    CHECK(brute_tail(s, N, N + 300) <= s.tail_bound(N));
  }
  auto acc = s.accumulation_points();
  REQUIRE(acc.size() == 2);
}

TEST_CASE("explicit lists validate and enumerate with multiplicity") {
  ZeroSequence s = ZeroSequence::explicit_zeros({{cplx(0.0, 0.0), 2}, {cplx(0.5, 0.0), 1}});
  CHECK(s.finite_count() == 3);
  CHECK(std::abs(s.zero(2)) == 0.0);
  CHECK(s.zero(3).real() == Catch::Approx(0.5));
  CHECK(s.tail_bound(3) == 0.0);
  CHECK_THROWS_AS(ZeroSequence::explicit_zeros({{cplx(1.0, 0.0), 1}}), Error);
  CHECK_THROWS_AS(ZeroSequence::explicit_zeros({{cplx(0.5, 0.0), 0}}), Error);
}

TEST_CASE("truncation_depth: explicit sequences have no tail") {
  ZeroSequence s = ZeroSequence::explicit_zeros({{cplx(0.3, 0.1), 2}, {cplx(-0.5, 0.0), 1}});
  CHECK(truncation_depth(s, UnitDiskPoint(cplx(0.2, 0.0)), 1e-14) == 3);
}

TEST_CASE("truncation_depth: geometric q=1/2 at the origin needs N=35 for 1e-10") {
  ZeroSequence s = ZeroSequence::geometric(0.5);
  std::size_t N = truncation_depth(s, UnitDiskPoint(cplx(0.0, 0.0)), 1e-10);
  CHECK(N == 35);
}

TEST_CASE("truncation_depth: factorial at the origin stays below 14 for 1e-10") {
  ZeroSequence s = ZeroSequence::factorial();
  std::size_t N = truncation_depth(s, UnitDiskPoint(cplx(0.0, 0.0)), 1e-10);
  CHECK(N <= 14);
}

TEST_CASE("truncation bound validated against long partial products") {
  // |B_N(z) - B_{N'}(z)| must stay below the claimed bound for a much deeper N'
  for (double q : {0.5, 0.7}) {
    ZeroSequence s = ZeroSequence::geometric(q);
    for (cplx z : {cplx(0.0, 0.0), cplx(0.3, 0.4), cplx(-0.8, 0.1)}) {
      std::size_t N = truncation_depth(s, UnitDiskPoint(z), 1e-10);
      auto partial = [&](std::size_t upto) {
        cplx v(1.0, 0.0);
        for (std::size_t n = 1; n <= upto; ++n)
          v *= detail::blaschke_factor_jet(s.zero(n), z).f;
        return v;
      };
      CHECK(std::abs(partial(N) - partial(std::max<std::size_t>(200, 4 * N))) <= 1e-10);
    }
  }
  {
    ZeroSequence s = ZeroSequence::factorial();
    cplx z(0.0, 0.0);
    std::size_t N = truncation_depth(s, UnitDiskPoint(z), 1e-10);
    cplx a(1.0, 0.0), b(1.0, 0.0);
    for (std::size_t n = 1; n <= N; ++n) a *= detail::blaschke_factor_jet(s.zero(n), z).f;
    for (std::size_t n = 1; n <= 200; ++n) b *= detail::blaschke_factor_jet(s.zero(n), z).f;
    CHECK(std::abs(a - b) <= 1e-10);
  }
}

TEST_CASE("tail_min_distance lower-bounds the actual tail distances") {
  ZeroSequence s = ZeroSequence::geometric(0.5);
  for (double theta : {0.01, 0.3, kPi / 2, kPi}) {
    BoundaryPoint xi(theta);
    for (std::size_t N : {4u, 16u}) {
      double d = s.tail_min_distance(xi, N);
      for (std::size_t n = N + 1; n <= N + 200; ++n)
        CHECK(std::abs(xi.point() - s.zero(n)) >= d - 1e-12);
    }
  }
}

TEST_CASE("zero removal on parametric sequences") {
  ZeroSequence s = ZeroSequence::geometric(0.5);
  REQUIRE(s.remove_zero(cplx(0.5, 0.0), 1e-14));
  CHECK(s.zero(1).real() == Catch::Approx(0.75));  // first zero skipped
  CHECK_FALSE(s.remove_zero(cplx(0.123, 0.0), 1e-14));
  ZeroSequence e = ZeroSequence::explicit_zeros({{cplx(0.5, 0.0), 2}});
  REQUIRE(e.remove_zero(cplx(0.5, 0.0), 1e-14));
  CHECK(e.finite_count() == 1);
}
