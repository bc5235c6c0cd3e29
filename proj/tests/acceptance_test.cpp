// Acceptance suite: one test case per criterion, each printing its
// pass/fail line.  The same checks back the CLI `selftest` subcommand.

#include <cstdio>

#include "catch_amalgamated.hpp"
#include "innerlevel/selftest.hpp"

using namespace innerlevel;

namespace {

SelftestContext& shared_context() {
  static SelftestContext ctx;
  return ctx;
}

void report(const CriterionResult& r) {
  std::printf("%s\n", criterion_line(r).c_str());
  std::fflush(stdout);
  INFO(r.detail);
  CHECK(r.pass);
}

CriterionResult timed(CriterionResult (*fn)()) {
  auto t0 = std::chrono::steady_clock::now();
  CriterionResult r = fn();
  r.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  return r;
}

template <class Fn>
CriterionResult timed_ctx(Fn fn) {
  auto t0 = std::chrono::steady_clock::now();
  CriterionResult r = fn(shared_context());
  r.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  return r;
}

}  // namespace

TEST_CASE("criterion 1: geometry suite") { report(timed(criterion_1_geometry)); }

TEST_CASE("criterion 2: evaluation oracle") { report(timed(criterion_2_truncation)); }

TEST_CASE("criterion 3: derivative suite") { report(timed(criterion_3_derivatives)); }

TEST_CASE("criterion 4: composition identity") { report(timed(criterion_4_composition)); }

TEST_CASE("criterion 5: connectivity fixtures") {
  report(timed_ctx([](SelftestContext& c) { return criterion_5_connectivity(c); }));
}

TEST_CASE("criterion 6: inclusion chains") {
  report(timed_ctx([](SelftestContext& c) { return criterion_6_inclusions(c); }));
}

TEST_CASE("criterion 7: component diagnostics") {
  report(timed_ctx([](SelftestContext& c) { return criterion_7_components(c); }));
}

TEST_CASE("criterion 8: aleksandrov suite") { report(timed(criterion_8_aleksandrov)); }

TEST_CASE("criterion 9: verdict agreement") { report(timed(criterion_9_verdicts)); }
