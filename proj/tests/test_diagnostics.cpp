#include <gtest/gtest.h>

#include "freeshift/diagnostics.hpp"
#include "freeshift/io.hpp"
#include "oracles.hpp"

using namespace freeshift;

namespace {

void expect_self_consistent(const VerdictReport& r) {
  EXPECT_EQ(classify(r), r.classification);
  for (const auto& c : r.checks) EXPECT_EQ(check_verdict(r.kind, c, r.rule), c.verdict) << c.name;
  const auto back = io::report_from_json(io::to_json(r));
  EXPECT_EQ(classify(back), r.classification);
  EXPECT_EQ(io::to_json(back).dump(), io::to_json(r).dump());
}

}  // namespace

TEST(Verdicts, ThresholdsFollowRule) {
  const DecisionRule rule{};
  EXPECT_EQ(check_verdict(ReportKind::amenability, {"g", 0.01, 0.01, {}}, rule), "within noise");
  EXPECT_EQ(check_verdict(ReportKind::amenability, {"g", 0.2, 0.01, {}}, rule), "gap");
  EXPECT_EQ(check_verdict(ReportKind::amenability, {"g", 0.0305, 0.01, {}}, rule), "marginal");
  EXPECT_EQ(check_verdict(ReportKind::half_bound, {"h", -0.05, 0.01, {}}, rule), "violated");
  EXPECT_EQ(check_verdict(ReportKind::half_bound, {"h", -0.02, 0.01, {}}, rule), "holds");
  EXPECT_EQ(check_verdict(ReportKind::half_bound, {"h", 0.1, 0.01, {}}, rule), "strict");
  EXPECT_EQ(check_verdict(ReportKind::divergence, {"1-g", -0.1, 0.0, {}}, rule), "divergence-type");
  EXPECT_EQ(check_verdict(ReportKind::divergence, {"1-g", -0.5, 0.0, {}}, rule), "convergence-type");
}

TEST(Amenability, FiniteQuotientIsConsistent) {
  const Alphabet a(2);
  const auto r = amenability_report(Quotient::symmetric3(a), DepthKPotential::constant(a, -1.0),
                                    geometric_from_ratios(a, std::vector<double>{0.5, 0.3}), {-1.0, 0.0, 1.0});
  EXPECT_EQ(r.classification, "consistent with amenable");
  expect_self_consistent(r);
}

TEST(Amenability, FreeKillShowsGap) {
  const Alphabet a(3);
  const auto r = amenability_report(Quotient::free_kill(a, {2}), DepthKPotential::constant(a, -1.0), constant_geometric(a, -1.0),
                                    {0.0}, FiberOptions{18});
  EXPECT_EQ(r.classification, "non-amenable detected");
  expect_self_consistent(r);
}

TEST(HalfBound, FiniteQuotientHoldsStrictly) {
  const Alphabet a(2);
  const auto r = half_bound_check(Quotient::cyclic2(a), DepthKPotential::constant(a, -1.0),
                                  geometric_from_ratios(a, std::vector<double>{0.5, 0.3}), {-1, 1, 0.1}, 11, {}, {}, 1);
  EXPECT_EQ(r.classification, "half bound holds strictly");
  EXPECT_GT(r.checks.size(), 2u);
  expect_self_consistent(r);
}

TEST(PressureInequality, RequiresSymmetricPotential) {
  const Alphabet a(2);
  const DepthKPotential f(a, 2, oracle::random_table(2, 2, 4, -1, 1, false));
  EXPECT_THROW(pressure_inequality_check(Quotient::cyclic2(a), f), ValidationError);
  const DepthKPotential g(a, 2, oracle::random_table(2, 2, 4, -1, 1, true));
  const auto r = pressure_inequality_check(Quotient::cyclic2(a), g);
  EXPECT_NE(r.classification, "inequality violated");
  expect_self_consistent(r);
}

TEST(Divergence, RecurrentAndTransientLattices) {
  const auto z1 = divergence_probe(Quotient::standard_lattice(Alphabet(2), 1), DepthKPotential::constant(Alphabet(2), 0.0), {40});
  EXPECT_EQ(z1.classification, "divergence-type (heuristic)");
  EXPECT_NEAR(z1.quantity("gamma")->value, 0.5, 0.15);
  const auto z3 = divergence_probe(Quotient::standard_lattice(Alphabet(3), 3), DepthKPotential::constant(Alphabet(3), 0.0), {40});
  EXPECT_EQ(z3.classification, "convergence-type (heuristic)");
  EXPECT_NEAR(z3.quantity("gamma")->value, 1.5, 0.15);
  expect_self_consistent(z1);
  expect_self_consistent(z3);
}

TEST(Divergence, NeedsSixTerms) {
  EXPECT_THROW(divergence_probe(Quotient::standard_lattice(Alphabet(2), 2), DepthKPotential::constant(Alphabet(2), 0.0), {10}),
               InsufficientDataError);
}

TEST(SymmetricOnAverage, SymmetricPotentialGivesOne) {
  const Alphabet a(2);
  const auto q = Quotient::standard_lattice(a, 2);
  const auto s = symmetric_on_average_statistic(q, DepthKPotential::constant(a, 0.0), {parse_word(a, "a"), parse_word(a, "ab")}, 9);
  EXPECT_NEAR(s.max_ratio, 1.0, 1e-12);
  const auto skew = symmetric_on_average_statistic(q, DepthKPotential(a, 1, {0.3, -0.3, 0.0, 0.0}), {parse_word(a, "a")}, 9);
  EXPECT_GT(skew.max_ratio, 1.5);
}

TEST(SymmetricOnAverage, UndefinedRatioNamesElement) {
  const Alphabet a(2);
  try {
    symmetric_on_average_statistic(Quotient::standard_lattice(a, 2), DepthKPotential::constant(a, 0.0), {parse_word(a, "aa")}, 1);
    FAIL();
  } catch (const NumericError& e) {
    EXPECT_NE(std::string(e.what()).find("g=aa"), std::string::npos);
  }
}

TEST(Gibbs, ZeroPotentialConstant) {
  const auto g = gibbs_verify(DepthKPotential::constant(Alphabet(2), 0.0), 8);
  EXPECT_NEAR(g.data.constant[8], 4.0 / 3.0, 1e-10);
  EXPECT_NEAR(g.data.pressure, std::log(3.0), 1e-12);
  EXPECT_LE(g.data.level_sum_error, 1e-10);
  EXPECT_NEAR(g.data.measure(parse_word(Alphabet(2), "ab")), 1.0 / 12.0, 1e-12);
  expect_self_consistent(g.report);
}

TEST(Gibbs, RandomPotentialIsConsistent) {
  const auto table = oracle::random_table(3, 1, 11, -1, 1);
  const auto g = gibbs_verify(DepthKPotential(Alphabet(3), 1, table), 8);
  EXPECT_EQ(g.report.classification, "Gibbs property consistent");
  EXPECT_LE(g.data.compatibility_error, 1e-12);
  EXPECT_LE(g.data.shift_invariance_error, 1e-12);
  // Cylinder masses are comparable to exp(S_ω f - nP) within the constant.
  for (const auto& w : oracle::words(3, 4)) {
    const auto lw = ReducedWord::trusted(std::vector<Letter>(w.begin(), w.end()));
    double s = 0;
    for (int x : w) s += table[static_cast<std::size_t>(x)];
    const double r = g.data.measure(lw) / std::exp(s - 4 * g.data.pressure);
    EXPECT_LE(r, g.data.constant[4] * (1 + 1e-12));
    EXPECT_GE(r, 1 / g.data.constant[4] * (1 - 1e-12));
  }
  EXPECT_THROW(gibbs_verify(DepthKPotential(Alphabet(2), 2, oracle::random_table(2, 2, 1, -1, 1)), 8), ValidationError);
}
