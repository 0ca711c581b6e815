#include <gtest/gtest.h>

#include "smr/audit.hpp"
#include "smr/core.hpp"
#include "smr/error.hpp"
#include "smr/report.hpp"
#include "smr/scenarios.hpp"
#include "support.hpp"

namespace smr {
namespace {

using test::H;
using test::S;

AuditOptions trials(std::size_t n) {
  AuditOptions options;
  options.random_trials = n;
  return options;
}

const AuditMatrix& full_audit() {
  static const AuditMatrix matrix = run_audit({}, 0, trials(10000));
  return matrix;
}

TEST(Matrix, MatchesReference) {
  const auto& matrix = full_audit();
  ASSERT_EQ(matrix.rows.size(), 2u);
  EXPECT_TRUE(matches_reference(matrix));
  for (const auto& row : matrix.rows) {
    const auto expected = reference_row(row.scheme);
    for (std::size_t a = 0; a < 5; ++a) {
      EXPECT_EQ(row.verdicts[a].status, expected[a]) << row.measure << " " << to_string(kAllAxioms[a]);
      EXPECT_GE(row.verdicts[a].trials, 1u);
    }
  }
}

TEST(Matrix, WitnessesReplayAfterJsonRoundTrip) {
  const auto& matrix = full_audit();
  const std::vector<MeasureUnderTest> measures{smr_external_measure(), smr_internal_measure()};
  for (std::size_t m = 0; m < 2; ++m) {
    for (const auto& v : matrix.rows[m].verdicts) {
      if (v.status == Status::holds) {
        EXPECT_FALSE(v.witness);
        continue;
      }
      ASSERT_TRUE(v.witness);
      const auto text = dump_report(to_json(*v.witness));
      const auto restored = witness_from_json(Json::parse(text));
      EXPECT_EQ(restored, *v.witness) << text;
      EXPECT_TRUE(replay_witness(measures[m], restored)) << text;
    }
  }
}

TEST(Matrix, ExternalWitnessValues) {
  const auto& row = full_audit().rows[0];
  const auto& casemix = *row.verdicts[1].witness;
  EXPECT_EQ(casemix.probe.label, "casemix-ext eta 0->5");
  EXPECT_NEAR(casemix.first_value, 1.0526315789473684, 1e-12);
  EXPECT_NEAR(casemix.second_value, 1.0588235294117647, 1e-12);
  const auto& equivalence = *row.verdicts[3].witness;
  EXPECT_NEAR(equivalence.first_value, 0.8, 1e-12);
  EXPECT_NEAR(equivalence.second_value, 0.875, 1e-12);
  const auto& dominance = *row.verdicts[4].witness;
  EXPECT_NEAR(dominance.first_value, 1.1, 1e-12);
  EXPECT_NEAR(dominance.second_value, 1.0, 1e-12);
}

TEST(Matrix, InternalWitnessValues) {
  const auto& row = full_audit().rows[1];
  const auto& scale = *row.verdicts[2].witness;
  EXPECT_NEAR(scale.first_value, 1.4678899082568808, 1e-12);
  EXPECT_NEAR(scale.second_value, 1.2883435582822085, 1e-12);
  const auto& dominance = *row.verdicts[4].witness;
  EXPECT_EQ(dominance.probe.label, "actual-int w11=1 p11=1");
  EXPECT_NEAR(dominance.first_value, 1.135135135135135, 1e-12);
  EXPECT_NEAR(dominance.second_value, 1.0599369085173502, 1e-12);
}

TEST(Matrix, SameSeedSameJson) {
  const auto a = dump_report(to_json(run_audit({}, 7, trials(500))));
  const auto b = dump_report(to_json(run_audit({}, 7, trials(500))));
  EXPECT_EQ(a, b);
  EXPECT_NE(a, dump_report(to_json(run_audit({}, 8, trials(500)))));
}

TEST(Matrix, HoldsAcrossSeeds) {
  for (std::uint64_t seed : {1u, 2u, 3u, 99u}) EXPECT_TRUE(matches_reference(run_audit({}, seed, trials(2000))));
}

TEST(Measures, ConstantFailsOnlyStrictAxioms) {
  const auto matrix = run_audit({constant_measure()}, 0, trials(500));
  const auto& row = matrix.rows.at(2);
  const std::array<Status, 5> expected{Status::violated, Status::holds, Status::holds, Status::holds,
                                       Status::violated};
  for (std::size_t a = 0; a < 5; ++a) EXPECT_EQ(row.verdicts[a].status, expected[a]) << to_string(kAllAxioms[a]);
}

TEST(Measures, ActualRateIsMonotoneButCaseMixSensitive) {
  const auto matrix = run_audit({actual_rate_measure()}, 0, trials(500));
  const auto& row = matrix.rows.at(2);
  EXPECT_EQ(row.verdicts[0].status, Status::holds);
  EXPECT_EQ(row.verdicts[1].status, Status::violated);
  EXPECT_EQ(row.verdicts[2].status, Status::holds);
}

TEST(Probes, RandomAreDeterministicAndValid) {
  for (auto axiom : kAllAxioms) {
    const auto a = random_probes(axiom, 42, 200);
    EXPECT_EQ(a, random_probes(axiom, 42, 200));
    EXPECT_NE(a, random_probes(axiom, 43, 200));
    for (const auto& p : a) EXPECT_NO_THROW(validate_probe(p)) << p.label;
  }
}

TEST(Probes, FixedProbesMatchScenarios) {
  const auto probes = scenario_probes(Axiom::case_mix_insensitivity);
  ASSERT_FALSE(probes.empty());
  const auto spec = default_spec(ScenarioName::casemix_ext);
  EXPECT_EQ(probes[0].before, build_scenario(spec, 0.0));
  EXPECT_EQ(probes[0].after->cohort.at(H("H1")), build_scenario(spec, 5.0).cohort.at(H("H1")));
  EXPECT_EQ(probes[0].after->cohort.at(H("H2")), probes[0].before.cohort.at(H("H2")));
}

TEST(Probes, WrongAxiomRejected) {
  auto probes = scenario_probes(Axiom::scale_insensitivity);
  try {
    check_axiom(smr_external_measure(), Axiom::dominance, probes);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::InvalidInput);
  }
}

TEST(Probes, InvalidPremisesRejected) {
  auto probe = scenario_probes(Axiom::scale_insensitivity).front();
  probe.after->cohort = probe.before.cohort.with_table(test::table("H1", {{"1", 40, 0.05}, {"2", 40, 0.15}}));
  EXPECT_THROW(validate_probe(probe), Error);

  auto monotone = scenario_probes(Axiom::strict_monotonicity).back();
  std::swap(monotone.before, *monotone.after);
  EXPECT_THROW(validate_probe(monotone), Error);
}

TEST(Errors, EmptyProbeSet) {
  try {
    check_axiom(smr_external_measure(), Axiom::equivalence, {});
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::EmptyProbeSet);
  }
  auto internal_only = scenario_probes(Axiom::scale_insensitivity).back();
  internal_only.before.standard.reset();
  internal_only.after->standard.reset();
  try {
    check_axiom(smr_external_measure(), Axiom::scale_insensitivity, {internal_only});
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::EmptyProbeSet);
  }
}

TEST(Errors, DominanceNeedsRatesOnEmptyStrata) {
  auto probe = scenario_probes(Axiom::dominance).back();
  ASSERT_EQ(probe.label, "actual-int w11=1 p11=1");
  probe.supplied_rates.clear();
  try {
    validate_probe(probe);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::IncomparableProbe);
  }
}

TEST(Violation, Rules) {
  EXPECT_TRUE(is_violation(Axiom::strict_monotonicity, 1.0, 1.0));
  EXPECT_FALSE(is_violation(Axiom::strict_monotonicity, 1.0, 1.1));
  EXPECT_FALSE(is_violation(Axiom::scale_insensitivity, 1.0, 1.0 + 1e-13));
  EXPECT_TRUE(is_violation(Axiom::scale_insensitivity, 1.0, 1.0 + 1e-9));
  EXPECT_FALSE(is_violation(Axiom::equivalence, 1.0, 1.0 + 1e-10));
  EXPECT_TRUE(is_violation(Axiom::dominance, 1.0, 1.0));
  EXPECT_FALSE(is_violation(Axiom::dominance, 0.9, 1.0));
}

TEST(Names, AxiomRoundTrip) {
  for (auto axiom : kAllAxioms) EXPECT_EQ(parse_axiom(to_string(axiom)), axiom);
  EXPECT_THROW(parse_axiom("fairness"), Error);
}

}  // namespace
}  // namespace smr
