#include <gtest/gtest.h>

#include "qarena/sql/executor.hpp"
#include "qarena/sql/parser.hpp"
#include "sql_oracle.hpp"

namespace qarena::sql {
namespace {

std::string run_engine(const std::vector<std::string>& statements) {
  Database db;
  ExecOutcome last{AffectedCount{}};
  for (const auto& q : statements) last = execute(db, parse(q));
  return serialize_result(last.rows());
}

TEST(EngineOracle, RandomWorkloadsMatchReferenceEvaluator) {
  testing::WorkloadGenerator gen(20240601);
  int mismatches = 0;
  for (int i = 0; i < 1000; ++i) {
    const testing::OWorkload w = gen.next();
    const auto statements = gen.render(w);
    std::string engine;
    try {
      engine = run_engine(statements);
    } catch (const SqlError& e) {
      ADD_FAILURE() << "engine error " << e.what() << " on: " << statements.back();
      ++mismatches;
      continue;
    }
    const std::string reference = testing::ReferenceEvaluator::run(w);
    if (engine != reference) {
      ++mismatches;
      ADD_FAILURE() << "mismatch for workload " << i << "\n"
                    << statements.back() << "\nengine:\n" << engine << "\nreference:\n" << reference;
    }
  }
  EXPECT_EQ(mismatches, 0);
}

TEST(EngineOracle, GeneratedQueriesRoundTripThroughRender) {
  testing::WorkloadGenerator gen(99);
  for (int i = 0; i < 300; ++i) {
    for (const auto& q : gen.render(gen.next())) {
      const Statement s = parse(q);
      ASSERT_EQ(parse(render(s)), s) << q;
    }
  }
}

}  // namespace
}  // namespace qarena::sql
