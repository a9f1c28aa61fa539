#include <gtest/gtest.h>

#include <map>
#include <random>

#include "cubealg/algebra/operations.hpp"
#include "support/fixtures.hpp"
#include "support/properties.hpp"

using namespace cubealg;

namespace {

template <class Trial>
void repeat(std::uint64_t seed, int trials, Trial trial) {
  std::mt19937_64 rng(seed);
  for (int i = 0; i < trials; ++i) {
    auto failure = trial(rng);
    ASSERT_TRUE(failure.empty()) << "trial " << i << ": " << failure;
  }
}

}  // namespace

TEST(Property, CompiledConditionsMatchTruthTable) { repeat(1, 60, properties::boolean_closure); }
TEST(Property, PrimeSumDecodes) { repeat(2, 60, properties::prime_sum); }
TEST(Property, SoundnessAgreesWithBruteForce) { repeat(3, 200, properties::soundness); }
TEST(Property, SnapshotRoundTrip) { repeat(4, 100, properties::snapshot_round_trip); }
TEST(Property, StatementRoundTrip) { repeat(5, 300, properties::statement_round_trip); }
TEST(Property, RationalRoundTrip) { repeat(6, 300, properties::rational_round_trip); }

// Slice sums the protected measure, which the first slice zeroes outside the
// first product; slicing Time afterwards totals lego sales per city.
TEST(Property, SuccessiveSlicesSum) {
  auto s = algebra::slice(fixtures::running_cube(), "Product");
  s = algebra::slice(s, "Time");
  std::map<std::string, mpq_class> per_city;
  for (const auto& r : fixtures::running_rows()) {
    if (r.product == "lego") per_city[r.city] += r.sales;
  }
  auto rows = fixtures::running_rows();
  std::size_t live = 0;
  for (std::size_t c = 0; c < s.cell_count(); ++c) {
    if (!s.live(c)) continue;
    ++live;
    EXPECT_EQ(s.value(engine::MeasureRef::computed(0), c),
              exactnum::ExactValue(per_city.at(rows[c].city)));
  }
  EXPECT_EQ(live, 4u);
}
