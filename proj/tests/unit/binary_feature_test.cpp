#include <random>

#include <gtest/gtest.h>

#include "netexplain/binary_feature.hpp"
#include "netexplain/errors.hpp"

namespace netexplain {
namespace {

TEST(BinaryFeature, StringRoundTripChannelZeroLeftmost) {
  const auto f = BinaryFeature::from_string("10101");
  EXPECT_EQ(f.size(), 5u);
  EXPECT_TRUE(f.test(0));
  EXPECT_FALSE(f.test(1));
  EXPECT_TRUE(f.test(4));
  EXPECT_EQ(f.popcount(), 3u);
  EXPECT_EQ(f.indices(), (std::vector<std::size_t>{0, 2, 4}));
  EXPECT_EQ(f.to_string(), "10101");
  EXPECT_THROW(BinaryFeature::from_string("10x"), ValueError);
}

TEST(BinaryFeature, SpansMultipleWords) {
  BinaryFeature f(200);
  f.set(0);
  f.set(63);
  f.set(64);
  f.set(199);
  EXPECT_EQ(f.popcount(), 4u);
  EXPECT_EQ(f.indices(), (std::vector<std::size_t>{0, 63, 64, 199}));
  f.set(63, false);
  EXPECT_FALSE(f.test(63));
  EXPECT_THROW(f.test(200), IndexError);
  EXPECT_THROW(f.set(200), IndexError);
}

TEST(BinaryFeature, AndAndSubset) {
  const auto a = BinaryFeature::from_string("11001");
  const auto q = BinaryFeature::from_string("10101");
  EXPECT_EQ((a & q).to_string(), "10001");
  EXPECT_TRUE((a & q).is_subset_of(a));
  EXPECT_FALSE(a.is_subset_of(q));
  EXPECT_THROW(a & BinaryFeature(4), ShapeError);
  EXPECT_THROW((void)a.is_subset_of(BinaryFeature(6)), ShapeError);
}

TEST(BinaryFeature, StringRoundTripProperty) {
  std::mt19937_64 rng(5);
  for (int i = 0; i < 100; ++i) {
    std::string s(1 + rng() % 300, '0');
    for (auto& c : s) c = (rng() & 1) ? '1' : '0';
    EXPECT_EQ(BinaryFeature::from_string(s).to_string(), s);
  }
}

}  // namespace
}  // namespace netexplain
