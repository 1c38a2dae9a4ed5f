#include <gtest/gtest.h>

#include "nowcast/calendar.hpp"
#include "nowcast/error.hpp"
#include "nowcast/random.hpp"

using namespace nowcast;

TEST(Month, ParseAndFormat) {
    const Month m = Month::parse("2020-03");
    EXPECT_EQ(m.year(), 2020);
    EXPECT_EQ(m.month(), 3);
    EXPECT_EQ(m.str(), "2020-03");
    EXPECT_EQ((m + 10).str(), "2021-01");
    EXPECT_EQ((m - 3).str(), "2019-12");
    EXPECT_EQ(Month(2021, 1) - Month(2019, 12), 13);
}

TEST(Month, RejectsMalformed) {
    for (const char* bad : {"2020-13", "2020-00", "2020-3", "20a0-01", "2020/01", ""})
        EXPECT_THROW(Month::parse(bad), Error) << bad;
}

TEST(Date, ParseOrderAndCalendar) {
    const Date d = Date::parse("2020-02-29");
    EXPECT_EQ(d.str(), "2020-02-29");
    EXPECT_THROW(Date::parse("2019-02-29"), Error);
    EXPECT_THROW(Date::parse("2020-04-31"), Error);
    EXPECT_LT(Date::parse("2020-01-31"), Date::parse("2020-02-01"));
    EXPECT_EQ(days_in_month(1900, 2), 28);
    EXPECT_EQ(days_in_month(2000, 2), 29);
    EXPECT_EQ(Date::first_of(Month(2020, 5)).str(), "2020-05-01");
    EXPECT_TRUE(Date::max().is_max());
}

TEST(Random, DeriveSeedSeparatesStreams) {
    EXPECT_EQ(derive_seed(7, 1), derive_seed(7, 1));
    EXPECT_NE(derive_seed(7, 1), derive_seed(7, 2));
    EXPECT_NE(derive_seed(7, 1), derive_seed(8, 1));
    EXPECT_NE(derive_seed(7, 1, 0), derive_seed(7, 1, 1));
}

TEST(Random, NormalMoments) {
    Rng rng(42);
    const int n = 200000;
    double s = 0, s2 = 0;
    for (int i = 0; i < n; ++i) {
        const double z = rng.normal();
        s += z;
        s2 += z * z;
    }
    EXPECT_NEAR(s / n, 0.0, 0.01);
    EXPECT_NEAR(s2 / n, 1.0, 0.01);
}

TEST(Random, SampleWithoutReplacementIsDistinct) {
    Rng rng(3);
    auto idx = rng.sample_without_replacement(50, 20);
    ASSERT_EQ(idx.size(), 20u);
    std::sort(idx.begin(), idx.end());
    EXPECT_EQ(std::adjacent_find(idx.begin(), idx.end()), idx.end());
    EXPECT_LT(idx.back(), 50u);
}
