#include <gtest/gtest.h>

#include <cmath>

#include "nowcast/error.hpp"
#include "nowcast/random.hpp"
#include "nowcast/series.hpp"

using namespace nowcast;

namespace {

MonthlySeries random_positive(const std::string& name, Month start, int n, std::uint64_t seed) {
    Rng rng(seed);
    std::vector<double> v(static_cast<std::size_t>(n));
    for (auto& x : v) x = rng.uniform(1.0, 100.0);
    return MonthlySeries(name, start, v);
}

} // namespace

TEST(MonthlySeries, LeadingMissingDroppedInternalGapRejected) {
    const auto s = MonthlySeries::from_optional("a", Month(2020, 1), {std::nullopt, std::nullopt, 1.0, 2.0});
    EXPECT_EQ(s.start(), Month(2020, 3));
    EXPECT_EQ(s.size(), 2u);
    EXPECT_THROW(MonthlySeries::from_optional("a", Month(2020, 1), {1.0, std::nullopt, 2.0}), Error);
}

TEST(MonthlySeries, AccessOutsideCoverage) {
    const MonthlySeries s("a", Month(2020, 1), {1, 2, 3});
    EXPECT_FALSE(s.at(Month(2019, 12)));
    EXPECT_DOUBLE_EQ(*s.at(Month(2020, 3)), 3.0);
    EXPECT_THROW(s[Month(2020, 4)], Error);
    EXPECT_EQ(s.truncated(Month(2020, 2)).size(), 2u);
}

TEST(YoyGrowth, ConstantSeriesIsZero) {
    const MonthlySeries s("c", Month(2019, 1), std::vector<double>(24, 5.0));
    const auto g = yoy_growth(s);
    ASSERT_EQ(g.size(), 12u);
    EXPECT_EQ(g.start(), Month(2020, 1));
    for (double v : g.values()) EXPECT_EQ(v, 0.0);
}

TEST(YoyGrowth, DoublingIsHundred) {
    std::vector<double> v(36);
    for (int t = 0; t < 36; ++t) v[static_cast<std::size_t>(t)] = (1.0 + t % 12) * std::pow(2.0, t / 12);
    const auto g = yoy_growth(MonthlySeries("d", Month(2000, 1), v));
    for (double x : g.values()) EXPECT_DOUBLE_EQ(x, 100.0);
}

TEST(YoyGrowth, MatchesLoopOracle) {
    const auto s = random_positive("r", Month(2010, 6), 24, 11);
    const auto g = yoy_growth(s);
    const auto& v = s.values();
    for (int t = 12; t < 24; ++t) {
        const double oracle = 100.0 * (v[static_cast<std::size_t>(t)] - v[static_cast<std::size_t>(t - 12)]) /
                              v[static_cast<std::size_t>(t - 12)];
        EXPECT_NEAR(g.values()[static_cast<std::size_t>(t - 12)], oracle, 1e-12);
    }
}

TEST(YoyGrowth, ScaleInvariant) {
    const auto s = random_positive("r", Month(2010, 1), 40, 5);
    const auto a = yoy_growth(s), b = yoy_growth(s.scaled(37.5));
    for (std::size_t i = 0; i < a.size(); ++i) EXPECT_NEAR(a.values()[i], b.values()[i], 1e-10);
}

TEST(YoyGrowth, Errors) {
    EXPECT_THROW(yoy_growth(MonthlySeries("s", Month(2020, 1), std::vector<double>(12, 1.0))), Error);
    std::vector<double> v(13, 1.0);
    v[0] = 0.0;
    EXPECT_THROW(yoy_growth(MonthlySeries("z", Month(2020, 1), v)), Error);
}

TEST(SeasonalAdjust, NoSeasonalityIsIdentity) {
    std::vector<double> v(60);
    for (int t = 0; t < 60; ++t) v[static_cast<std::size_t>(t)] = 100.0 + 0.5 * t;
    const MonthlySeries s("lin", Month(2010, 1), v);
    const auto out = seasonal_adjust_lite(s, s.last());
    for (std::size_t i = 0; i < v.size(); ++i) EXPECT_NEAR(out.values()[i], v[i], 1e-9);
}

TEST(SeasonalAdjust, RecoversKnownIndices) {
    const std::vector<double> m = {0.90, 0.95, 1.02, 1.05, 1.08, 1.10, 1.04, 0.98, 0.97, 1.00, 0.96, 0.95};
    double mean = 0;
    for (double x : m) mean += x;
    mean /= 12;
    std::vector<double> v;
    for (int t = 0; t < 60; ++t) v.push_back((200.0 + 1.5 * t) * m[static_cast<std::size_t>(t % 12)]);
    const auto dec = seasonal_decompose(MonthlySeries("s", Month(2005, 1), v), Month(2009, 12));
    for (int c = 0; c < 12; ++c)
        EXPECT_NEAR(dec.indices[static_cast<std::size_t>(c)], m[static_cast<std::size_t>(c)] / mean,
                    0.02 * m[static_cast<std::size_t>(c)]);
}

TEST(SeasonalAdjust, CausalInAsof) {
    const auto full = random_positive("r", Month(2010, 1), 72, 9);
    const Month asof(2014, 6);
    const auto a = seasonal_adjust_lite(full.truncated(asof), asof);
    const auto b = seasonal_adjust_lite(full, asof);
    ASSERT_EQ(a.size(), b.size());
    for (std::size_t i = 0; i < a.size(); ++i) EXPECT_EQ(a.values()[i], b.values()[i]);
}

TEST(SeasonalAdjust, NeedsThreeYears) {
    EXPECT_THROW(seasonal_adjust_lite(random_positive("r", Month(2010, 1), 35, 1), Month(2030, 1)), Error);
}

TEST(Aggregate, AftCreditPlusDeposits) {
    SeriesMap in{{"C_raw", MonthlySeries("C_raw", Month(2020, 1), {3.0})}, {"M", MonthlySeries("M", Month(2020, 1), {2.0})}};
    const auto out = aggregate_streams(in, MergeRuleset::parse("C = C_raw + M"));
    EXPECT_DOUBLE_EQ(out.at("C")[Month(2020, 1)], 5.0);
}

TEST(Aggregate, SubtractionCancels) {
    SeriesMap in;
    for (const char* n : {"J", "P", "K", "Q"}) in.emplace(n, MonthlySeries(n, Month(2020, 1), {4.0, 4.0}));
    const auto out = aggregate_streams(in, MergeRuleset::parse("P = J + P - K - Q"));
    EXPECT_DOUBLE_EQ(out.at("P")[Month(2020, 2)], 0.0);
}

TEST(Aggregate, LateStreamContributesZeroBeforeItStarts) {
    SeriesMap in{{"C_raw", MonthlySeries("C_raw", Month(2020, 1), {3.0, 3.0, 3.0})},
                 {"M", MonthlySeries("M", Month(2020, 3), {2.0})}};
    const auto c = aggregate_streams(in, MergeRuleset::parse("C = C_raw + M")).at("C");
    EXPECT_EQ(c.values(), (std::vector<double>{3.0, 3.0, 5.0}));
}

TEST(Aggregate, UnknownStreamIsError) {
    EXPECT_THROW(aggregate_streams({}, MergeRuleset::parse("A = B")), Error);
}

TEST(Aggregate, AllstreamIsSumOfMergedRetailStreams) {
    const auto rules = default_stream_rules();
    SeriesMap in;
    std::uint64_t seed = 1;
    for (const char* n : {"C_raw", "M", "D", "E", "L", "O", "B", "G", "H", "S", "U", "Z", "N", "J", "P", "K", "Q",
                          "F", "X", "Y", "T1", "T2"})
        in.emplace(n, random_positive(n, Month(2015, 1), 18, seed++));
    const auto out = aggregate_streams(in, rules);
    auto v = [&](const char* n, int t) { return in.at(n).values()[static_cast<std::size_t>(t)]; };
    for (int t = 0; t < 18; ++t) {
        const double c = v("C_raw", t) + v("M", t);
        const double e = v("E", t) + v("L", t) + v("O", t) + v("B", t) + v("G", t) + v("H", t) - v("S", t) -
                         v("U", t) - v("Z", t);
        const double p = v("J", t) + v("P", t) - v("K", t) - v("Q", t);
        const double x = v("F", t) + v("X", t) + v("Y", t);
        const double all = c + v("D", t) + e + v("N", t) + p + x;
        EXPECT_NEAR(out.at("All").values()[static_cast<std::size_t>(t)], all, 1e-9);
    }
    EXPECT_FALSE(out.count("All_T"));
}

TEST(Aggregate, Linear) {
    const auto rules = MergeRuleset::parse("A = X + Y - Z\nB = A + X");
    SeriesMap s1, s2, sum;
    std::uint64_t seed = 20;
    for (const char* n : {"X", "Y", "Z"}) {
        s1.emplace(n, random_positive(n, Month(2019, 1), 6, seed++));
        s2.emplace(n, random_positive(n, Month(2019, 1), 6, seed++));
        std::vector<double> v(6);
        for (std::size_t i = 0; i < 6; ++i) v[i] = s1.at(n).values()[i] + s2.at(n).values()[i];
        sum.emplace(n, MonthlySeries(n, Month(2019, 1), v));
    }
    const auto a = aggregate_streams(s1, rules), b = aggregate_streams(s2, rules), c = aggregate_streams(sum, rules);
    for (const char* n : {"A", "B"})
        for (std::size_t i = 0; i < 6; ++i)
            EXPECT_NEAR(c.at(n).values()[i], a.at(n).values()[i] + b.at(n).values()[i], 1e-9);
}

TEST(MergeRules, ParseRoundTrip) {
    const auto r = default_stream_rules();
    EXPECT_EQ(MergeRuleset::parse(r.str()).str(), r.str());
    EXPECT_THROW(MergeRuleset::parse("no equals sign"), Error);
}
