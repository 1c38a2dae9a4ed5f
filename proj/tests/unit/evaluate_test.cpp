#include <gtest/gtest.h>

#include <cmath>
#include <sstream>

#include "nowcast/error.hpp"
#include "nowcast/evaluate.hpp"
#include "nowcast/random.hpp"

using namespace nowcast;

namespace {

std::vector<double> normals(int n, Rng& rng, double shift = 0.0) {
    std::vector<double> v(static_cast<std::size_t>(n));
    for (auto& x : v) x = rng.normal() + shift;
    return v;
}

std::vector<Month> months_from(Month m, int n) {
    std::vector<Month> out;
    for (int i = 0; i < n; ++i) out.push_back(m + i);
    return out;
}

} // namespace

TEST(Rmse, BasicsAndOracle) {
    EXPECT_EQ(rmse({1, 2, 3}, {1, 2, 3}), 0.0);
    EXPECT_NEAR(rmse({1, 2, 3}, {3.5, 4.5, 5.5}), 2.5, 1e-15);
    Rng rng(1);
    const auto p = normals(24, rng), a = normals(24, rng);
    double s = 0;
    for (std::size_t i = 0; i < 24; ++i) s += (p[i] - a[i]) * (p[i] - a[i]);
    EXPECT_NEAR(rmse(p, a), std::sqrt(s / 24), 1e-12);
    std::vector<double> p3, a3;
    for (std::size_t i = 0; i < 24; ++i) {
        p3.push_back(-3 * p[i]);
        a3.push_back(-3 * a[i]);
    }
    EXPECT_NEAR(rmse(p3, a3), 3 * rmse(p, a), 1e-12);
    EXPECT_THROW(rmse({}, {}), Error);
    EXPECT_THROW(rmse({1}, {1, 2}), Error);
}

TEST(Reduction, ReportedTableValues) {
    EXPECT_NEAR(rmse_reduction(3.97, 2.43), 38.79, 0.01);
    EXPECT_EQ(display_percent(rmse_reduction(3.97, 2.43)), "39");
    EXPECT_NEAR(rmse_reduction(4.58, 3.70), 19.21, 0.01);
    EXPECT_EQ(display_percent(rmse_reduction(4.58, 3.70)), "19");
    EXPECT_EQ(rmse_reduction(2.0, 2.0), 0.0);
    EXPECT_LT(rmse_reduction(2.0, 3.0), 0.0);
    EXPECT_THROW(rmse_reduction(0.0, 1.0), Error);
    EXPECT_THROW(rmse_reduction(-1.0, 1.0), Error);
}

TEST(Dm, IdenticalSeriesIndistinguishable) {
    Rng rng(2);
    const auto a = normals(30, rng);
    const auto r = dm_test(a, a);
    EXPECT_TRUE(r.indistinguishable);
    EXPECT_EQ(r.p_value, 1.0);
    EXPECT_FALSE(r.variant.empty());
    EXPECT_THROW(dm_test(normals(7, rng), normals(7, rng)), Error);
    EXPECT_THROW(dm_test(normals(10, rng), normals(9, rng)), Error);
}

TEST(Dm, Antisymmetric) {
    Rng rng(3);
    const auto a = normals(40, rng), b = normals(40, rng, 0.2);
    for (int h : {1, 2, 4})
        for (LossType l : {LossType::Squared, LossType::Absolute}) {
            const auto ab = dm_test(a, b, h, l), ba = dm_test(b, a, h, l);
            EXPECT_NEAR(ab.statistic, -ba.statistic, 1e-12);
            EXPECT_NEAR(ab.p_value, ba.p_value, 1e-12);
        }
}

TEST(Dm, SizeNearNominal) {
    int reject = 0;
    for (std::uint64_t s = 0; s < 1000; ++s) {
        Rng rng(derive_seed(99, s));
        const auto a = normals(100, rng), b = normals(100, rng);
        reject += dm_test(a, b).p_value < 0.10;
    }
    EXPECT_NEAR(reject / 1000.0, 0.10, 0.03);
}

TEST(Dm, PowerAgainstUniformlyWorse) {
    Rng rng(4);
    const auto a = normals(100, rng);
    std::vector<double> b;
    // Squared loss of b exceeds that of a by exactly one.
    for (double x : a) b.push_back(std::sqrt(x * x + 1.0));
    const auto r = dm_test(a, b, 1, LossType::Squared);
    EXPECT_TRUE(r.indistinguishable || r.p_value < 0.01);
    Rng rng2(5);
    const auto c = normals(100, rng2);
    std::vector<double> d;
    for (double x : c) d.push_back(x + (x >= 0 ? 1.0 : -1.0) + 0.3 * rng2.normal());
    const auto r2 = dm_test(c, d, 1, LossType::Absolute);
    EXPECT_LT(r2.statistic, 0.0);
    EXPECT_LT(r2.p_value, 0.01);
}

TEST(SplitEval, SingleRegimeEqualsPlain) {
    Rng rng(6);
    const auto p = normals(20, rng), a = normals(20, rng);
    const auto ms = months_from({2019, 1}, 20);
    const auto out = split_eval(p, a, ms, {{"everything", {2019, 1}, {2020, 8}}});
    ASSERT_EQ(out.size(), 2u);
    EXPECT_EQ(out[0].regime, "all");
    EXPECT_NEAR(out[0].rmse, rmse(p, a), 1e-15);
    EXPECT_NEAR(out[1].rmse, rmse(p, a), 1e-15);
    EXPECT_FALSE(out[0].reduction_pct.has_value());
}

TEST(SplitEval, PoolingIdentity) {
    // Errors 3 everywhere in the first half, 4 in the second.
    std::vector<double> p, a(20, 0.0);
    for (int i = 0; i < 20; ++i) p.push_back(i < 10 ? 3.0 : -4.0);
    const auto ms = months_from({2019, 1}, 20);
    const std::vector<RegimeRange> reg{{"normal", {2019, 1}, {2019, 10}}, {"crisis", {2019, 11}, {2020, 8}}};
    const auto out = split_eval(p, a, ms, reg);
    EXPECT_NEAR(out[0].rmse, std::sqrt(12.5), 1e-12);
    EXPECT_NEAR(out[1].rmse, 3.0, 1e-12);
    EXPECT_NEAR(out[2].rmse, 4.0, 1e-12);

    Rng rng(7);
    const auto q = normals(20, rng), b = normals(20, rng), base = normals(20, rng);
    const std::vector<RegimeRange> uneven{{"normal", {2019, 1}, {2019, 6}}, {"crisis", {2019, 7}, {2020, 8}}};
    const auto o2 = split_eval(q, b, ms, uneven, base);
    const double pooled = (o2[1].count * o2[1].rmse * o2[1].rmse + o2[2].count * o2[2].rmse * o2[2].rmse) / 20.0;
    EXPECT_NEAR(o2[0].rmse * o2[0].rmse, pooled, 1e-10);
    ASSERT_TRUE(o2[0].reduction_pct.has_value());
    EXPECT_NEAR(*o2[0].reduction_pct, rmse_reduction(rmse(base, b), rmse(q, b)), 1e-12);
    EXPECT_TRUE(o2[0].dm.has_value());
    EXPECT_FALSE(o2[1].dm.has_value());  // only six months
}

TEST(SplitEval, RegimesMustPartition) {
    std::vector<double> p(6, 0.0), a(6, 1.0);
    const auto ms = months_from({2019, 1}, 6);
    EXPECT_THROW(split_eval(p, a, ms, {{"a", {2019, 1}, {2019, 3}}}), Error);
    EXPECT_THROW(split_eval(p, a, ms, {{"a", {2019, 1}, {2019, 4}}, {"b", {2019, 4}, {2019, 6}}}), Error);
}

TEST(Metrics, CsvLayout) {
    RegimeMetrics m;
    m.regime = "crisis";
    m.count = 10;
    m.rmse = 1.5;
    m.reduction_pct = 12.5;
    std::ostringstream os;
    write_metrics_csv({{"GDP", "T1", "gbr", m}}, os);
    std::istringstream is(os.str());
    std::string header, row;
    std::getline(is, header);
    std::getline(is, row);
    EXPECT_EQ(header, "target,horizon,model,regime,rmse,reduction_pct,dm_stat,dm_p");
    EXPECT_EQ(row.rfind("GDP,T1,gbr,crisis,1.5,12.5,", 0), 0u);
}
