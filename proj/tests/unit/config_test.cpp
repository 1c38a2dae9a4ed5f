#include <gtest/gtest.h>

#include "nowcast/config.hpp"
#include "nowcast/error.hpp"

using namespace nowcast;

namespace {

ErrorKind kind_of(const std::function<void()>& f) {
    try {
        f();
    } catch (const Error& e) {
        return e.kind();
    }
    ADD_FAILURE() << "no error thrown";
    return ErrorKind::Numerical;
}

} // namespace

TEST(RunConfig, ParsesTomlSubset) {
    const auto cfg = RunConfig::from_text(R"(# run
target = "RTS"
horizon = "t+2"
model = enet
seed = 7

[cv]
k = 4
n = 12
superset_start = "2009-01"
mode = standard

[grid]
alpha = [0.01, 0.1]
l1_ratio = 0.5

[model]
max_iter = 500
)");
    EXPECT_EQ(cfg.target, "RTS");
    EXPECT_EQ(cfg.horizon, Horizon::T2);
    EXPECT_EQ(cfg.model, "enet");
    EXPECT_EQ(cfg.seed, 7u);
    EXPECT_TRUE(cfg.seed_set);
    EXPECT_EQ(cfg.cv.k, 4);
    EXPECT_EQ(cfg.cv.n, 12);
    EXPECT_EQ(cfg.cv.superset_start, Month(2009, 1));
    EXPECT_EQ(cfg.cv.mode, SamplingMode::StandardExpanding);
    ASSERT_EQ(cfg.grid.dimensions.size(), 2u);
    EXPECT_EQ(cfg.grid.dimensions[0].second, (std::vector<std::string>{"0.01", "0.1"}));
    EXPECT_EQ(cfg.fixed.get_int("max_iter", 0), 500);
    cfg.validate();
}

TEST(RunConfig, FlagOverridesReplaceKeys) {
    auto cfg = RunConfig::from_text("seed = 1\nmodel = ols\ngrid.p = 4,8\n");
    cfg.set("model", "gbr");
    cfg.set("grid.p", "all");
    EXPECT_EQ(cfg.model, "gbr");
    ASSERT_EQ(cfg.grid.dimensions.size(), 1u);
    EXPECT_EQ(cfg.grid.dimensions[0].second, std::vector<std::string>{"all"});
}

TEST(RunConfig, InvariantsAreConfigErrors) {
    auto bad = [](const std::string& text) {
        return kind_of([&] { RunConfig::from_text(text).validate(); });
    };
    EXPECT_EQ(bad("seed = 1\ncv.k = 1\n"), ErrorKind::Config);
    EXPECT_EQ(bad("seed = 1\ncv.n = 0\n"), ErrorKind::Config);
    EXPECT_EQ(bad("seed = 1\ncv.superset_start = 2019-01\ncv.superset_end = 2018-01\n"), ErrorKind::Config);
    EXPECT_EQ(bad("model = gbr\n"), ErrorKind::Config);
    EXPECT_EQ(bad("seed = 1\nnot_a_key = 3\n"), ErrorKind::Config);
    EXPECT_EQ(bad("seed = x\n"), ErrorKind::Config);
    EXPECT_EQ(bad("seed = 1\nhorizon = t+5\n"), ErrorKind::Config);
    EXPECT_EQ(bad("seed = 1\ncv.superset_end = 2019-06\n"), ErrorKind::Config);
}

TEST(RunConfig, ErrorsNameTheLine) {
    try {
        RunConfig::from_text("seed = 1\n\ncv.k = two\n");
        FAIL();
    } catch (const Error& e) {
        EXPECT_NE(std::string(e.what()).find("line 3"), std::string::npos) << e.what();
    }
}

TEST(RunConfig, EchoRoundTrips) {
    auto cfg = RunConfig::from_text("seed = 9\nmodel = svr\ngrid.C = 1,3\nmodel.kernel = rbf\nvintages = realtime\n");
    const auto again = RunConfig::from_text(cfg.echo());
    EXPECT_EQ(again.echo(), cfg.echo());
    EXPECT_EQ(again.vintages, VintageMode::Realtime);
}

TEST(ParamGrid, FirstDimensionVariesSlowest) {
    ParamGrid g;
    g.dimensions = {{"a", {"1", "2"}}, {"b", {"x", "y", "z"}}};
    const auto combos = g.combinations({{"seed", "3"}});
    ASSERT_EQ(combos.size(), 6u);
    EXPECT_EQ(combos[0].str(), "a=1;b=x;seed=3");
    EXPECT_EQ(combos[1].str(), "a=1;b=y;seed=3");
    EXPECT_EQ(combos[3].str(), "a=2;b=x;seed=3");
}

TEST(ParamSet, TypedAccessValidates) {
    ParamSet p{{"x", "2.5"}, {"n", "4"}, {"flag", "true"}, {"bad", "abc"}, {"h", "3x2"}};
    EXPECT_DOUBLE_EQ(p.get_double("x", 0), 2.5);
    EXPECT_EQ(p.get_int("n", 0), 4);
    EXPECT_TRUE(p.get_bool("flag", false));
    EXPECT_EQ(p.get_int("missing", 11), 11);
    EXPECT_EQ(p.get_int_list("h", {}), (std::vector<int>{3, 2}));
    EXPECT_THROW(p.get_double("bad", 0), Error);
    EXPECT_THROW(p.get_int("x", 0), Error);
}

TEST(Config, InlineCommentsAfterStrings) {
    const auto cfg = RunConfig::from_text(R"(model = "ols"   # or "gbr"
[cv]
mode = "standard"          # or "randomized"
[output]
dir = "out#1"  # hash inside quotes is kept
)");
    EXPECT_EQ(cfg.model, "ols");
    EXPECT_EQ(cfg.cv.mode, SamplingMode::StandardExpanding);
    EXPECT_EQ(cfg.output_dir, "out#1");
    try {
        RunConfig::from_text("seed = 1\n\n[cv]\nk = zero\n");
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(std::string(e.what()).find("ingest: line 4: "), 0u) << e.what();
        EXPECT_EQ(std::string(e.what()).find("ingest", 1), std::string::npos) << e.what();
    }
}
