#include <cmath>
#include <memory>
#include <random>
#include <sstream>

#include <gtest/gtest.h>

#include "fracgelfand/io.hpp"

namespace fg = fracgelfand;

TEST(Json, GridRoundTrip) {
  const auto g = fg::RadialGrid::graded(40, 2.5, 12);
  const auto j = fg::to_json(g);
  EXPECT_EQ(j.at("schema"), fg::kGridSchema);
  const auto back = fg::grid_from_json(fg::json::parse(j.dump()));
  EXPECT_TRUE(back == g);
}

TEST(Json, FunctionRoundTripRandom) {
  std::mt19937_64 rng(42);
  std::uniform_real_distribution<double> val(-1e3, 1e3);
  std::uniform_int_distribution<int> size(16, 80), kind(0, 3);
  for (int trial = 0; trial < 100; ++trial) {
    const auto g = std::make_shared<const fg::RadialGrid>(fg::RadialGrid::graded(size(rng), 1.0 + trial % 3));
    fg::TailSpec tail;
    switch (kind(rng)) {
      case 0: tail = fg::TailSpec::zero(); break;
      case 1: tail = fg::TailSpec::power(std::abs(val(rng)) * 1e-3, val(rng)); break;
      case 2: tail = fg::TailSpec::constant(val(rng)); break;
      default: tail = fg::TailSpec::log_power(val(rng)); break;
    }
    const bool singular = trial % 2 == 0;
    const auto u = fg::RadialFunction::sample(g, [&](double) { return val(rng) * std::pow(10.0, trial % 7 - 3); },
                                              tail, singular);
    const auto back = fg::function_from_json(fg::json::parse(fg::to_json(u).dump()));
    EXPECT_TRUE(*back.grid == *g);
    EXPECT_TRUE(back.tail == u.tail);
    EXPECT_EQ(back.singular_at_origin, singular);
    for (Eigen::Index i = singular ? 1 : 0; i < u.values.size(); ++i) ASSERT_EQ(back.values[i], u.values[i]);
    if (singular) {
      EXPECT_TRUE(std::isnan(back.values[0]));
    }
  }
}

TEST(Json, MalformedInput) {
  EXPECT_THROW(fg::grid_from_json(fg::json{{"schema", "other"}}), fg::ConfigError);
  EXPECT_THROW(fg::grid_from_json(fg::json{{"schema", fg::kGridSchema}}), fg::ConfigError);
  EXPECT_THROW(fg::grid_from_json(fg::json{{"schema", fg::kGridSchema}, {"nodes", {0.0, 1.0}}, {"grading", 2.0},
                                           {"quad_order", 10}}),
               fg::ConfigError);
  EXPECT_THROW(fg::tail_from_json(fg::json{{"kind", "exp"}}), fg::ConfigError);
  EXPECT_THROW(fg::tail_from_json(fg::json{{"kind", "power"}, {"alpha", "x"}}), fg::ConfigError);
  auto j = fg::to_json(fg::RadialFunction::sample(
      std::make_shared<const fg::RadialGrid>(fg::RadialGrid::graded(16)), [](double r) { return r; }));
  j["values"].erase(0);
  EXPECT_THROW(fg::function_from_json(j), fg::ConfigError);
}

TEST(Csv, BranchTable) {
  const auto g = std::make_shared<const fg::RadialGrid>(fg::RadialGrid::graded(16));
  fg::Branch b;
  fg::BranchPoint p{0.123456789012345, fg::RadialFunction::sample(g, [](double r) { return 1.0 - r; }), 1.0};
  p.residual_norm = 1e-12;
  p.newton_iters = 3;
  b.points.push_back(p);
  std::ostringstream os;
  fg::write_branch_csv(os, b, fg::json{{"n", 3}});
  EXPECT_EQ(os.str(),
            "# config: {\"n\":3}\n"
            "peak,lambda,stability_eig,residual_norm,newton_iters\n"
            "1,0.123456789012,nan,1e-12,3\n");
  const auto j = fg::to_json(b, true);
  EXPECT_EQ(j.at("schema"), fg::kBranchSchema);
  EXPECT_TRUE(j.at("points")[0].at("stability_eig").is_null());
  EXPECT_EQ(j.at("points")[0].at("profile").at("schema"), fg::kFunctionSchema);
}

TEST(Format, SignificantDigits) {
  EXPECT_EQ(fg::format_number(3.14159265358979, 6), "3.14159");
  EXPECT_EQ(fg::format_number(3.14159265358979, 12), "3.14159265359");
  EXPECT_EQ(fg::format_number(NAN, 6), "nan");
  EXPECT_EQ(fg::format_number(-INFINITY, 6), "-inf");
}
