#include <cmath>
#include <numbers>
#include <sstream>

#include <gtest/gtest.h>

#include "slidefield/scenario.hpp"
#include "slidefield/trajectory_io.hpp"

using namespace slidefield;

namespace {

Vec vec(std::initializer_list<double> v) {
  Vec out(static_cast<Eigen::Index>(v.size()));
  Eigen::Index i = 0;
  for (double x : v) out(i++) = x;
  return out;
}

const char* kFrictionConfig = R"({
  "schema": "slidefield.scenario/1",
  "scenario": "friction",
  "params": {"f": 1, "A": 2, "omega": 1},
  "x0": [1.5707963267948966, 0],
  "t_end": 1.5,
  "step": 0.01,
  "seed": 7,
  "tolerances": {"event_tol": 1e-11}
})";

const char* kTiltConfig = R"({
  "schema": "slidefield.scenario/1",
  "scenario": "constant_tilt",
  "params": {"slope": 1, "X1_1": 1, "X1_2": 2, "X2_1": 1, "X2_2": 0},
  "x0": [0, -1],
  "t0": 0.5,
  "t_end": 3,
  "step": 0.02,
  "law": "filippov"
})";

std::string csv_for(const ScenarioConfig& cfg) {
  const PiecewiseField pf = build_scenario(cfg);
  const Trajectory traj = integrate(pf, {law_from_name(cfg.law)}, cfg.initial_state(), cfg.t0,
                                    cfg.integrator_options());
  std::ostringstream out;
  write_trajectory_csv(out, traj, pf.surface, cfg);
  return out.str();
}

}  // namespace

TEST(Scenario, FrictionNormalComponents) {
  const PiecewiseField pf = scenario_friction(1.0, 2.0, 1.0);
  const NormalComponents at_zero = normal_components(pf, vec({0, 0}));
  EXPECT_DOUBLE_EQ(at_zero.lower, 3.0);
  EXPECT_DOUBLE_EQ(at_zero.upper, 1.0);
  EXPECT_EQ(classify(pf, vec({0, 0})), RegionKind::Crossing);
  EXPECT_EQ(classify(pf, vec({std::numbers::pi / 2, 0})), RegionKind::AttractingSliding);
}

TEST(Scenario, PureCoulombIsAttractingEverywhere) {
  const PiecewiseField pf = scenario_friction(0.7, 0.0, 3.0);
  for (double theta : {-4.0, 0.0, 1.3, 9.0}) {
    const NormalComponents c = normal_components(pf, vec({theta, 0}));
    EXPECT_DOUBLE_EQ(c.lower, 0.7);
    EXPECT_DOUBLE_EQ(c.upper, -0.7);
    EXPECT_LT((filippov_direct(pf, vec({theta, 0})).vec - vec({1, 0})).norm(), 1e-15);
  }
}

TEST(Scenario, FrictionNeedsPositiveCoefficient) {
  EXPECT_THROW(scenario_friction(0.0, 1.0, 1.0), ConfigError);
  EXPECT_THROW(scenario_friction(-1.0, 1.0, 1.0), ConfigError);
}

TEST(Scenario, TiltedConstantFields) {
  const PiecewiseField pf = scenario_constant_tilt(1.0, vec({1, 2}), vec({1, 0}));
  for (double x : {-3.0, 0.0, 2.5})
    EXPECT_LT((filippov_direct(pf, vec({x, x})).vec - vec({1, 1})).norm(), 1e-14);
  const PiecewiseField flat = scenario_constant_tilt(0.0, vec({1, 1.5}), vec({1, -0.5}));
  EXPECT_EQ(filippov_direct(flat, vec({0.3, 0})).vec, vec({1, 0}));
  const PiecewiseField same = scenario_constant_tilt(0.4, vec({1, 2}), vec({1, 2}));
  EXPECT_EQ(classify(same, vec({1, 0.4})), RegionKind::SingularEqualNormals);
  const PiecewiseField crossing = scenario_constant_tilt(0.4, vec({1, 2}), vec({0, 2}));
  EXPECT_EQ(classify(crossing, vec({1, 0.4})), RegionKind::Crossing);
}

TEST(Config, ParsesAndBuilds) {
  const ScenarioConfig cfg = parse_config_text(kTiltConfig);
  EXPECT_EQ(cfg.scenario, "constant_tilt");
  EXPECT_EQ(cfg.x0, (std::vector<double>{0, -1}));
  EXPECT_DOUBLE_EQ(cfg.t0, 0.5);
  EXPECT_EQ(cfg.seed, 0u);
  EXPECT_FALSE(cfg.event_tol.has_value());
  EXPECT_EQ(build_scenario(cfg).surface.name(), "tilt");

  const ScenarioConfig friction = parse_config_text(kFrictionConfig);
  EXPECT_EQ(friction.seed, 7u);
  EXPECT_DOUBLE_EQ(*friction.event_tol, 1e-11);
  EXPECT_DOUBLE_EQ(friction.integrator_options().event_tol, 1e-11);
}

TEST(Config, RoundTripThroughJson) {
  for (const char* text : {kFrictionConfig, kTiltConfig}) {
    const ScenarioConfig cfg = parse_config_text(text);
    EXPECT_EQ(parse_config_text(to_json(cfg).dump()), cfg);
  }
}

TEST(Config, RejectsBadInput) {
  const auto bad = [](const std::string& from, const std::string& to) {
    std::string text = kTiltConfig;
    const auto pos = text.find(from);
    EXPECT_NE(pos, std::string::npos) << from;
    text.replace(pos, from.size(), to);
    EXPECT_THROW(parse_config_text(text), ConfigError) << to;
  };
  bad("slidefield.scenario/1", "slidefield.scenario/2");
  bad("\"constant_tilt\"", "\"sphere\"");
  bad("\"slope\": 1, ", "");
  bad("\"slope\": 1", "\"slope\": 1, \"extra\": 2");
  bad("\"step\": 0.02", "\"step\": 0");
  bad("\"t_end\": 3", "\"t_end\": 0.25");
  bad("\"law\": \"filippov\"", "\"law\": \"utkin\"");
  bad("\"x0\": [0, -1]", "\"x0\": []");
  bad("\"x0\": [0, -1]", "\"x0\": [0, -1], \"colour\": 3");
  bad("\"x0\": [0, -1]", "\"x0\": \"origin\"");
  bad("\"step\": 0.02", "\"step\": 0.02, \"tolerances\": {\"atol\": 1}");
  bad("\"step\": 0.02", "\"step\": 0.02, \"tolerances\": {\"max_events\": 0}");
  EXPECT_THROW(parse_config_text("{ not json"), ConfigError);
  EXPECT_THROW(parse_config_text("[1, 2]"), ConfigError);
}

TEST(Config, FrictionNeedsTwoDimensions) {
  std::string text = kFrictionConfig;
  text.replace(text.find("[1.5707963267948966, 0]"), 23, "[0, 0, 0]");
  EXPECT_THROW(parse_config_text(text), ConfigError);
}

TEST(TrajectoryCsv, HeaderEchoesConfig) {
  const ScenarioConfig cfg = parse_config_text(kFrictionConfig);
  std::istringstream in(csv_for(cfg));
  const TrajectoryTable table = read_trajectory_csv(in);
  ASSERT_TRUE(table.config_echo().has_value());
  EXPECT_EQ(parse_config_text(*table.config_echo()), cfg);
  EXPECT_EQ(table.columns, (std::vector<std::string>{"t", "x1", "x2", "mode", "gap"}));
  EXPECT_NE(std::find(table.metadata.begin(), table.metadata.end(), " seed: 7"), table.metadata.end());
}

TEST(TrajectoryCsv, RowsSatisfyFileInvariants) {
  for (const char* text : {kFrictionConfig, kTiltConfig}) {
    std::istringstream in(csv_for(parse_config_text(text)));
    const TrajectoryTable table = read_trajectory_csv(in);
    EXPECT_NO_THROW(validate_trajectory_table(table));
    EXPECT_FALSE(table.values.empty());
  }
}

TEST(TrajectoryCsv, FullPrecisionRoundTrip) {
  const ScenarioConfig cfg = parse_config_text(kTiltConfig);
  const PiecewiseField pf = build_scenario(cfg);
  const Trajectory traj = integrate(pf, {filippov_law()}, cfg.initial_state(), cfg.t0, cfg.integrator_options());
  std::ostringstream out;
  write_trajectory_csv(out, traj, pf.surface, cfg);
  std::istringstream in(out.str());
  const TrajectoryTable table = read_trajectory_csv(in);
  std::size_t row = 0;
  for (const Segment& seg : traj.segments) {
    for (std::size_t k = 0; k < seg.times.size(); ++k, ++row) {
      EXPECT_EQ(table.values[row][0], seg.times[k]);
      EXPECT_EQ(table.values[row][1], seg.states[k](0));
      EXPECT_EQ(table.values[row][2], seg.states[k](1));
      EXPECT_EQ(table.modes[row], mode_code(seg.mode));
    }
  }
  EXPECT_EQ(row, table.values.size());
}

TEST(TrajectoryCsv, ValidationCatchesBrokenFiles) {
  const auto parse = [](const std::string& body) {
    std::istringstream in("# x\nt,x1,mode,gap\n" + body);
    return read_trajectory_csv(in);
  };
  EXPECT_THROW(validate_trajectory_table(parse("0,1,1,0\n0,2,1,0\n")), ConfigError);
  EXPECT_THROW(validate_trajectory_table(parse("1,1,1,0\n0.5,2,S,0\n")), ConfigError);
  EXPECT_THROW(validate_trajectory_table(parse("0,1,Q,0\n")), ConfigError);
  EXPECT_NO_THROW(validate_trajectory_table(parse("0,1,1,0\n1,1,1,0\n1,1,S,0\n2,1,S,0\n")));
  EXPECT_THROW(parse("0,1,1\n"), ConfigError);
  EXPECT_THROW(parse("0,abc,1,0\n"), ConfigError);
  std::istringstream headerless("# only metadata\n");
  EXPECT_THROW(read_trajectory_csv(headerless), ConfigError);
}

TEST(EventsJson, Shape) {
  const ScenarioConfig cfg = parse_config_text(kFrictionConfig);
  const PiecewiseField pf = build_scenario(cfg);
  const auto j = events_json(integrate(pf, {filippov_law()}, cfg.initial_state(), 0.0, cfg.integrator_options()));
  EXPECT_EQ(j["schema"], "slidefield.events/1");
  EXPECT_EQ(j["final_mode"], "FreeG1");
  ASSERT_EQ(j["events"].size(), 4u);
  EXPECT_EQ(j["events"][2]["kind"], "SlidingExit");
  EXPECT_NEAR(j["events"][2]["time"].get<double>(), std::numbers::pi / 6, 1e-6);
  EXPECT_TRUE(events_json(Trajectory{})["final_mode"].is_null());
}

TEST(Plotdata, SeriesLayout) {
  std::istringstream in("# x\nt,x1,x2,mode,gap\n0,1,-1,1,-1\n0.5,1.5,0,1,0\n0.5,1.5,0,S,0\n");
  const TrajectoryTable table = read_trajectory_csv(in);
  std::ostringstream out;
  write_plotdata(out, table, {"x2"});
  EXPECT_EQ(out.str(), "# t_x2 x2 t_mode mode\n0 -1 0 1\n0.5 0 0.5 1\n0.5 0 0.5 0\n");
}

TEST(Plotdata, UnknownColumnAndEmptyTable) {
  std::istringstream in("t,x1,mode,gap\n");
  const TrajectoryTable table = read_trajectory_csv(in);
  std::ostringstream out;
  EXPECT_THROW(write_plotdata(out, table, {"x7"}), ConfigError);
  EXPECT_THROW(write_plotdata(out, table, {"t"}), ConfigError);
  write_plotdata(out, table, {"x1", "gap"});
  EXPECT_TRUE(out.str().empty());
}
