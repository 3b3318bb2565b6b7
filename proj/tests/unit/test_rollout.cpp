#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>

#include "racesim/error.hpp"
#include "rollout.hpp"
#include "test_util.hpp"

using namespace racesim;

namespace {

std::string temp_path(const std::string& name) {
  return (std::filesystem::temp_directory_path() / ("racesim_test_" + name)).string();
}

}  // namespace

TEST(ActionFile, RoundTripAndComments) {
  const std::string path = temp_path("actions.txt");
  {
    std::ofstream out(path);
    out << "# header\n0.1, 0.2, 0.3, 0.4\n\n0.5 0.6 0.7 0.8\n";
  }
  const auto actions = tools::read_action_file(path);
  ASSERT_EQ(actions.size(), 2u);
  EXPECT_EQ(actions[1].u, Vec4(0.5, 0.6, 0.7, 0.8));
  tools::write_action_file(path, actions);
  const auto again = tools::read_action_file(path);
  ASSERT_EQ(again.size(), 2u);
  EXPECT_EQ(again[0].u, actions[0].u);
  {
    std::ofstream out(path);
    out << "0.1 0.2 0.3\n";
  }
  EXPECT_THROW(tools::read_action_file(path), UsageError);
  std::filesystem::remove(path);
  EXPECT_THROW(tools::read_action_file(path), IoError);
}

TEST(Policy, Names) {
  EXPECT_EQ(tools::parse_policy("hover"), tools::PolicyKind::hover);
  EXPECT_EQ(tools::parse_policy("max-thrust"), tools::PolicyKind::max_thrust);
  EXPECT_EQ(tools::parse_policy("file"), tools::PolicyKind::file);
  EXPECT_THROW(tools::parse_policy("random"), UsageError);
}

TEST(Rollout, HoverStaysPut) {
  Env env(test::quiet_config());
  tools::RolloutSpec spec;
  spec.steps = 180;
  spec.seed = 3;
  const auto s = tools::run_rollout(env, spec, nullptr);
  EXPECT_EQ(s.steps, 180);
  EXPECT_LT(s.max_speed, 1e-6);
  EXPECT_EQ(s.terminated, 0);
}

TEST(Rollout, FilePolicyNeedsEnoughActions) {
  Env env(test::quiet_config());
  tools::RolloutSpec spec;
  spec.policy = tools::PolicyKind::file;
  spec.actions.assign(5, Action{Vec4::Constant(0.2)});
  spec.steps = 10;
  EXPECT_THROW(tools::run_rollout(env, spec, nullptr), UsageError);
}

TEST(Rollout, SummaryJsonIsOneLine) {
  tools::RolloutSummary s;
  s.steps = 5;
  const auto json = tools::summary_json(s);
  EXPECT_EQ(json.find('\n'), std::string::npos);
  EXPECT_NE(json.find("\"steps\":5"), std::string::npos);
}
