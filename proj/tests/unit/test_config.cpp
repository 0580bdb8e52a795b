#include <gtest/gtest.h>

#include <fstream>

#include "activecanvas/config.hpp"
#include "activecanvas/error.hpp"
#include "support/oracles.hpp"

using namespace activecanvas;

TEST(Config, Defaults) {
  const EngineConfig c;
  EXPECT_EQ(c.k, 3);
  EXPECT_EQ(c.top_k, 50u);
  EXPECT_EQ(c.sweeps, 5);
  EXPECT_EQ(c.delta, 0.15);
  EXPECT_EQ(c.C, 10.0);
  EXPECT_EQ(c.epsilon, 0.01);
  EXPECT_FALSE(c.gamma_override.has_value());
  EXPECT_NO_THROW(c.validate());
}

TEST(Config, JsonRoundTripAndPartialFiles) {
  EngineConfig c;
  c.k = 4;
  c.gamma_override = 0.25;
  c.seed = 99;
  const nlohmann::json j = c;
  const auto back = j.get<EngineConfig>();
  EXPECT_EQ(back.k, 4);
  EXPECT_EQ(back.gamma_override, 0.25);
  EXPECT_EQ(back.seed, 99u);

  oracle::TempDir tmp("cfg");
  std::ofstream(tmp.path() / "c.json") << R"({"top_k": 10, "unknown": true})";
  const auto loaded = load_config(tmp.path() / "c.json");
  EXPECT_EQ(loaded.top_k, 10u);
  EXPECT_EQ(loaded.k, 3);
}

TEST(Config, ValidationRejectsBadBounds) {
  EngineConfig c;
  c.k = 0;
  EXPECT_THROW(c.validate(), Error);
  c = {};
  c.delta = -1.0;
  EXPECT_THROW(c.validate(), Error);
  c = {};
  c.top_k = 0;
  EXPECT_THROW(c.validate(), Error);
  c = {};
  c.epsilon = -0.1;
  EXPECT_THROW(c.validate(), Error);
}

TEST(Config, MissingFile) {
  EXPECT_THROW(load_config("/nonexistent/engine.json"), Error);
}
