#include <gtest/gtest.h>

#include <cstring>
#include <sstream>

#include "morrey/config.hpp"

using namespace morrey;

namespace {

json minimal() {
  return json::parse(R"({
    "grid": {"n": 1, "L": 1.0, "h": 0.03125},
    "weights": {"w": {"kind": "power", "terms": [{"a": [0.0], "alpha": 0.5}]}, "one": {"kind": "constant"}},
    "presets": [{"preset": "identity", "params": {"weights": ["w"], "P": [2]}}]
  })");
}

ErrorCode code_of(const std::function<void()>& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.code();
  }
  return ErrorCode{0};
}

}  // namespace

TEST(BinaryFunctions, RoundTripIsBitIdentical) {
  const Grid g(2, 1.0, 1.0 / 8);
  const auto a = SampledFunction::sample(g, [](const Point& x) { return std::sin(1e3 * x[0]) / 3.0 + x[1] * 1e-300; }, "a");
  const auto b = SampledFunction::sample(g, [](const Point& x) { return -std::exp(x[0] * 40.0); }, "b,with comma");
  std::stringstream io(std::ios::in | std::ios::out | std::ios::binary);
  write_functions(io, {a, b});
  const auto back = read_functions(io);
  ASSERT_EQ(back.size(), 2u);
  EXPECT_EQ(back[0].grid(), g);
  EXPECT_EQ(back[1].name(), "b,with comma");
  for (std::size_t i = 0; i < g.size(); ++i) {
    EXPECT_EQ(std::memcmp(&back[0].values()[i], &a.values()[i], sizeof(double)), 0);
    EXPECT_EQ(std::memcmp(&back[1].values()[i], &b.values()[i], sizeof(double)), 0);
  }
}

TEST(BinaryFunctions, LittleEndianPayload) {
  const Grid g(1, 1.0, 0.5);
  std::stringstream io(std::ios::in | std::ios::out | std::ios::binary);
  write_functions(io, {SampledFunction::constant(g, 1.0)});
  const std::string s = io.str();
  const std::string payload = s.substr(s.find('\n') + 1);
  ASSERT_EQ(payload.size(), 4 * 8u);
  // 1.0 = 0x3FF0000000000000, least significant byte first
  EXPECT_EQ(static_cast<unsigned char>(payload[7]), 0x3F);
  EXPECT_EQ(static_cast<unsigned char>(payload[6]), 0xF0);
  EXPECT_EQ(static_cast<unsigned char>(payload[0]), 0x00);
}

TEST(BinaryFunctions, MalformedFilesAreRejected) {
  const Grid g(1, 1.0, 0.5);
  std::stringstream good(std::ios::in | std::ios::out | std::ios::binary);
  write_functions(good, {SampledFunction::constant(g, 2.0)});
  const std::string bytes = good.str();

  std::stringstream truncated(bytes.substr(0, bytes.size() - 3));
  EXPECT_EQ(code_of([&] { read_functions(truncated); }), ErrorCode::invalid_input);
  std::stringstream trailing(bytes + "x");
  EXPECT_EQ(code_of([&] { read_functions(trailing); }), ErrorCode::invalid_input);
  std::stringstream header("{\"format\":\"other\"}\n");
  EXPECT_EQ(code_of([&] { read_functions(header); }), ErrorCode::invalid_input);
  std::stringstream garbage("not json\n");
  EXPECT_EQ(code_of([&] { read_functions(garbage); }), ErrorCode::invalid_input);
}

TEST(Config, ParsesMinimalConfig) {
  const auto cfg = parse_config(minimal());
  EXPECT_EQ(cfg.grid, Grid(1, 1.0, 0.03125));
  ASSERT_EQ(cfg.presets.size(), 1u);
  EXPECT_EQ(cfg.presets[0].preset, PresetKind::identity);
  EXPECT_EQ(cfg.weight("w").power_terms().at(0).exponent, 0.5);
  EXPECT_EQ(cfg.levels, 2);
}

TEST(Config, FlagOverridesReachSource) {
  const auto cfg = parse_config(minimal(), 99, 3, true);
  EXPECT_EQ(cfg.seed, 99u);
  EXPECT_EQ(cfg.levels, 3);
  EXPECT_TRUE(cfg.audit);
  EXPECT_EQ(cfg.presets[0].corpus.seed, 99u);
  EXPECT_EQ(cfg.source.at("seed").get<int>(), 99);
}

TEST(Config, InvalidInputsUseInputErrorCode) {
  auto bad_weight = minimal();
  bad_weight["weights"]["w"]["kind"] = "lorentz";
  EXPECT_EQ(code_of([&] { parse_config(bad_weight); }), ErrorCode::invalid_input);

  auto missing_alpha = minimal();
  missing_alpha["weights"]["w"]["terms"][0].erase("alpha");
  EXPECT_EQ(code_of([&] { parse_config(missing_alpha); }), ErrorCode::invalid_input);

  auto bad_grid = minimal();
  bad_grid["grid"]["h"] = 0.3;
  EXPECT_EQ(code_of([&] { parse_config(bad_grid); }), ErrorCode::invalid_input);

  auto unknown_id = minimal();
  unknown_id["presets"][0]["params"]["weights"] = {"nope"};
  EXPECT_EQ(code_of([&] { parse_config(unknown_id); }), ErrorCode::invalid_input);

  auto bad_preset = minimal();
  bad_preset["presets"][0]["preset"] = "theorem";
  EXPECT_EQ(code_of([&] { parse_config(bad_preset); }), ErrorCode::invalid_input);

  auto bad_kappa = minimal();
  bad_kappa["norms"] = json::parse(R"([{"space": "morrey", "kappa": 1.5}])");
  EXPECT_EQ(code_of([&] { parse_config(bad_kappa); }), ErrorCode::invalid_input);

  EXPECT_EQ(code_of([&] { parse_config(json::array()); }), ErrorCode::invalid_input);
}

TEST(Config, KernelGuardUsesCostCode) {
  auto cfg = minimal();
  cfg["presets"] = json::parse(R"([{"preset": "strong_morrey",
      "params": {"weights": ["one", "one", "one"], "P": [2, 2, 2], "kernel": {"kind": "majorant", "m": 3}}}])");
  cfg["grid"] = json::parse(R"({"n": 2, "L": 1.0, "h": 0.25})");
  EXPECT_EQ(code_of([&] { parse_config(cfg); }), ErrorCode::cost_guard);
}

TEST(Config, KernelThetaAndFamilyFields) {
  auto root = minimal();
  root["kernel"] = json::parse(R"({"kind": "homogeneous", "m": 2, "A": 1.5, "omega": {"harmonic": 3}, "trunc_eps_over_h": 2})");
  root["families"] = json::parse(R"({"origin": {"centers": "origin", "r_max": 0.5, "include_domain_ball": false}})");
  root["presets"] = json::parse(R"([{"preset": "strong_morrey",
      "params": {"weights": ["w", "one"], "P": [2, 4], "kappa": 0.25, "family_id": "origin",
                 "theta": {"kind": "log_power", "beta": 3}, "corpus": {"size": 3, "generators": ["bump"]}}}])");
  const auto cfg = parse_config(root);
  const auto& s = cfg.presets.at(0);
  EXPECT_EQ(s.kernel->harmonic(), 3);
  EXPECT_DOUBLE_EQ(s.kernel->amplitude(), 1.5);
  EXPECT_DOUBLE_EQ(s.trunc.epsilon_over_h, 2.0);
  EXPECT_EQ(s.theta.kind(), ThetaKind::log_power);
  EXPECT_EQ(s.family.centers, CenterLayout::origin);
  EXPECT_DOUBLE_EQ(s.family.r_max, 0.5);
  EXPECT_EQ(s.corpus.size, 3u);
  EXPECT_EQ(s.corpus.generators, std::vector<std::string>{"bump"});
}

TEST(Reports, JsonAndCsvShapes) {
  InequalitySpec s;
  s.label = "id";
  s.weights = {Weight::constant(1.0)};
  s.exponents = {2.0};
  s.corpus.size = 3;
  const auto rep = verify_inequality(s, Grid(1, 1.0, 1.0 / 16), 2);
  const json j = report_json(rep);
  EXPECT_EQ(j.at("verdict"), "stable");
  EXPECT_TRUE(j.at("pass").get<bool>());
  EXPECT_EQ(j.at("levels").size(), 2u);
  std::ostringstream csv;
  write_ratio_csv(csv, {rep});
  std::istringstream lines(csv.str());
  std::string header;
  std::getline(lines, header);
  EXPECT_EQ(header, "preset,label,stage,h,member,group,lhs,rhs,ratio");
  int rows = 0;
  for (std::string line; std::getline(lines, line);) ++rows;
  EXPECT_EQ(rows, 6);
  EXPECT_EQ(csv_escape("a,b"), "\"a,b\"");
  EXPECT_EQ(csv_escape("say \"hi\""), "\"say \"\"hi\"\"\"");
  EXPECT_EQ(format_double(0.1), "0.10000000000000001");
}
