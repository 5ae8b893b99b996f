#include <doctest.h>

#include "compass/config.hpp"
#include "compass/registry.hpp"
#include "support.hpp"

using namespace compass;

TEST_CASE("tables, arrays of tables and scalar kinds") {
  const auto doc = config::parse(R"(
top = "x"   # trailing comment
[run.params]
max_links = 150
ratio = 0.5
flag = true
path = 'C:\raw'

[[model]]
id = "a"
[[model]]
id = "b # not a comment"
)");
  CHECK(doc.root.at("top").as_string() == "x");
  const auto* params = doc.table("run.params");
  REQUIRE(params);
  CHECK(params->at("max_links").as_int() == 150);
  CHECK(params->at("ratio").as_double() == doctest::Approx(0.5));
  CHECK(params->at("flag").as_bool());
  CHECK(params->at("path").as_string() == "C:\\raw");
  const auto& models = doc.array("model");
  REQUIRE(models.size() == 2);
  CHECK(models[1].at("id").as_string() == "b # not a comment");
  CHECK(doc.array("absent").empty());
  CHECK(doc.table("absent") == nullptr);
}

TEST_CASE("errors carry the line number") {
  try {
    config::parse("a = 1\nb = [1, 2]\n");
    FAIL("expected ConfigError");
  } catch (const ConfigError& e) {
    CHECK(std::string(e.what()).find("line 2") != std::string::npos);
  }
  CHECK_THROWS_AS(config::parse("a = 1\na = 2\n"), ConfigError);
  CHECK_THROWS_AS(config::parse("[t]\nx = \"unterminated\n"), ConfigError);
  CHECK_THROWS_AS(config::parse("x = 1\n").root.at("y"), ConfigError);
}

TEST_CASE("shipped model config loads; prices give an exact 20x ratio") {
  const auto doc = config::load(testsupport::source_dir() / "data" / "models.toml");
  const auto specs = model_specs_from_config(doc);
  const auto& gpt4 = resolve_model("chatgpt-4", specs);
  const auto& gpt35 = resolve_model("chatgpt-3.5", specs);
  CHECK(gpt4.provider == ProviderKind::OpenAiStyle);
  CHECK(gpt4.input_token_cost.units() == 20 * gpt35.input_token_cost.units());
  CHECK(gpt4.output_token_cost.units() == 20 * gpt35.output_token_cost.units());
  CHECK(resolve_model("gemini-pro-1.5", specs).daily_request_quota == 50);
  CHECK(resolve_model("mock-fixed", specs).mock_mode == MockMode::Fixed);
  CHECK(run_parameters_from_config(doc) == RunParameters{});
}

TEST_CASE("run parameters overlay and validation") {
  const auto doc = config::parse("[run.params]\nselect = 10\narticles_per_day = 3\n");
  const auto p = run_parameters_from_config(doc);
  CHECK(p.select == 10);
  CHECK(p.articles_per_day == 3);
  CHECK(p.max_links == 200);
  p.validate();

  RunParameters bad;
  bad.select = 201;
  CHECK_THROWS_AS(bad.validate(), InvalidParameters);
  bad = {};
  bad.min_chars = 6000;
  CHECK_THROWS_AS(bad.validate(), InvalidParameters);
  bad = {};
  bad.articles_per_day = 0;
  CHECK_THROWS_AS(bad.validate(), InvalidParameters);
}

TEST_CASE("invalid model blocks are rejected") {
  CHECK_THROWS_AS(model_specs_from_config(config::parse("[[model]]\nid = \"x\"\nprovider = \"carrier-pigeon\"\n")),
                  ConfigError);
  CHECK_THROWS_AS(model_specs_from_config(config::parse("[[model]]\nid = \"x\"\ninput_token_cost = \"-1\"\n")),
                  ConfigError);
  CHECK_THROWS_AS(model_specs_from_config(config::parse("[[model]]\nprovider = \"mock\"\n")), ConfigError);
}

TEST_CASE("api key variable naming") {
  CHECK(api_key_env_var("chatgpt-4") == "PROVIDER_CHATGPT_4_KEY");
  CHECK(api_key_env_var("gemini-pro-1.5") == "PROVIDER_GEMINI_PRO_1_5_KEY");
}

TEST_CASE("resolve_model reports unknown and ambiguous ids") {
  auto specs = default_model_specs();
  CHECK(resolve_model("mock", specs).id == "mock");
  CHECK_THROWS_AS(resolve_model("nope", specs), UnknownModel);
  specs.push_back(specs.front());
  CHECK_THROWS_AS(resolve_model(specs.front().id, specs), AmbiguousModel);
}
