#pragma once

#include <array>
#include <chrono>
#include <filesystem>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "compass/config.hpp"
#include "compass/error.hpp"
#include "compass/money.hpp"

namespace compass {

enum class PositioningLabel { Right, CentreRight, Centre, CentreLeft, Left, Independent, Unknown };

inline constexpr std::array kAllPositioningLabels = {
    PositioningLabel::Right,      PositioningLabel::CentreRight, PositioningLabel::Centre,
    PositioningLabel::CentreLeft, PositioningLabel::Left,        PositioningLabel::Independent,
    PositioningLabel::Unknown};

/// Enumerator name, e.g. "CentreRight".
std::string_view label_name(PositioningLabel label);
/// Spelling used in the registry CSV, e.g. "Centre-right".
std::string_view label_display(PositioningLabel label);
/// Accepts the CSV spelling, the enumerator name (case-insensitive), and "-", "-*"
/// or "Unknown" for Unknown. Throws std::invalid_argument otherwise.
PositioningLabel parse_positioning(std::string_view text);

struct NewspaperSource {
  std::string id;
  std::string country;  // ISO 3166 alpha-3
  std::string name;
  std::string homepage_url;
  PositioningLabel positioning = PositioningLabel::Unknown;
  std::string source_note;

  friend bool operator==(const NewspaperSource&, const NewspaperSource&) = default;
};

class MalformedRow : public Error {
 public:
  MalformedRow(std::size_t line, const std::string& reason)
      : Error("malformed registry row at line " + std::to_string(line) + ": " + reason), line_(line) {}
  std::size_t line() const { return line_; }

 private:
  std::size_t line_;
};

class DuplicateId : public Error {
 public:
  explicit DuplicateId(std::string id) : Error("duplicate newspaper id '" + id + "'"), id_(std::move(id)) {}
  const std::string& id() const { return id_; }

 private:
  std::string id_;
};

inline constexpr std::string_view kRegistryHeader = "Country,Newspaper,Homepage,Positioning,SourceNote";

/// Newspaper ids are slugs of the display name ("Le Monde" -> "le-monde").
std::vector<NewspaperSource> parse_registry(std::string_view csv_text);
std::vector<NewspaperSource> load_registry(const std::filesystem::path& path);
std::string serialize_registry(std::span<const NewspaperSource> sources);

/// Every label appears in the result, absent ones with count 0.
std::map<PositioningLabel, std::size_t> positioning_counts(std::span<const NewspaperSource> sources);
std::size_t distinct_countries(std::span<const NewspaperSource> sources);

// ---------------------------------------------------------------------------

enum class ProviderKind { OpenAiStyle, GoogleStyle, Mock };
enum class QuotaMode { Delay, Fail };
enum class MockMode { Hash, Fixed };

std::string_view provider_name(ProviderKind kind);
ProviderKind parse_provider(std::string_view text);

struct ModelSpec {
  std::string id;
  ProviderKind provider = ProviderKind::Mock;
  std::string endpoint;
  /// Model name sent to the provider API ("gpt-4-turbo"); unused by mocks.
  std::string api_model;
  Money input_token_cost;
  Money output_token_cost;
  std::optional<int> daily_request_quota;
  QuotaMode quota_mode = QuotaMode::Delay;
  std::chrono::milliseconds request_timeout{60'000};
  MockMode mock_mode = MockMode::Hash;
};

class UnknownModel : public Error {
 public:
  explicit UnknownModel(const std::string& id) : Error("unknown model '" + id + "'") {}
};

class AmbiguousModel : public Error {
 public:
  explicit AmbiguousModel(const std::string& id) : Error("model id '" + id + "' is defined more than once") {}
};

const ModelSpec& resolve_model(std::string_view id, std::span<const ModelSpec> specs);

/// Built-in specs: "mock" (seeded hash scores) and "mock-fixed" (always [0, 0]).
std::vector<ModelSpec> default_model_specs();

/// Reads every `[[model]]` block. Throws ConfigError on invalid fields.
std::vector<ModelSpec> model_specs_from_config(const config::Document& doc);

/// Environment variable holding a model's API key: "PROVIDER_CHATGPT_4_KEY".
std::string api_key_env_var(std::string_view model_id);

// ---------------------------------------------------------------------------

/// Run parameters with their reference defaults.
struct RunParameters {
  int max_links = 200;        // N
  int select = 20;            // S
  int min_chars = 1000;       // MIN
  int max_chars = 5000;       // MAX
  int articles_per_day = 5;   // A
  int days = 5;

  /// Throws InvalidParameters unless S <= N, MIN < MAX and every count >= 1.
  void validate() const;
  friend bool operator==(const RunParameters&, const RunParameters&) = default;
};

class InvalidParameters : public ConfigError {
 public:
  using ConfigError::ConfigError;
};

/// Overlays the `[run.params]` table onto `base`; does not validate.
RunParameters run_parameters_from_config(const config::Document& doc, RunParameters base = {});

}  // namespace compass
