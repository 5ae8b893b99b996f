#include "compass/registry.hpp"

#include <algorithm>
#include <cctype>
#include <fstream>
#include <set>
#include <sstream>

#include "compass/csv.hpp"
#include "compass/text.hpp"
#include "compass/url.hpp"

namespace compass {

std::string_view label_name(PositioningLabel label) {
  switch (label) {
    case PositioningLabel::Right: return "Right";
    case PositioningLabel::CentreRight: return "CentreRight";
    case PositioningLabel::Centre: return "Centre";
    case PositioningLabel::CentreLeft: return "CentreLeft";
    case PositioningLabel::Left: return "Left";
    case PositioningLabel::Independent: return "Independent";
    case PositioningLabel::Unknown: return "Unknown";
  }
  return "Unknown";
}

std::string_view label_display(PositioningLabel label) {
  switch (label) {
    case PositioningLabel::CentreRight: return "Centre-right";
    case PositioningLabel::CentreLeft: return "Centre-left";
    default: return label_name(label);
  }
}

PositioningLabel parse_positioning(std::string_view text) {
  const std::string t = trim(text);
  if (t == "-" || t == "-*") return PositioningLabel::Unknown;
  for (const auto label : kAllPositioningLabels) {
    if (iequals_ascii(t, label_name(label)) || iequals_ascii(t, label_display(label))) return label;
  }
  throw std::invalid_argument("unknown positioning label '" + t + "'");
}

std::vector<NewspaperSource> parse_registry(std::string_view csv_text) {
  std::vector<csv::Row> rows;
  try {
    rows = csv::parse(csv_text);
  } catch (const std::invalid_argument& e) {
    throw MalformedRow(0, e.what());
  }
  if (rows.empty()) throw MalformedRow(1, "missing header");
  const std::vector<std::string> expected = {"Country", "Newspaper", "Homepage", "Positioning", "SourceNote"};
  if (rows.front().fields != expected) {
    throw MalformedRow(rows.front().line, "header must be " + std::string(kRegistryHeader));
  }

  std::vector<NewspaperSource> out;
  std::set<std::string> seen;
  for (std::size_t r = 1; r < rows.size(); ++r) {
    const auto& row = rows[r];
    if (row.fields.size() != 5) {
      throw MalformedRow(row.line, "expected 5 fields, got " + std::to_string(row.fields.size()));
    }
    NewspaperSource s;
    s.country = trim(row.fields[0]);
    s.name = trim(row.fields[1]);
    s.homepage_url = trim(row.fields[2]);
    s.source_note = row.fields[4];
    const bool country_ok = s.country.size() == 3 && std::all_of(s.country.begin(), s.country.end(), [](char c) {
                              return c >= 'A' && c <= 'Z';
                            });
    if (!country_ok) throw MalformedRow(row.line, "country '" + s.country + "' is not an ISO alpha-3 code");
    if (s.name.empty()) throw MalformedRow(row.line, "empty newspaper name");
    if (!is_absolute_http_url(s.homepage_url) || s.homepage_url.find(' ') != std::string::npos) {
      throw MalformedRow(row.line, "homepage '" + s.homepage_url + "' is not an absolute http(s) URL");
    }
    try {
      s.positioning = parse_positioning(row.fields[3]);
    } catch (const std::invalid_argument& e) {
      throw MalformedRow(row.line, e.what());
    }
    s.id = slugify(s.name);
    if (s.id.empty()) throw MalformedRow(row.line, "name '" + s.name + "' yields an empty id");
    if (!seen.insert(s.id).second) throw DuplicateId(s.id);
    out.push_back(std::move(s));
  }
  return out;
}

std::vector<NewspaperSource> load_registry(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("cannot open registry " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_registry(ss.str());
}

std::string serialize_registry(std::span<const NewspaperSource> sources) {
  std::string out(kRegistryHeader);
  out.push_back('\n');
  for (const auto& s : sources) {
    out += csv::join_row({s.country, s.name, s.homepage_url, std::string(label_display(s.positioning)),
                          s.source_note});
    out.push_back('\n');
  }
  return out;
}

std::map<PositioningLabel, std::size_t> positioning_counts(std::span<const NewspaperSource> sources) {
  std::map<PositioningLabel, std::size_t> counts;
  for (const auto label : kAllPositioningLabels) counts[label] = 0;
  for (const auto& s : sources) ++counts[s.positioning];
  return counts;
}

std::size_t distinct_countries(std::span<const NewspaperSource> sources) {
  std::set<std::string> countries;
  for (const auto& s : sources) countries.insert(s.country);
  return countries.size();
}

// ---------------------------------------------------------------------------

std::string_view provider_name(ProviderKind kind) {
  switch (kind) {
    case ProviderKind::OpenAiStyle: return "openai-style";
    case ProviderKind::GoogleStyle: return "google-style";
    case ProviderKind::Mock: return "mock";
  }
  return "mock";
}

ProviderKind parse_provider(std::string_view text) {
  for (auto kind : {ProviderKind::OpenAiStyle, ProviderKind::GoogleStyle, ProviderKind::Mock}) {
    if (text == provider_name(kind)) return kind;
  }
  throw std::invalid_argument("unknown provider '" + std::string(text) + "'");
}

const ModelSpec& resolve_model(std::string_view id, std::span<const ModelSpec> specs) {
  const ModelSpec* found = nullptr;
  for (const auto& spec : specs) {
    if (spec.id != id) continue;
    if (found) throw AmbiguousModel(std::string(id));
    found = &spec;
  }
  if (!found) throw UnknownModel(std::string(id));
  return *found;
}

std::vector<ModelSpec> default_model_specs() {
  ModelSpec hash;
  hash.id = "mock";
  hash.provider = ProviderKind::Mock;
  hash.endpoint = "mock://hash";
  hash.mock_mode = MockMode::Hash;

  ModelSpec fixed = hash;
  fixed.id = "mock-fixed";
  fixed.endpoint = "mock://fixed";
  fixed.mock_mode = MockMode::Fixed;
  return {hash, fixed};
}

std::vector<ModelSpec> model_specs_from_config(const config::Document& doc) {
  std::vector<ModelSpec> specs;
  for (const auto& block : doc.array("model")) {
    auto bad = [&](const std::string& msg) -> ConfigError {
      return ConfigError("config line " + std::to_string(block.line) + ": " + msg);
    };
    ModelSpec spec;
    spec.id = block.at("id").as_string();
    // Slugs may keep dots ("chatgpt-3.5").
    for (char c : spec.id) {
      if (!(std::islower(static_cast<unsigned char>(c)) || std::isdigit(static_cast<unsigned char>(c)) || c == '-' ||
            c == '.' || c == '_')) {
        throw bad("model id '" + spec.id + "' must be a lowercase slug");
      }
    }
    if (spec.id.empty()) throw bad("model id must not be empty");
    try {
      spec.provider = parse_provider(block.at("provider").as_string());
    } catch (const std::invalid_argument& e) {
      throw bad(e.what());
    }
    if (const auto* v = block.find("endpoint")) spec.endpoint = v->as_string();
    if (spec.provider != ProviderKind::Mock && !is_absolute_http_url(spec.endpoint)) {
      throw bad("model '" + spec.id + "' needs an absolute http(s) endpoint");
    }
    if (const auto* v = block.find("api_model")) spec.api_model = v->as_string();
    try {
      if (const auto* v = block.find("input_token_cost")) spec.input_token_cost = Money::parse(v->as_decimal_text());
      if (const auto* v = block.find("output_token_cost")) spec.output_token_cost = Money::parse(v->as_decimal_text());
    } catch (const std::invalid_argument& e) {
      throw bad("model '" + spec.id + "': token costs must be nonnegative decimals (" + e.what() + ")");
    }
    if (const auto* v = block.find("daily_request_quota")) {
      const auto q = v->as_int();
      if (q < 1) throw bad("model '" + spec.id + "': daily_request_quota must be >= 1");
      spec.daily_request_quota = static_cast<int>(q);
    }
    if (const auto* v = block.find("quota_mode")) {
      const auto& m = v->as_string();
      if (m == "delay") {
        spec.quota_mode = QuotaMode::Delay;
      } else if (m == "fail") {
        spec.quota_mode = QuotaMode::Fail;
      } else {
        throw bad("quota_mode must be 'delay' or 'fail'");
      }
    }
    if (const auto* v = block.find("request_timeout_s")) {
      const double s = v->as_double();
      if (!(s > 0)) throw bad("request_timeout_s must be positive");
      spec.request_timeout = std::chrono::milliseconds{static_cast<long long>(s * 1000)};
    }
    if (const auto* v = block.find("mock_mode")) {
      const auto& m = v->as_string();
      if (m == "hash") {
        spec.mock_mode = MockMode::Hash;
      } else if (m == "fixed") {
        spec.mock_mode = MockMode::Fixed;
      } else {
        throw bad("mock_mode must be 'hash' or 'fixed'");
      }
    }
    specs.push_back(std::move(spec));
  }
  return specs;
}

std::string api_key_env_var(std::string_view model_id) {
  std::string out = "PROVIDER_";
  for (char c : model_id) {
    out.push_back(std::isalnum(static_cast<unsigned char>(c)) ? static_cast<char>(std::toupper(static_cast<unsigned char>(c)))
                                                              : '_');
  }
  return out + "_KEY";
}

// ---------------------------------------------------------------------------

void RunParameters::validate() const {
  auto require = [](bool ok, const std::string& msg) {
    if (!ok) throw InvalidParameters(msg);
  };
  require(max_links >= 1, "N (max links) must be >= 1");
  require(select >= 1, "S (selected URLs) must be >= 1");
  require(min_chars >= 1, "MIN must be >= 1");
  require(articles_per_day >= 1, "A (articles per day) must be >= 1");
  require(days >= 1, "days must be >= 1");
  require(select <= max_links, "S must not exceed N");
  require(min_chars < max_chars, "MIN must be smaller than MAX");
}

RunParameters run_parameters_from_config(const config::Document& doc, RunParameters base) {
  const auto* t = doc.table("run.params");
  if (!t) return base;
  auto read = [&](const char* key, int& field) {
    if (const auto* v = t->find(key)) field = static_cast<int>(v->as_int());
  };
  read("max_links", base.max_links);
  read("select", base.select);
  read("min_chars", base.min_chars);
  read("max_chars", base.max_chars);
  read("articles_per_day", base.articles_per_day);
  read("days", base.days);
  return base;
}

}  // namespace compass
