#pragma once

#include <optional>
#include <span>
#include <string>
#include <vector>

#include "compass/event_log.hpp"
#include "compass/gateway.hpp"
#include "compass/harvester.hpp"
#include "compass/registry.hpp"
#include "compass/store.hpp"

namespace compass {

/// The pool ran out before A valid evaluations were collected.
class PoolExhausted : public Error {
 public:
  PoolExhausted(int got, int wanted)
      : Error("article pool exhausted: " + std::to_string(got) + " of " + std::to_string(wanted) +
              " valid evaluations"),
        got_(got),
        wanted_(wanted) {}
  int got() const { return got_; }
  int wanted() const { return wanted_; }

 private:
  int got_;
  int wanted_;
};

struct BatchOptions {
  /// Transient provider failures (timeouts, 429, 5xx) retried inside the gateway.
  int retry_budget = 3;
  /// Extra attempts on the same article after an unparseable or out-of-range
  /// answer. 0 means the article is consumed by its first bad answer.
  int malformed_retries = 0;
};

struct SkippedArticle {
  std::string article_id;
  std::string reason;
};

struct BatchResult {
  std::vector<Evaluation> evaluations;
  BatchStatus status = BatchStatus::Complete;
  std::optional<PoolExhausted> shortfall;  // set iff status is Incomplete
  std::vector<SkippedArticle> skipped;
  Money cost;
};

/// Walks `pool` in order until `wanted` valid evaluations are collected.
/// Bad answers and provider failures consume the article and the walk goes
/// on; a short result carries PoolExhausted(got, wanted). QuotaExhausted and
/// MissingCredentials propagate, since no later article could succeed.
BatchResult collect_daily_batch(Gateway& gateway, const Clock& clock, const NewspaperSource& newspaper,
                                const ModelSpec& model, std::span<const ArticleRecord> pool, int wanted,
                                const BatchOptions& options = {}, EventLog* log = nullptr);

}  // namespace compass
