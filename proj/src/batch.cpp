#include "compass/batch.hpp"

namespace compass {

BatchResult collect_daily_batch(Gateway& gateway, const Clock& clock, const NewspaperSource& newspaper,
                                const ModelSpec& model, std::span<const ArticleRecord> pool, int wanted,
                                const BatchOptions& options, EventLog* log) {
  BatchResult out;
  const auto skip = [&](const ArticleRecord& a, const std::string& reason) {
    out.skipped.push_back({a.id, reason});
    if (log) {
      log->emit("article_skipped", {{"newspaper_id", newspaper.id},
                                    {"model_id", model.id},
                                    {"article_id", a.id},
                                    {"reason", reason}});
    }
  };

  for (const auto& article : pool) {
    if (static_cast<int>(out.evaluations.size()) >= wanted) break;
    Prompt prompt;
    try {
      prompt = build_prompt(article.body_text);
    } catch (const EmptyArticle& e) {
      skip(article, e.what());
      continue;
    }
    for (int attempt = 0; attempt <= options.malformed_retries; ++attempt) {
      try {
        RawResponse resp = gateway.query_model(model, prompt, options.retry_budget);
        const CompassScore score = parse_score(resp.text);
        const CostEstimate cost = estimate_cost(resp, model);
        Evaluation e;
        e.article_id = article.id;
        e.newspaper_id = newspaper.id;
        e.model_id = model.id;
        e.score = score;
        e.raw_text = std::move(resp.text);
        e.input_tokens = resp.input_tokens;
        e.output_tokens = resp.output_tokens;
        e.cost = cost.amount;
        e.evaluated_at = clock.now();
        e.batch_day = utc_date(e.evaluated_at);
        out.cost += cost.amount;
        out.evaluations.push_back(std::move(e));
        break;
      } catch (const FormatError& e) {
        if (attempt == options.malformed_retries) skip(article, e.what());
      } catch (const RangeError& e) {
        if (attempt == options.malformed_retries) skip(article, e.what());
      } catch (const ProviderError& e) {
        skip(article, e.what());
        break;
      } catch (const Timeout& e) {
        skip(article, e.what());
        break;
      }
    }
  }

  const int got = static_cast<int>(out.evaluations.size());
  if (got < wanted) {
    out.status = BatchStatus::Incomplete;
    out.shortfall.emplace(got, wanted);
  }
  return out;
}

}  // namespace compass
