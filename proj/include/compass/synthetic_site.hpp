#pragma once

#include <cstdint>
#include <map>
#include <memory>
#include <span>
#include <string>
#include <vector>

#include "compass/fetch.hpp"
#include "compass/registry.hpp"
#include "compass/time.hpp"

namespace compass {

/// Offline stand-in for every newspaper in a registry. Pages are generated
/// deterministically from (newspaper, day, seed), so runs against it are
/// reproducible without network access.
///
/// Each homepage carries about 240 anchors: short section links, duplicates,
/// fragments, mailto/javascript links and relative links, plus 30 article
/// links whose paths are longer than anything else on the page. The 20
/// longest always include tag listings (no main text), videos (not HTML),
/// short and overlong articles, and kGoodArticlesPerDay articles whose body
/// falls inside the default length bounds.
class SyntheticSite {
 public:
  static constexpr int kGoodArticlesPerDay = 11;

  SyntheticSite(std::span<const NewspaperSource> sources, Date first_day, std::uint64_t seed = 0);

  /// Serves the page for `url` as it looks on `day` (0-based).
  FetchResult serve(const Url& url, int day) const;
  std::shared_ptr<Fetcher> fetcher_for_day(int day) const;

  Date date_of(int day) const;

 private:
  enum class Kind { Good, Short, Long, Tag, Video };
  static Kind kind_of(int index);

  std::string homepage(const NewspaperSource& src, int day) const;
  std::string article_path(const NewspaperSource& src, int day, int index) const;
  FetchResult article(const NewspaperSource& src, int day, int index) const;

  std::map<std::string, NewspaperSource> by_host_;
  Date first_day_;
  std::uint64_t seed_;
};

}  // namespace compass
