#include <doctest.h>

#include "compass/html.hpp"

using namespace compass::html;

TEST_CASE("entities decode") {
  CHECK(decode_entities("a &amp; b &lt;c&gt; &#233; &#xE9; &nbsp;x &bogus;") ==
        "a & b <c> \xC3\xA9 \xC3\xA9 \xC2\xA0x &bogus;");
}

TEST_CASE("raw text elements keep markup as text") {
  const auto doc = Document::parse("<p>one</p><script>var s = '<p>not a paragraph</p>';</script><p>two");
  const auto ps = doc.elements_by_tag("p");
  REQUIRE(ps.size() == 2);
  CHECK(doc.text_content(ps[1]) == "two");
}

TEST_CASE("implicit paragraph closing and void elements") {
  const auto doc = Document::parse("<div><p>a<br>b<p>c<img src=x></div><p>d");
  const auto ps = doc.elements_by_tag("p");
  REQUIRE(ps.size() == 3);
  CHECK(doc.text_content(ps[0]) == "ab");
  CHECK(doc.node(ps[0]).parent == doc.node(ps[1]).parent);
  CHECK(doc.node(doc.elements_by_tag("img")[0]).attr("src") == "x");
  CHECK_FALSE(doc.inside(ps[2], "div"));
  CHECK(doc.inside(ps[1], "div"));
}

TEST_CASE("comments, doctype and stray end tags are tolerated") {
  const auto doc = Document::parse("<!DOCTYPE html><!-- <p>hidden</p> --></span><P CLASS=\"Big\">x</P></b>");
  const auto ps = doc.elements_by_tag("p");
  REQUIRE(ps.size() == 1);
  CHECK(doc.node(ps[0]).attr("class") == "Big");
  CHECK(doc.text_content(ps[0]) == "x");
}

TEST_CASE("attribute forms") {
  const auto doc = Document::parse("<a href='/x?a=1&amp;b=2' data-k=v hidden>t</a>");
  const auto& a = doc.node(doc.elements_by_tag("a")[0]);
  CHECK(a.attr("href") == "/x?a=1&b=2");
  CHECK(a.attr("data-k") == "v");
  CHECK(a.attr("hidden") == "");
  CHECK_FALSE(a.attr("missing"));
}
