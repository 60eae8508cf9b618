#include <doctest.h>

#include <optional>
#include <string>
#include <vector>

#include "adactrl/response_codec.hpp"
#include "adactrl/rng.hpp"
#include "oracles.hpp"

using adactrl::codec::DifficultyTag;
namespace codec = adactrl::codec;

TEST_CASE("tag literals and names round-trip") {
  CHECK(codec::tag_literal(DifficultyTag::Easy) == "[Easy]");
  CHECK(codec::tag_literal(DifficultyTag::Hard) == "[Hard]");
  CHECK(codec::tag_name(DifficultyTag::Easy) == "Easy");
  CHECK(codec::tag_name(DifficultyTag::Hard) == "Hard");
  CHECK(codec::tag_from_name("Easy") == DifficultyTag::Easy);
  CHECK(codec::tag_from_name("Hard") == DifficultyTag::Hard);
  CHECK_FALSE(codec::tag_from_name("easy").has_value());
  CHECK_FALSE(codec::tag_from_name("").has_value());
}

TEST_CASE("parse_tag matches the exact leading literal") {
  CHECK(codec::parse_tag("[Easy] The answer is \\boxed{4}.") == DifficultyTag::Easy);
  CHECK(codec::parse_tag("  [Hard]\nFirst, consider...") == DifficultyTag::Hard);
  CHECK(codec::parse_tag("\t\n [Easy]x") == DifficultyTag::Easy);
  CHECK_FALSE(codec::parse_tag("Let me think step by step...").has_value());
  CHECK_FALSE(codec::parse_tag("[easy] lowercase").has_value());
  CHECK_FALSE(codec::parse_tag("[EASY]").has_value());
  CHECK_FALSE(codec::parse_tag("so [Easy] later").has_value());
  CHECK_FALSE(codec::parse_tag("[Eas").has_value());
  CHECK_FALSE(codec::parse_tag("").has_value());
  // Prefix property: literal + arbitrary text always parses to that tag.
  for (const char* suffix : {"", "x", " [Hard]", "\n\n", "{}}{"}) {
    CHECK(codec::parse_tag(std::string("[Easy]") + suffix) == DifficultyTag::Easy);
    CHECK(codec::parse_tag(std::string("[Hard]") + suffix) == DifficultyTag::Hard);
  }
}

TEST_CASE("extract_boxed_answer handles nesting and picks the last group") {
  CHECK(codec::extract_boxed_answer("so \\boxed{42}") == "42");
  CHECK(codec::extract_boxed_answer("\\boxed{\\frac{1}{2}}") == "\\frac{1}{2}");
  CHECK(codec::extract_boxed_answer("\\boxed{3} ... rechecking, \\boxed{5}") == "5");
  CHECK(codec::extract_boxed_answer("\\boxed{{a}{b}}") == "{a}{b}");
  CHECK(codec::extract_boxed_answer("\\boxed{}") == "");
  CHECK_FALSE(codec::extract_boxed_answer("no answer here").has_value());
  CHECK_FALSE(codec::extract_boxed_answer("\\boxed{unclosed").has_value());
  // A dangling opener is skipped, an earlier balanced group still counts.
  CHECK(codec::extract_boxed_answer("\\boxed{7} then \\boxed{oops") == "7");
}

TEST_CASE("extract_boxed_answer agrees with the brute-force scanner on random brace soup") {
  adactrl::Rng rng(20240817);
  const std::vector<std::string> pieces = {"{", "}", "\\boxed{", "x", " ", "42",
                                           "\\frac{1}{2}", "\\", "boxed"};
  for (int trial = 0; trial < 4000; ++trial) {
    std::string text;
    const int parts = 1 + static_cast<int>(rng.next_u64() % 12);
    for (int p = 0; p < parts; ++p) {
      text += pieces[rng.next_u64() % pieces.size()];
    }
    const auto got = codec::extract_boxed_answer(text);
    const auto want = oracles::scan_boxed(text);
    CAPTURE(text);
    CHECK(got == want);
  }
}

TEST_CASE("answers_equivalent normalizes and compares rationals exactly") {
  CHECK(codec::answers_equivalent("42", "42.0"));
  CHECK(codec::answers_equivalent("\\frac{1}{2}", "1/2"));
  CHECK(codec::answers_equivalent("-\\frac{3}{4}", "-0.75"));
  CHECK(codec::answers_equivalent(" 7 ", "7"));
  CHECK(codec::answers_equivalent("$12$", "12"));
  CHECK(codec::answers_equivalent("a  b", "a b"));  // internal whitespace collapses
  CHECK(codec::answers_equivalent("0.5", "2/4"));
  CHECK(codec::answers_equivalent("10/4", "5/2"));
  CHECK_FALSE(codec::answers_equivalent("3", "4"));
  CHECK_FALSE(codec::answers_equivalent("1/3", "0.3333"));
  CHECK_FALSE(codec::answers_equivalent("x+1", "1+x"));  // strings, no algebra
  CHECK(codec::answers_equivalent("x+1", "x+1"));
}

TEST_CASE("answers_equivalent is reflexive and symmetric") {
  const std::vector<std::string> samples = {"42",   "42.0", "1/2", "\\frac{1}{2}",
                                            "-3/4", "x+1",  "$9$", "a  b"};
  for (const auto& a : samples) {
    CHECK(codec::answers_equivalent(a, a));
    for (const auto& b : samples) {
      CHECK(codec::answers_equivalent(a, b) == codec::answers_equivalent(b, a));
    }
  }
}

TEST_CASE("rational equivalence matches an exact cross-multiplication oracle") {
  struct Case {
    const char* text;
    oracles::Rational value;
  };
  const std::vector<Case> cases = {
      {"42", {42, 1}},          {"42.0", {42, 1}},   {"0.5", {1, 2}},
      {"1/2", {1, 2}},          {"2/4", {1, 2}},     {"\\frac{1}{2}", {1, 2}},
      {"-\\frac{3}{4}", {-3, 4}}, {"-0.75", {-3, 4}}, {"10/4", {5, 2}},
      {"7", {7, 1}},            {"-2", {-2, 1}},     {"0.125", {1, 8}},
  };
  for (const auto& a : cases) {
    for (const auto& b : cases) {
      const bool want = oracles::rationals_equal(a.value, b.value);
      CAPTURE(a.text);
      CAPTURE(b.text);
      CHECK(codec::answers_equivalent(a.text, b.text) == want);
    }
  }
}

TEST_CASE("measure_length prefers the explicit count and falls back to whitespace tokens") {
  CHECK(codec::measure_length(349, "ignored text") == 349);
  CHECK(codec::measure_length(std::nullopt, "a b  c") == 3);
  CHECK(codec::measure_length(std::nullopt, "") == 0);
  CHECK(codec::measure_length(std::nullopt, "   \n\t ") == 0);
  CHECK(codec::measure_length(0, "a b") == 0);
  CHECK_THROWS_AS(codec::measure_length(-1, "x"), std::invalid_argument);
}

TEST_CASE("whitespace_token_count splits on any whitespace run") {
  CHECK(codec::whitespace_token_count("one") == 1);
  CHECK(codec::whitespace_token_count("one two\tthree\nfour") == 4);
  CHECK(codec::whitespace_token_count("  padded  ") == 1);
}

TEST_CASE("parse_response assembles tag, answer and token count") {
  const auto parsed = codec::parse_response("[Easy] The answer is \\boxed{4}.");
  CHECK(parsed.tag == DifficultyTag::Easy);
  CHECK(parsed.final_answer == "4");
  CHECK(parsed.token_count == 5);  // whitespace tokens of the full raw text

  const auto untagged = codec::parse_response("just text, no answer");
  CHECK_FALSE(untagged.tag.has_value());
  CHECK_FALSE(untagged.final_answer.has_value());
}
