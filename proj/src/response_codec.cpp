#include "adactrl/response_codec.hpp"

#include <cctype>
#include <cstdlib>
#include <numeric>
#include <stdexcept>

namespace adactrl::codec {

namespace {

constexpr std::string_view kEasyLiteral = "[Easy]";
constexpr std::string_view kHardLiteral = "[Hard]";
constexpr std::string_view kBoxedOpener = "\\boxed{";

bool is_space(char c) { return std::isspace(static_cast<unsigned char>(c)) != 0; }

std::string_view trim(std::string_view s) {
  while (!s.empty() && is_space(s.front())) s.remove_prefix(1);
  while (!s.empty() && is_space(s.back())) s.remove_suffix(1);
  return s;
}

// Exact rational with overflow-checked parsing. Comparison cross-multiplies
// in 128-bit, which cannot overflow for 63-bit numerators/denominators.
struct Rational {
  long long num = 0;
  long long den = 1;
};

bool parse_uint_digits(std::string_view s, std::size_t& pos, unsigned long long& out,
                       int* digits = nullptr) {
  unsigned long long v = 0;
  int n = 0;
  while (pos < s.size() && s[pos] >= '0' && s[pos] <= '9') {
    if (v > (0x7fffffffffffffffULL - 9) / 10) return false;  // would overflow
    v = v * 10 + static_cast<unsigned long long>(s[pos] - '0');
    ++pos;
    ++n;
  }
  if (n == 0) return false;
  out = v;
  if (digits) *digits = n;
  return true;
}

// int := '-'? digits
bool parse_signed_int(std::string_view s, std::size_t& pos, long long& out) {
  bool neg = false;
  std::size_t p = pos;
  if (p < s.size() && (s[p] == '-' || s[p] == '+')) {
    neg = s[p] == '-';
    ++p;
  }
  unsigned long long mag = 0;
  if (!parse_uint_digits(s, p, mag)) return false;
  pos = p;
  out = neg ? -static_cast<long long>(mag) : static_cast<long long>(mag);
  return true;
}

// Grammar: sign? ( \frac{int}{int} | int '/' int | decimal | int )
// Returns false when the text is not entirely one rational literal.
bool parse_rational(std::string_view s, Rational& out) {
  std::size_t pos = 0;
  bool neg = false;
  if (pos < s.size() && (s[pos] == '-' || s[pos] == '+')) {
    neg = s[pos] == '-';
    ++pos;
  }

  long long num = 0;
  long long den = 1;

  if (s.substr(pos).starts_with("\\frac{")) {
    pos += 6;
    if (!parse_signed_int(s, pos, num)) return false;
    if (pos >= s.size() || s[pos] != '}') return false;
    ++pos;
    if (pos >= s.size() || s[pos] != '{') return false;
    ++pos;
    if (!parse_signed_int(s, pos, den)) return false;
    if (pos >= s.size() || s[pos] != '}') return false;
    ++pos;
  } else {
    unsigned long long intpart = 0;
    std::size_t p = pos;
    bool have_int = parse_uint_digits(s, p, intpart);
    if (have_int && p < s.size() && s[p] == '/') {
      ++p;
      long long d = 0;
      if (!parse_signed_int(s, p, d)) return false;
      num = static_cast<long long>(intpart);
      den = d;
      pos = p;
    } else if ((have_int && p < s.size() && s[p] == '.') ||
               (!have_int && pos < s.size() && s[pos] == '.')) {
      if (!have_int) {
        intpart = 0;
        p = pos;
      }
      ++p;  // consume '.'
      unsigned long long fracpart = 0;
      int frac_digits = 0;
      if (p < s.size() && s[p] >= '0' && s[p] <= '9') {
        if (!parse_uint_digits(s, p, fracpart, &frac_digits)) return false;
      }
      // value = intpart + fracpart / 10^frac_digits
      unsigned long long scale = 1;
      for (int i = 0; i < frac_digits; ++i) {
        if (scale > 0x7fffffffffffffffULL / 10) return false;
        scale *= 10;
      }
      if (intpart > (0x7fffffffffffffffULL - fracpart) / scale) return false;
      num = static_cast<long long>(intpart * scale + fracpart);
      den = static_cast<long long>(scale);
      pos = p;
    } else if (have_int) {
      num = static_cast<long long>(intpart);
      den = 1;
      pos = p;
    } else {
      return false;
    }
  }

  if (pos != s.size()) return false;
  if (den == 0) return false;
  if (neg) num = -num;
  out = Rational{num, den};
  return true;
}

bool rationals_equal(const Rational& a, const Rational& b) {
  return static_cast<__int128>(a.num) * b.den == static_cast<__int128>(b.num) * a.den;
}

}  // namespace

std::string_view tag_literal(DifficultyTag tag) {
  return tag == DifficultyTag::Easy ? kEasyLiteral : kHardLiteral;
}

std::string_view tag_name(DifficultyTag tag) {
  return tag == DifficultyTag::Easy ? "Easy" : "Hard";
}

std::optional<DifficultyTag> tag_from_name(std::string_view name) {
  if (name == "Easy" || name == kEasyLiteral) return DifficultyTag::Easy;
  if (name == "Hard" || name == kHardLiteral) return DifficultyTag::Hard;
  return std::nullopt;
}

std::optional<DifficultyTag> parse_tag(std::string_view raw) {
  std::string_view s = raw;
  while (!s.empty() && is_space(s.front())) s.remove_prefix(1);
  if (s.starts_with(kEasyLiteral)) return DifficultyTag::Easy;
  if (s.starts_with(kHardLiteral)) return DifficultyTag::Hard;
  return std::nullopt;
}

std::optional<std::string> extract_boxed_answer(std::string_view raw) {
  std::optional<std::string> last;
  std::size_t search = 0;
  while (true) {
    const std::size_t at = raw.find(kBoxedOpener, search);
    if (at == std::string_view::npos) break;
    search = at + 1;
    const std::size_t start = at + kBoxedOpener.size();
    int depth = 1;
    for (std::size_t i = start; i < raw.size(); ++i) {
      if (raw[i] == '{') {
        ++depth;
      } else if (raw[i] == '}') {
        --depth;
        if (depth == 0) {
          last = std::string(raw.substr(start, i - start));
          break;
        }
      }
    }
    // depth never reached 0: unbalanced opener, skip it
  }
  return last;
}

std::string normalize_answer(std::string_view answer) {
  std::string_view s = trim(answer);
  while (s.size() >= 2 && s.front() == '$' && s.back() == '$') {
    s.remove_prefix(1);
    s.remove_suffix(1);
    s = trim(s);
  }
  std::string out;
  out.reserve(s.size());
  bool in_space = false;
  for (char c : s) {
    if (is_space(c)) {
      in_space = true;
      continue;
    }
    if (in_space && !out.empty()) out.push_back(' ');
    in_space = false;
    out.push_back(c);
  }
  return out;
}

bool answers_equivalent(std::string_view candidate, std::string_view truth) {
  const std::string a = normalize_answer(candidate);
  const std::string b = normalize_answer(truth);
  if (a.empty() || b.empty()) return false;
  Rational ra, rb;
  if (parse_rational(a, ra) && parse_rational(b, rb)) {
    return rationals_equal(ra, rb);
  }
  return a == b;
}

std::uint64_t whitespace_token_count(std::string_view text) {
  std::uint64_t count = 0;
  bool in_token = false;
  for (char c : text) {
    if (is_space(c)) {
      in_token = false;
    } else if (!in_token) {
      in_token = true;
      ++count;
    }
  }
  return count;
}

std::uint64_t measure_length(std::optional<long long> explicit_count, std::string_view raw) {
  if (explicit_count.has_value()) {
    if (*explicit_count < 0) {
      throw std::invalid_argument("measure_length: negative token_count");
    }
    return static_cast<std::uint64_t>(*explicit_count);
  }
  return whitespace_token_count(raw);
}

ParsedResponse parse_response(std::string_view raw) {
  ParsedResponse parsed;
  parsed.tag = parse_tag(raw);
  std::string_view body = raw;
  while (!body.empty() && is_space(body.front())) body.remove_prefix(1);
  if (parsed.tag.has_value()) body.remove_prefix(tag_literal(*parsed.tag).size());
  while (!body.empty() && is_space(body.front())) body.remove_prefix(1);
  parsed.body = std::string(body);
  parsed.final_answer = extract_boxed_answer(raw);
  parsed.token_count = whitespace_token_count(raw);
  return parsed;
}

}  // namespace adactrl::codec
