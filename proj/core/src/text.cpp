#include "adaptqa/text.hpp"

#include <algorithm>
#include <array>
#include <cctype>

namespace adaptqa::text {

namespace {

bool is_word_char(unsigned char c) {
  return std::isalnum(c) != 0 || c >= 0x80;
}

// Trailing-token abbreviations (periods stripped) that do not terminate a
// sentence.
const std::array<std::string_view, 16> kAbbreviations = {
    "eg", "ie", "etc", "cf", "vs", "dr", "mr", "mrs",
    "ms", "prof", "fig", "no", "approx", "ca", "al", "st",
};

bool is_abbreviation(std::string_view token) {
  std::string folded = casefold(token);
  return std::find(kAbbreviations.begin(), kAbbreviations.end(), folded) !=
         kAbbreviations.end();
}

const std::set<std::string, std::less<>>& stopwords() {
  static const std::set<std::string, std::less<>> words = {
      "a",    "an",   "and",  "are",  "as",    "at",   "be",    "been",
      "but",  "by",   "for",  "from", "had",   "has",  "have",  "in",
      "is",   "it",   "its",  "of",   "on",    "or",   "that",  "the",
      "their", "there", "this", "to",  "was",   "were", "which", "with",
  };
  return words;
}

}  // namespace

std::string casefold(std::string_view s) {
  std::string out;
  out.reserve(s.size());
  for (unsigned char c : s) {
    out.push_back(c < 0x80 ? static_cast<char>(std::tolower(c))
                           : static_cast<char>(c));
  }
  return out;
}

std::vector<std::string> tokenize(std::string_view s) {
  std::vector<std::string> tokens;
  std::string current;
  for (unsigned char c : s) {
    if (is_word_char(c)) {
      current.push_back(c < 0x80 ? static_cast<char>(std::tolower(c))
                                 : static_cast<char>(c));
    } else if (!current.empty()) {
      tokens.push_back(std::move(current));
      current.clear();
    }
  }
  if (!current.empty()) tokens.push_back(std::move(current));
  return tokens;
}

std::vector<WordSpan> word_spans(std::string_view s) {
  std::vector<WordSpan> spans;
  std::size_t i = 0;
  while (i < s.size()) {
    while (i < s.size() && std::isspace(static_cast<unsigned char>(s[i]))) ++i;
    if (i >= s.size()) break;
    std::size_t begin = i;
    while (i < s.size() && !std::isspace(static_cast<unsigned char>(s[i]))) ++i;
    spans.push_back({begin, i});
  }
  return spans;
}

bool is_stopword(std::string_view token) {
  return stopwords().count(token) > 0;
}

std::vector<std::string> content_words(std::string_view s) {
  std::vector<std::string> out;
  for (auto& tok : tokenize(s)) {
    if (tok.size() < 2 || is_stopword(tok)) continue;
    out.push_back(std::move(tok));
  }
  return out;
}

std::vector<std::string> split_sentences(std::string_view s) {
  std::vector<std::string> sentences;
  std::size_t start = 0;
  std::size_t i = 0;
  auto flush = [&](std::size_t end) {
    std::string sentence = trim(s.substr(start, end - start));
    if (!sentence.empty()) sentences.push_back(std::move(sentence));
    start = end;
  };
  while (i < s.size()) {
    char c = s[i];
    if (c == '\n') {
      // A line break without a terminator drops the pending text: headings
      // and list stubs are exempt from sentence accounting.
      start = i + 1;
      ++i;
      continue;
    }
    if (c == '?' || c == '!') {
      flush(i + 1);
      ++i;
      continue;
    }
    if (c == '.') {
      // Decimal point: digit on both sides.
      bool digit_before = i > 0 && std::isdigit(static_cast<unsigned char>(s[i - 1]));
      bool digit_after =
          i + 1 < s.size() && std::isdigit(static_cast<unsigned char>(s[i + 1]));
      if (digit_before && digit_after) {
        ++i;
        continue;
      }
      // Abbreviation: token immediately before the period.
      std::size_t tok_end = i;
      std::size_t tok_begin = tok_end;
      while (tok_begin > start &&
             (is_word_char(static_cast<unsigned char>(s[tok_begin - 1])) ||
              s[tok_begin - 1] == '.')) {
        --tok_begin;
      }
      std::string_view token = s.substr(tok_begin, tok_end - tok_begin);
      // Strip interior periods so "e.g" matches at the second dot of "e.g.".
      std::string compact;
      for (char tc : token)
        if (tc != '.') compact.push_back(tc);
      if (!compact.empty() && is_abbreviation(compact)) {
        ++i;
        continue;
      }
      bool at_end = i + 1 >= s.size();
      bool boundary =
          at_end || std::isspace(static_cast<unsigned char>(s[i + 1]));
      if (boundary) {
        flush(i + 1);
        ++i;
        continue;
      }
    }
    ++i;
  }
  // Trailing unterminated text is not a sentence.
  return sentences;
}

bool is_declarative(std::string_view sentence) {
  std::string t = trim(sentence);
  return !t.empty() && t.back() == '.';
}

std::set<int> citation_markers(std::string_view s) {
  std::set<int> markers;
  std::size_t i = 0;
  while (i < s.size()) {
    if (s[i] == '[') {
      std::size_t j = i + 1;
      while (j < s.size() && std::isdigit(static_cast<unsigned char>(s[j]))) ++j;
      if (j > i + 1 && j < s.size() && s[j] == ']') {
        markers.insert(std::stoi(std::string(s.substr(i + 1, j - i - 1))));
        i = j + 1;
        continue;
      }
    }
    ++i;
  }
  return markers;
}

std::uint64_t fnv1a64(std::string_view s) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : s) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

std::string digest_hex(std::string_view s) {
  static const char* hex = "0123456789abcdef";
  std::uint64_t h = fnv1a64(s);
  std::string out(16, '0');
  for (int i = 15; i >= 0; --i) {
    out[static_cast<std::size_t>(i)] = hex[h & 0xF];
    h >>= 4;
  }
  return out;
}

std::string trim(std::string_view s) {
  std::size_t b = 0;
  std::size_t e = s.size();
  while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
  while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
  return std::string(s.substr(b, e - b));
}

}  // namespace adaptqa::text
