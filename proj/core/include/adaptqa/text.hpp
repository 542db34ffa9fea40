#pragma once

#include <cstddef>
#include <cstdint>
#include <set>
#include <string>
#include <string_view>
#include <vector>

namespace adaptqa::text {

/// ASCII lowercase; bytes outside ASCII pass through unchanged, so accented
/// forms must be listed explicitly wherever case-insensitive lookup matters.
std::string casefold(std::string_view s);

/// Casefolded alphanumeric runs. Non-ASCII bytes count as word characters.
std::vector<std::string> tokenize(std::string_view s);

struct WordSpan {
  std::size_t begin = 0;  // byte offset of first char
  std::size_t end = 0;    // one past last char
};

/// Whitespace-delimited words with their byte offsets into `s`.
std::vector<WordSpan> word_spans(std::string_view s);

bool is_stopword(std::string_view token);

/// tokenize() minus stopwords and single-character tokens.
std::vector<std::string> content_words(std::string_view s);

/// Rule-based sentence splitter. Segments end at . ? or ! followed by
/// whitespace or end of line; a known abbreviation ("e.g.", "Fig.", ...)
/// or a decimal point does not end a segment. Text without a terminator
/// (headings, list stubs) is not a sentence.
std::vector<std::string> split_sentences(std::string_view s);

/// A sentence is declarative when it ends with '.'; questions and
/// exclamations (the imperative exemption) are not.
bool is_declarative(std::string_view sentence);

/// Inline citation markers "[n]", multi-digit allowed.
std::set<int> citation_markers(std::string_view s);

std::uint64_t fnv1a64(std::string_view s);

/// fnv1a64 rendered as 16 hex chars; used for audit-log prompt digests.
std::string digest_hex(std::string_view s);

std::string trim(std::string_view s);

}  // namespace adaptqa::text
