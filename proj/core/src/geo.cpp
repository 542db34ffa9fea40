#include "adaptqa/geo.hpp"

#include <algorithm>
#include <fstream>
#include <stdexcept>

#include "adaptqa/text.hpp"

namespace adaptqa::geo {

std::string GeoTag::label() const {
  return adm1.empty() ? country : country + "/" + adm1;
}

Gazetteer Gazetteer::load(const std::filesystem::path& file) {
  std::ifstream in(file);
  if (!in) {
    throw std::runtime_error("cannot read gazetteer file: " + file.string());
  }
  Gazetteer gaz;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    std::string trimmed = text::trim(line);
    if (trimmed.empty() || trimmed[0] == '#') continue;
    auto tab = trimmed.find('\t');
    if (tab == std::string::npos) {
      throw std::runtime_error("gazetteer line " + std::to_string(lineno) +
                               ": expected surface<TAB>Country/Adm1");
    }
    std::string surface = text::trim(trimmed.substr(0, tab));
    std::string target = text::trim(trimmed.substr(tab + 1));
    if (surface.empty() || target.empty()) {
      throw std::runtime_error("gazetteer line " + std::to_string(lineno) +
                               ": empty surface or target");
    }
    GeoTag tag;
    auto slash = target.find('/');
    if (slash == std::string::npos) {
      tag.country = target;
    } else {
      tag.country = text::trim(target.substr(0, slash));
      tag.adm1 = text::trim(target.substr(slash + 1));
    }
    if (tag.country.empty()) {
      throw std::runtime_error("gazetteer line " + std::to_string(lineno) +
                               ": missing country");
    }
    gaz.add_entry(std::move(surface), std::move(tag));
  }
  gaz.add_canonical_self_entries();
  return gaz;
}

Gazetteer Gazetteer::from_entries(
    const std::vector<std::pair<std::string, GeoTag>>& entries) {
  Gazetteer gaz;
  for (const auto& [surface, tag] : entries) gaz.add_entry(surface, tag);
  gaz.add_canonical_self_entries();
  return gaz;
}

void Gazetteer::add_entry(std::string surface, GeoTag tag) {
  std::string key = text::casefold(surface);
  auto tokens = text::tokenize(key);
  if (tokens.empty()) return;
  max_entry_tokens_ = std::max(max_entry_tokens_, tokens.size());
  // First explicit entry for a surface wins.
  entries_.emplace(std::move(key), tag);
  token_entries_.emplace(std::move(tokens), std::move(tag));
}

void Gazetteer::add_canonical_self_entries() {
  std::vector<std::pair<std::string, GeoTag>> extra;
  for (const auto& [surface, tag] : entries_) {
    (void)surface;
    if (!tag.adm1.empty()) extra.emplace_back(tag.adm1, tag);
    extra.emplace_back(tag.country, GeoTag{tag.country, ""});
    extra.emplace_back(tag.label(), tag);
  }
  for (auto& [surface, tag] : extra) {
    std::string key = text::casefold(surface);
    if (entries_.count(key)) continue;
    add_entry(std::move(surface), std::move(tag));
  }
}

std::optional<GeoTag> Gazetteer::lookup(std::string_view surface) const {
  auto it = entries_.find(text::casefold(text::trim(surface)));
  if (it == entries_.end()) return std::nullopt;
  return it->second;
}

std::optional<std::pair<GeoTag, std::size_t>> Gazetteer::longest_match(
    const std::vector<std::string>& tokens, std::size_t pos) const {
  std::size_t longest = std::min(max_entry_tokens_, tokens.size() - pos);
  for (std::size_t len = longest; len >= 1; --len) {
    std::vector<std::string> candidate(tokens.begin() + static_cast<long>(pos),
                                       tokens.begin() + static_cast<long>(pos + len));
    auto it = token_entries_.find(candidate);
    if (it != token_entries_.end()) return std::make_pair(it->second, len);
  }
  return std::nullopt;
}

std::vector<GeoTag> normalize_geo(const std::vector<std::string>& raw,
                                  const Gazetteer& gaz,
                                  std::vector<std::string>* unrecognized) {
  std::vector<GeoTag> tags;
  for (const auto& surface : raw) {
    auto tag = gaz.lookup(surface);
    if (!tag) {
      if (unrecognized) unrecognized->push_back(surface);
      continue;
    }
    if (std::find(tags.begin(), tags.end(), *tag) == tags.end()) {
      tags.push_back(std::move(*tag));
    }
  }
  return tags;
}

std::vector<GeoTag> extract_query_locations(std::string_view question,
                                            const Gazetteer& gaz) {
  auto tokens = text::tokenize(question);
  std::vector<GeoTag> tags;
  std::size_t pos = 0;
  while (pos < tokens.size()) {
    auto match = gaz.longest_match(tokens, pos);
    if (!match) {
      ++pos;
      continue;
    }
    if (std::find(tags.begin(), tags.end(), match->first) == tags.end()) {
      tags.push_back(match->first);
    }
    pos += match->second;
  }
  // Country absorbed by any adm1 tag of the same country.
  std::vector<GeoTag> result;
  for (const auto& tag : tags) {
    if (tag.adm1.empty()) {
      bool absorbed = std::any_of(tags.begin(), tags.end(), [&](const GeoTag& t) {
        return !t.adm1.empty() && t.country == tag.country;
      });
      if (absorbed) continue;
    }
    result.push_back(tag);
  }
  return result;
}

std::optional<GeoTag> parse_geo_label(std::string_view label, const Gazetteer* gaz) {
  std::string trimmed = text::trim(label);
  if (trimmed.empty()) return std::nullopt;
  if (gaz) {
    if (auto tag = gaz->lookup(trimmed)) return tag;
  }
  GeoTag tag;
  auto slash = trimmed.find('/');
  if (slash == std::string::npos) {
    tag.country = trimmed;
  } else {
    tag.country = text::trim(trimmed.substr(0, slash));
    tag.adm1 = text::trim(trimmed.substr(slash + 1));
  }
  if (tag.country.empty()) return std::nullopt;
  return tag;
}

}  // namespace adaptqa::geo
