#pragma once

#include <compare>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace adaptqa::geo {

/// Normalized location: country plus optional first-level subdivision or
/// major city. Canonical strings come from the gazetteer; equality is
/// canonical-string equality.
struct GeoTag {
  std::string country;
  std::string adm1;  // empty = country-level tag

  bool operator==(const GeoTag&) const = default;
  auto operator<=>(const GeoTag&) const = default;

  /// "Country/Adm1", or "Country" for a country-level tag.
  std::string label() const;

  /// The name a human would use for the place: adm1 when present,
  /// otherwise the country.
  const std::string& place_name() const { return adm1.empty() ? country : adm1; }
};

/// Surface-form dictionary mapping casefolded strings to canonical tags.
/// Canonical names map to themselves, so normalization is idempotent.
class Gazetteer {
 public:
  Gazetteer() = default;

  /// Lines of `surface<TAB>Country/Adm1` (Adm1 optional). '#' comments
  /// and blank lines are skipped. Throws std::runtime_error when the
  /// file cannot be read.
  static Gazetteer load(const std::filesystem::path& file);

  static Gazetteer from_entries(
      const std::vector<std::pair<std::string, GeoTag>>& entries);

  /// Casefolds the surface form; no match returns nullopt.
  std::optional<GeoTag> lookup(std::string_view surface) const;

  std::size_t size() const { return entries_.size(); }

  /// Longest token-sequence match starting at `pos` in `tokens`.
  /// Returns the tag and the number of tokens consumed.
  std::optional<std::pair<GeoTag, std::size_t>> longest_match(
      const std::vector<std::string>& tokens, std::size_t pos) const;

 private:
  void add_entry(std::string surface, GeoTag tag);
  void add_canonical_self_entries();

  std::map<std::string, GeoTag, std::less<>> entries_;
  std::map<std::vector<std::string>, GeoTag> token_entries_;
  std::size_t max_entry_tokens_ = 0;
};

/// Map raw surface strings to canonical tags. Duplicates collapse to the
/// first occurrence; unrecognized forms are dropped and, when `unrecognized`
/// is non-null, reported there.
std::vector<GeoTag> normalize_geo(const std::vector<std::string>& raw,
                                  const Gazetteer& gaz,
                                  std::vector<std::string>* unrecognized = nullptr);

/// All gazetteer hits in the question found by longest-match scanning,
/// deduplicated. A country-level tag is absorbed by any adm1 tag of the
/// same country ("New South Wales, Australia" yields one tag).
std::vector<GeoTag> extract_query_locations(std::string_view question,
                                            const Gazetteer& gaz);

/// Parse a corpus metadata label "Country/Adm1" (Adm1 optional). Supplied
/// metadata is trusted: when the gazetteer knows the label its canonical
/// tag wins, otherwise the label's own parts become the canonical form.
std::optional<GeoTag> parse_geo_label(std::string_view label,
                                      const Gazetteer* gaz = nullptr);

}  // namespace adaptqa::geo
