#include "ceramdw/model.hpp"

#include <algorithm>
#include <cctype>
#include <sstream>

namespace ceramdw {
namespace {

bool iequals(std::string_view a, std::string_view b) {
  return a.size() == b.size() &&
         std::equal(a.begin(), a.end(), b.begin(), [](char x, char y) {
           return std::tolower(static_cast<unsigned char>(x)) ==
                  std::tolower(static_cast<unsigned char>(y));
         });
}

template <typename Enum, std::size_t N>
std::optional<Enum> parse_enum(std::string_view s, const Enum (&values)[N]) {
  for (Enum v : values) {
    if (iequals(s, to_string(v))) return v;
  }
  return std::nullopt;
}

constexpr GroupBasis kAllBases[] = {GroupBasis::chemical, GroupBasis::petrographic,
                                    GroupBasis::other};
constexpr MediaKind kAllMediaKinds[] = {MediaKind::drawing, MediaKind::photo,
                                        MediaKind::petrographic_image,
                                        MediaKind::binocular_image, MediaKind::other};

}  // namespace

std::string_view to_string(Technique t) {
  switch (t) {
    case Technique::chemistry: return "CHEMISTRY";
    case Technique::petro: return "PETRO";
    case Technique::bino: return "BINO";
    case Technique::sem: return "SEM";
    case Technique::diffraction: return "DIFFRACTION";
    case Technique::dilato: return "DILATO";
    case Technique::other: return "OTHER";
  }
  return "OTHER";
}

std::string_view to_string(Unit u) {
  switch (u) {
    case Unit::wt_percent: return "wt_percent";
    case Unit::ppm: return "ppm";
    case Unit::dimensionless: return "dimensionless";
  }
  return "dimensionless";
}

std::string_view to_string(GroupBasis b) {
  switch (b) {
    case GroupBasis::chemical: return "chemical";
    case GroupBasis::petrographic: return "petrographic";
    case GroupBasis::other: return "other";
  }
  return "other";
}

std::string_view to_string(MediaKind k) {
  switch (k) {
    case MediaKind::drawing: return "drawing";
    case MediaKind::photo: return "photo";
    case MediaKind::petrographic_image: return "petrographic_image";
    case MediaKind::binocular_image: return "binocular_image";
    case MediaKind::other: return "other";
  }
  return "other";
}

std::string_view to_string(LocationLevel l) {
  switch (l) {
    case LocationLevel::site: return "site";
    case LocationLevel::town: return "town";
    case LocationLevel::region: return "region";
    case LocationLevel::country: return "country";
  }
  return "site";
}

std::optional<Technique> parse_technique(std::string_view s) { return parse_enum(s, kAllTechniques); }
std::optional<Unit> parse_unit(std::string_view s) { return parse_enum(s, kAllUnits); }
std::optional<GroupBasis> parse_group_basis(std::string_view s) { return parse_enum(s, kAllBases); }
std::optional<MediaKind> parse_media_kind(std::string_view s) { return parse_enum(s, kAllMediaKinds); }
std::optional<LocationLevel> parse_location_level(std::string_view s) {
  return parse_enum(s, kAllLocationLevels);
}

const std::optional<std::string>& LocationRef::level(LocationLevel l) const {
  switch (l) {
    case LocationLevel::site: return site;
    case LocationLevel::town: return town;
    case LocationLevel::region: return region;
    case LocationLevel::country: return country;
  }
  return site;
}

std::optional<std::string>& LocationRef::level(LocationLevel l) {
  return const_cast<std::optional<std::string>&>(std::as_const(*this).level(l));
}

std::vector<std::string> Vocabulary::parse_list(std::string_view text) {
  std::vector<std::string> out;
  std::istringstream in{std::string(text)};
  std::string line;
  while (std::getline(in, line)) {
    while (!line.empty() && (line.back() == '\r' || line.back() == ' ' || line.back() == '\t'))
      line.pop_back();
    std::size_t start = line.find_first_not_of(" \t");
    if (start == std::string::npos || line[start] == '#') continue;
    out.push_back(line.substr(start));
  }
  return out;
}

Vocabulary Vocabulary::defaults() {
  // Keep in sync with data/vocabulary/.
  return Vocabulary{
      {"COMM.", "GLAZED", "SGRAFF.", "AMPH.", "FINE", "COOK.", "KILN"},
      {"Prehistoric", "Antiquity", "Medieval", "Modern"},
  };
}

}  // namespace ceramdw
