#pragma once

#include <filesystem>
#include <iosfwd>
#include <map>
#include <string>

#include "gs4d/constellation.hpp"
#include "gs4d/link.hpp"

namespace gs4d {

/// Free-form string metadata carried next to a constellation (name, es, source, ...).
using Metadata = std::map<std::string, std::string>;

struct ConstellationFile {
    LabeledConstellation constellation;
    Metadata metadata;
};

/// JSON object {m, points, labels, metadata}; points use 17 significant digits.
std::string constellation_to_json(const LabeledConstellation& c, const Metadata& metadata = {});
void write_constellation(const std::filesystem::path& path, const LabeledConstellation& c,
                         const Metadata& metadata = {});

/// Validation error on malformed content (including m inconsistent with the
/// row count); io error when the file cannot be read.
ConstellationFile constellation_from_json(const std::string& text);
ConstellationFile read_constellation(const std::filesystem::path& path);

/// Link config with the LinkSpec field names; missing fields keep their defaults.
LinkSpec link_from_json(const std::string& text);
LinkSpec read_link(const std::filesystem::path& path);
std::string link_to_json(const LinkSpec& link);

}  // namespace gs4d
