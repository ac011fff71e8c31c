#pragma once

#include <filesystem>

#include <json.hpp>

#include "lensless/forward_model.hpp"

namespace lensless {

/// Single-file acquisition record:
///   8-byte magic "LLACQREC", uint32 version, uint64 header length,
///   UTF-8 JSON header (configuration + array table), then the arrays listed
///   in the header, back to back, little-endian.
/// `provenance` is stored verbatim in the header under "provenance".
void save_record(const std::filesystem::path& path, const AcquisitionRecord& record,
                 const nlohmann::json& provenance = nlohmann::json::object());

struct LoadedRecord {
  AcquisitionRecord record;
  nlohmann::json provenance;
};

LoadedRecord load_record(const std::filesystem::path& path);

}  // namespace lensless
