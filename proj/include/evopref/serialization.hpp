#pragma once

#include <json.hpp>

#include <string>

#include "evopref/archive.hpp"
#include "evopref/config.hpp"
#include "evopref/genome.hpp"
#include "evopref/landscape.hpp"
#include "evopref/record.hpp"

namespace evopref {

// Genome snapshots carry a shape header plus per-layer row-major matrix
// payloads. The writer emits plain nested arrays; the reader also accepts
// base64-encoded little-endian doubles in place of any matrix.
nlohmann::json genome_to_json(const LowRankGenome& g);
LowRankGenome genome_from_json(const nlohmann::json& j);

nlohmann::json archive_to_json(const GridArchive& archive, bool inline_genomes);
nlohmann::json archive_entries_to_json(const std::vector<ArchiveEntry>& entries,
                                       bool inline_genomes);

nlohmann::json landscape_to_json(const PreferenceLandscape& landscape);

nlohmann::json run_record_to_json(const RunRecord& record,
                                  bool include_final_set);
RunRecord run_record_from_json(const nlohmann::json& j);

nlohmann::json generation_row_to_json(const GenerationRow& row);
GenerationRow generation_row_from_json(const nlohmann::json& j);

std::string base64_encode(const unsigned char* data, std::size_t len);
std::vector<unsigned char> base64_decode(const std::string& text);

}  // namespace evopref
