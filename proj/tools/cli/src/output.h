// Copyright 2026 The rbcorr Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.


#ifndef RBCORR_TOOLS_OUTPUT_H
#define RBCORR_TOOLS_OUTPUT_H

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "config_io.h"

namespace rbcorr::cli {

inline constexpr const char* kToolName = "rbcorr";
inline constexpr const char* kToolVersion = "0.1.0";

/// %.17g, enough digits to round-trip any double.
std::string format_double(double v);

/// 64-bit FNV-1a, as 16 lowercase hex digits.
std::string fnv1a_hex(const std::string& bytes);

/// Digest of the canonical (sorted-key, compact) dump of the config.
/// Worker counts never affect results, so "threads" is excluded.
std::string config_digest(const Json& config);

struct Provenance {
    std::string command;
    std::uint64_t seed = 0;
    std::string config_digest;
    /// Extra "key=value" lines written after the standard ones.
    std::vector<std::pair<std::string, std::string>> extra;
};

/// Comma-separated table with '#' provenance lines and a one-line header.
class CsvTable {
  public:
    explicit CsvTable(std::vector<std::string> header) : header_(std::move(header)) {}
    void add_row(std::vector<std::string> cells);
    std::string render(const Provenance& prov) const;

  private:
    std::vector<std::string> header_;
    std::vector<std::vector<std::string>> rows_;
};

void write_file(const std::string& path, const std::string& contents);

/// Header fields shared by every JSON report and manifest.
Json provenance_json(const Provenance& prov);

/// (path, contents) of one produced file.
using OutputFile = std::pair<std::string, std::string>;

/// Writes every output, then <out>.manifest.json listing them with digests.
void write_outputs(const std::string& out, const Provenance& prov, const Json& config,
                   const std::vector<OutputFile>& outputs);

/// Parsed ASF data file: '#' lines are skipped, the header must name m and mean.
ASFCurve read_curve_csv(const std::string& text, const std::string& where);

}  // namespace rbcorr::cli

#endif  // RBCORR_TOOLS_OUTPUT_H
