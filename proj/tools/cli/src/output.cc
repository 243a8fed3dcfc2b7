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


#include "output.h"

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>

namespace rbcorr::cli {

std::string format_double(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

std::string fnv1a_hex(const std::string& bytes) {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char c : bytes) {
        h ^= c;
        h *= 0x100000001b3ULL;
    }
    char buf[17];
    std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(h));
    return buf;
}

std::string config_digest(const Json& config) {
    Json copy = config;
    if (copy.is_object()) copy.erase("threads");
    return fnv1a_hex(copy.dump());
}

void CsvTable::add_row(std::vector<std::string> cells) {
    if (cells.size() != header_.size()) throw std::logic_error("csv row width differs from header");
    rows_.push_back(std::move(cells));
}

namespace {

void append_joined(std::string& out, const std::vector<std::string>& cells) {
    for (std::size_t i = 0; i < cells.size(); ++i) {
        if (i) out += ',';
        out += cells[i];
    }
    out += '\n';
}

}  // namespace

std::string CsvTable::render(const Provenance& prov) const {
    std::string out;
    out += std::string("# tool=") + kToolName + " version=" + kToolVersion + " command=" + prov.command + "\n";
    out += "# seed=" + std::to_string(prov.seed) + "\n";
    out += "# config_digest=" + prov.config_digest + "\n";
    for (const auto& [k, v] : prov.extra) out += "# " + k + "=" + v + "\n";
    append_joined(out, header_);
    for (const auto& row : rows_) append_joined(out, row);
    return out;
}

void write_file(const std::string& path, const std::string& contents) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw IoError("cannot open '" + path + "' for writing");
    out << contents;
    out.flush();
    if (!out) throw IoError("failed writing '" + path + "'");
}

Json provenance_json(const Provenance& prov) {
    Json j;
    j["tool"] = kToolName;
    j["version"] = kToolVersion;
    j["command"] = prov.command;
    j["seed"] = prov.seed;
    j["config_digest"] = prov.config_digest;
    for (const auto& [k, v] : prov.extra) j[k] = v;
    return j;
}

void write_outputs(const std::string& out, const Provenance& prov, const Json& config,
                   const std::vector<OutputFile>& outputs) {
    Json manifest = provenance_json(prov);
    Json config_copy = config;
    if (config_copy.is_object()) config_copy.erase("threads");
    manifest["config"] = config_copy;
    Json files = Json::array();
    for (const auto& [path, contents] : outputs) {
        write_file(path, contents);
        files.push_back({{"file", std::filesystem::path(path).filename().string()},
                         {"bytes", contents.size()},
                         {"digest", fnv1a_hex(contents)}});
    }
    manifest["outputs"] = files;
    write_file(out + ".manifest.json", manifest.dump(2) + "\n");
}

namespace {

std::vector<std::string> split_commas(const std::string& line) {
    std::vector<std::string> cells;
    std::string cell;
    std::istringstream ss(line);
    while (std::getline(ss, cell, ',')) {
        while (!cell.empty() && (cell.back() == '\r' || cell.back() == ' ')) cell.pop_back();
        while (!cell.empty() && cell.front() == ' ') cell.erase(cell.begin());
        cells.push_back(cell);
    }
    return cells;
}

double parse_number(const std::string& cell, const std::string& where) {
    std::size_t used = 0;
    double v = 0.0;
    try {
        v = std::stod(cell, &used);
    } catch (const std::exception&) {
        throw ConfigError(where + ": '" + cell + "' is not a number");
    }
    if (used != cell.size()) throw ConfigError(where + ": '" + cell + "' is not a number");
    return v;
}

}  // namespace

ASFCurve read_curve_csv(const std::string& text, const std::string& where) {
    std::istringstream in(text);
    std::string line;
    std::vector<std::string> header;
    int col_m = -1, col_mean = -1, col_se = -1, col_k = -1, col_shots = -1;
    ASFCurve curve;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty() || line[0] == '#') continue;
        const auto cells = split_commas(line);
        const std::string at = where + ":" + std::to_string(line_no);
        if (header.empty()) {
            header = cells;
            for (std::size_t i = 0; i < cells.size(); ++i) {
                const int c = static_cast<int>(i);
                if (cells[i] == "m") col_m = c;
                else if (cells[i] == "mean") col_mean = c;
                else if (cells[i] == "stderr") col_se = c;
                else if (cells[i] == "k") col_k = c;
                else if (cells[i] == "shots") col_shots = c;
            }
            if (col_m < 0 || col_mean < 0) throw ConfigError(at + ": header must contain 'm' and 'mean'");
            continue;
        }
        if (cells.size() != header.size()) throw ConfigError(at + ": row width differs from header");
        CurvePoint p;
        const double m = parse_number(cells[static_cast<std::size_t>(col_m)], at);
        if (m < 0 || m != static_cast<double>(static_cast<std::size_t>(m))) {
            throw ConfigError(at + ": length must be a non-negative integer");
        }
        p.m = static_cast<std::size_t>(m);
        p.mean = parse_number(cells[static_cast<std::size_t>(col_mean)], at);
        if (col_se >= 0) p.std_error = parse_number(cells[static_cast<std::size_t>(col_se)], at);
        if (col_k >= 0) p.k = static_cast<std::size_t>(parse_number(cells[static_cast<std::size_t>(col_k)], at));
        if (col_shots >= 0) {
            p.shots = static_cast<std::size_t>(parse_number(cells[static_cast<std::size_t>(col_shots)], at));
        }
        curve.points.push_back(p);
    }
    if (header.empty()) throw ConfigError(where + ": no header row");
    return curve;
}

}  // namespace rbcorr::cli
