#pragma once

// File formats shared by the CLI and the tests: the JSON graph spec
// {"n": int, "edges": [[i, j, w], ...]}, CSV tables with headers, metadata
// sidecars (<output>.meta.json), and small parsing helpers for inline
// vectors.

#include "mvig/graph.hpp"

#include <json.hpp>

#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

namespace mvig {

inline Network network_from_json(const nlohmann::json& doc) {
    if (!doc.contains("n") || !doc.contains("edges"))
        throw std::invalid_argument(
            "graph spec: need {\"n\": int, \"edges\": [[i, j, w], ...]}");
    const int n = doc.at("n").get<int>();
    std::vector<Edge> edges;
    for (const auto& item : doc.at("edges")) {
        if (!item.is_array() || item.size() != 3)
            throw std::invalid_argument(
                "graph spec: each edge must be [i, j, w]");
        edges.push_back({item.at(0).get<int>(), item.at(1).get<int>(),
                         item.at(2).get<double>()});
    }
    return Network(n, std::move(edges));
}

inline Network load_network(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::invalid_argument("cannot open graph file: " + path);
    nlohmann::json doc;
    in >> doc;
    return network_from_json(doc);
}

// "1,2.5,3" -> {1.0, 2.5, 3.0}
inline std::vector<double> parse_double_list(const std::string& text) {
    std::vector<double> out;
    std::stringstream ss(text);
    std::string tok;
    while (std::getline(ss, tok, ',')) {
        if (tok.empty())
            throw std::invalid_argument("empty entry in list: " + text);
        std::size_t used = 0;
        out.push_back(std::stod(tok, &used));
        if (used != tok.size())
            throw std::invalid_argument("bad number in list: " + tok);
    }
    if (out.empty()) throw std::invalid_argument("empty list: " + text);
    return out;
}

inline std::vector<int> parse_int_list(const std::string& text) {
    std::vector<int> out;
    std::stringstream ss(text);
    std::string tok;
    while (std::getline(ss, tok, ',')) {
        std::size_t used = 0;
        out.push_back(std::stoi(tok, &used));
        if (used != tok.size())
            throw std::invalid_argument("bad integer in list: " + tok);
    }
    if (out.empty()) throw std::invalid_argument("empty list: " + text);
    return out;
}

// Shortest decimal form that round-trips a double; locale-independent.
inline std::string format_double(double v) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

// Streaming CSV writer with a fixed header.
class CsvWriter {
  public:
    CsvWriter(const std::string& path, const std::vector<std::string>& header)
        : out_(path) {
        if (!out_)
            throw std::invalid_argument("cannot open output file: " + path);
        for (std::size_t i = 0; i < header.size(); ++i) {
            if (i) out_ << ',';
            out_ << header[i];
        }
        out_ << '\n';
        columns_ = header.size();
    }

    void row(const std::vector<double>& values) {
        if (values.size() != columns_)
            throw std::invalid_argument("CsvWriter: row width mismatch");
        for (std::size_t i = 0; i < values.size(); ++i) {
            if (i) out_ << ',';
            out_ << format_double(values[i]);
        }
        out_ << '\n';
    }

    void raw_row(const std::string& line) { out_ << line << '\n'; }

  private:
    std::ofstream out_;
    std::size_t columns_ = 0;
};

// Sidecar path <output>.meta.json recording seed, ordering and parameters.
inline void write_metadata_sidecar(const std::string& output_path,
                                   const nlohmann::json& meta) {
    std::ofstream out(output_path + ".meta.json");
    if (!out)
        throw std::invalid_argument("cannot open sidecar for: " + output_path);
    out << meta.dump(2) << '\n';
}

// Default output directory: $MVIG_OUTPUT_DIR if set, else the working dir.
inline std::string default_output_dir() {
    const char* env = std::getenv("MVIG_OUTPUT_DIR");
    return (env && *env) ? env : ".";
}

inline std::string resolve_output_path(const std::string& requested,
                                       const std::string& fallback_name) {
    if (!requested.empty()) return requested;
    std::string dir = default_output_dir();
    if (!dir.empty() && dir.back() != '/') dir += '/';
    return dir + fallback_name;
}

} // namespace mvig
