// Copyright 2026 The fxcr Authors
// SPDX-License-Identifier: Apache-2.0

#include "fxcr/io.hpp"

#include <cinttypes>
#include <cmath>
#include <cstdio>
#include <iostream>
#include <mutex>
#include <sstream>

namespace fxcr {

namespace {
std::mutex sink_mutex;
WarningSink& sink() {
    static WarningSink s = [](const std::string& m) { std::cerr << "warning: " << m << '\n'; };
    return s;
}
}  // namespace

void set_warning_sink(WarningSink s) {
    std::lock_guard<std::mutex> lock(sink_mutex);
    sink() = std::move(s);
}

void warn(const std::string& message) {
    std::lock_guard<std::mutex> lock(sink_mutex);
    if (sink()) sink()(message);
}

std::string fmt_num(double v) {
    if (v == 0.0) return "0";  // folds -0
    if (!std::isfinite(v)) return std::isnan(v) ? "nan" : (v > 0 ? "inf" : "-inf");
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.12g", v);
    return buf;
}

CsvWriter::CsvWriter(const std::string& path) : out_(path) {
    if (!out_) throw Error("cannot open " + path + " for writing");
}

void CsvWriter::header(const std::vector<std::string>& cols) { row_text(cols); }

void CsvWriter::row(const std::vector<double>& values) {
    for (size_t i = 0; i < values.size(); ++i) out_ << (i ? "," : "") << fmt_num(values[i]);
    out_ << '\n';
}

void CsvWriter::row_text(const std::vector<std::string>& values) {
    for (size_t i = 0; i < values.size(); ++i) out_ << (i ? "," : "") << values[i];
    out_ << '\n';
}

std::vector<std::vector<std::string>> read_csv(const std::string& path, bool skip_header) {
    std::ifstream in(path);
    if (!in) throw Error("cannot open " + path);
    std::vector<std::vector<std::string>> rows;
    std::string line;
    bool first = true;
    while (std::getline(in, line)) {
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        if (first && skip_header) {
            first = false;
            continue;
        }
        first = false;
        std::vector<std::string> cells;
        std::stringstream ss(line);
        std::string cell;
        while (std::getline(ss, cell, ',')) cells.push_back(cell);
        rows.push_back(std::move(cells));
    }
    return rows;
}

std::string fnv1a_hex(const std::string& data) {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char c : data) {
        h ^= c;
        h *= 0x100000001b3ULL;
    }
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016" PRIx64, h);
    return buf;
}

}  // namespace fxcr
