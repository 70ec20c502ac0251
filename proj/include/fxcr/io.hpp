// Copyright 2026 The fxcr Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <fstream>
#include <functional>
#include <string>
#include <vector>

#include "fxcr/types.hpp"

namespace fxcr {

// Non-fatal diagnostics go through a replaceable sink (stderr by default).
using WarningSink = std::function<void(const std::string&)>;
void set_warning_sink(WarningSink sink);
void warn(const std::string& message);

// Fixed-format number printing so that outputs are byte-stable.
std::string fmt_num(double v);

class CsvWriter {
public:
    explicit CsvWriter(const std::string& path);
    void header(const std::vector<std::string>& cols);
    void row(const std::vector<double>& values);
    void row_text(const std::vector<std::string>& values);

private:
    std::ofstream out_;
};

std::vector<std::vector<std::string>> read_csv(const std::string& path, bool skip_header = true);

// FNV-1a 64-bit, hex encoded.
std::string fnv1a_hex(const std::string& data);

}  // namespace fxcr
