#pragma once

#include <fstream>
#include <sstream>
#include <stdexcept>
#include <string>

#ifndef LASERKIT_SOURCE_DIR
#error "LASERKIT_SOURCE_DIR must point at the repository root"
#endif

namespace testing {

inline std::string source_path(const std::string& rel) {
    return std::string(LASERKIT_SOURCE_DIR) + "/" + rel;
}

inline std::string fixture_path(const std::string& name) {
    return source_path("tests/fixtures/" + name);
}

inline std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot open " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

inline std::string read_fixture(const std::string& name) { return read_file(fixture_path(name)); }

/// Drops the "# ..." provenance lines from an output.
inline std::string strip_comments(const std::string& text) {
    std::istringstream in(text);
    std::string line, out;
    while (std::getline(in, line))
        if (line.empty() || line[0] != '#') out += line + "\n";
    return out;
}

}  // namespace testing
