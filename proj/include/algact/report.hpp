#pragma once

#include <complex>
#include <cstdint>
#include <string>

#include "json.hpp"

#include "algact/groupring.hpp"

namespace algact {

using Json = nlohmann::ordered_json;

inline constexpr const char* kToolVersion = "0.1.0";

// Serialization with keys in insertion order and floats printed with 17
// significant digits; non-finite floats become null.
std::string dump_json(const Json& value, int indent = 2);

// Every array-of-objects under report["tables"] as a CSV block headed by
// "# <table name>". Nested arrays are joined with ';'.
std::string dump_csv(const Json& report);

// {tool, version, command, seed, config}; the caller appends results.
Json report_envelope(const std::string& command, std::uint64_t seed, const Json& config);

Json complex_json(std::complex<double> z);
Json vector_json(const VectorOverG& v);

// Writes to `path`, or to standard output when path is "-".
void write_text(const std::string& path, const std::string& text);

}  // namespace algact
