#include "algact/report.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>

#include "algact/ring_expr.hpp"

namespace algact {

namespace {

std::string format_double(double v) {
  if (!std::isfinite(v)) return "null";
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  std::string s(buf);
  if (s.find_first_of(".eEn") == std::string::npos) s += ".0";
  return s;
}

std::string quote(const std::string& s) { return Json(s).dump(); }

void emit(const Json& v, int indent, int depth, std::string& out) {
  const std::string pad = indent > 0 ? std::string(static_cast<std::size_t>(indent * (depth + 1)), ' ') : "";
  const std::string close_pad = indent > 0 ? std::string(static_cast<std::size_t>(indent * depth), ' ') : "";
  const char* nl = indent > 0 ? "\n" : "";
  switch (v.type()) {
    case Json::value_t::object: {
      if (v.empty()) {
        out += "{}";
        return;
      }
      out += "{";
      out += nl;
      bool first = true;
      for (auto it = v.begin(); it != v.end(); ++it) {
        if (!first) {
          out += ",";
          out += nl;
        }
        first = false;
        out += pad + quote(it.key()) + (indent > 0 ? ": " : ":");
        emit(it.value(), indent, depth + 1, out);
      }
      out += nl + close_pad + "}";
      return;
    }
    case Json::value_t::array: {
      if (v.empty()) {
        out += "[]";
        return;
      }
      out += "[";
      out += nl;
      bool first = true;
      for (const auto& e : v) {
        if (!first) {
          out += ",";
          out += nl;
        }
        first = false;
        out += pad;
        emit(e, indent, depth + 1, out);
      }
      out += nl + close_pad + "]";
      return;
    }
    case Json::value_t::number_float:
      out += format_double(v.get<double>());
      return;
    default:
      out += v.dump();
      return;
  }
}

std::string csv_cell(const Json& v) {
  switch (v.type()) {
    case Json::value_t::number_float:
      return format_double(v.get<double>()) == "null" ? "" : format_double(v.get<double>());
    case Json::value_t::string: {
      const std::string s = v.get<std::string>();
      if (s.find_first_of(",\"\n") == std::string::npos) return s;
      std::string q = "\"";
      for (char c : s) q += c == '"' ? std::string("\"\"") : std::string(1, c);
      return q + "\"";
    }
    case Json::value_t::array: {
      std::string s;
      for (const auto& e : v) s += (s.empty() ? "" : ";") + csv_cell(e);
      return s;
    }
    case Json::value_t::null:
      return "";
    default:
      return v.dump();
  }
}

}  // namespace

std::string dump_json(const Json& value, int indent) {
  std::string out;
  emit(value, indent, 0, out);
  out += "\n";
  return out;
}

std::string dump_csv(const Json& report) {
  std::string out;
  if (!report.contains("tables")) return out;
  for (auto it = report["tables"].begin(); it != report["tables"].end(); ++it) {
    const Json& rows = it.value();
    if (!rows.is_array() || rows.empty() || !rows.front().is_object()) continue;
    out += "# " + it.key() + "\n";
    std::vector<std::string> cols;
    for (auto c = rows.front().begin(); c != rows.front().end(); ++c) cols.push_back(c.key());
    for (std::size_t i = 0; i < cols.size(); ++i) out += (i ? "," : "") + cols[i];
    out += "\n";
    for (const auto& row : rows) {
      for (std::size_t i = 0; i < cols.size(); ++i)
        out += (i ? "," : "") + (row.contains(cols[i]) ? csv_cell(row[cols[i]]) : std::string());
      out += "\n";
    }
  }
  return out;
}

Json report_envelope(const std::string& command, std::uint64_t seed, const Json& config) {
  Json r;
  r["tool"] = "algact";
  r["version"] = kToolVersion;
  r["command"] = command;
  r["seed"] = seed;
  r["config"] = config;
  return r;
}

Json complex_json(std::complex<double> z) { return Json::array({z.real(), z.imag()}); }

Json vector_json(const VectorOverG& v) {
  Json out = Json::array();
  for (int l = 0; l < v.components(); ++l) out.push_back(format_ring_expr(v[l]));
  return out;
}

void write_text(const std::string& path, const std::string& text) {
  if (path == "-") {
    std::cout << text;
    std::cout.flush();
    return;
  }
  std::ofstream f(path, std::ios::binary);
  if (!f) throw DomainError("cannot open " + path + " for writing");
  f << text;
}

}  // namespace algact
