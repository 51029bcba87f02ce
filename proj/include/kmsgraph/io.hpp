#pragma once

// Text edge-list ingestion ("source target [multiplicity]", '#' comments)
// and the JSON report document. Reports are serialized by a small
// deterministic writer: ordered keys, two-space indentation, and every
// float printed with 17 significant digits so that identical inputs give
// byte-identical documents that round-trip losslessly.

#include <cctype>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "kmsgraph/graph.hpp"
#include "kmsgraph/version.hpp"

namespace kmsgraph {

using Json = nlohmann::ordered_json;

inline Graph parse_graph(const std::string& text) {
  std::vector<EdgeSpec> edges;
  std::istringstream in(text);
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    std::istringstream tokens(line);
    std::string src, dst, mult_token, extra;
    if (!(tokens >> src)) continue;        // blank line
    if (src.front() == '#') continue;      // comment
    if (!(tokens >> dst))
      throw std::invalid_argument("malformed line " + std::to_string(lineno) +
                                  ": expected 'source target [multiplicity]'");
    std::int64_t mult = 1;
    if (tokens >> mult_token) {
      std::size_t used = 0;
      try {
        mult = std::stoll(mult_token, &used);
      } catch (const std::exception&) {
        used = 0;
      }
      if (used != mult_token.size())
        throw std::invalid_argument("malformed line " + std::to_string(lineno) +
                                    ": multiplicity is not an integer");
      if (mult < 1)
        throw std::invalid_argument("line " + std::to_string(lineno) +
                                    ": multiplicity must be >= 1");
      if (tokens >> extra)
        throw std::invalid_argument("malformed line " + std::to_string(lineno) +
                                    ": trailing tokens");
    }
    edges.push_back({src, dst, mult});
  }
  if (edges.empty()) throw std::invalid_argument("empty graph");
  return Graph::from_edges(edges);
}

inline Graph parse_graph_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::invalid_argument("cannot open graph file '" + path + "'");
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_graph(buf.str());
}

/// Canonical edge list: one "source target multiplicity" line per
/// nonzero adjacency entry, in index order. parse(serialize(g)) == g.
inline std::string serialize_graph(const Graph& g) {
  std::ostringstream out;
  for (int i = 0; i < g.size(); ++i)
    for (int j = 0; j < g.size(); ++j)
      if (g.adjacency()(i, j) > 0)
        out << g.name(i) << ' ' << g.name(j) << ' ' << g.adjacency()(i, j) << '\n';
  return out.str();
}

// ---- deterministic JSON writer ----------------------------------------------

namespace detail {

inline std::string format_double(double x) {
  if (std::isnan(x)) return "\"nan\"";
  if (std::isinf(x)) return x > 0 ? "\"inf\"" : "\"-inf\"";
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

inline void write_json(const Json& j, std::string& out, int indent) {
  const std::string pad(static_cast<std::size_t>(indent) * 2, ' ');
  const std::string pad_in(static_cast<std::size_t>(indent + 1) * 2, ' ');
  switch (j.type()) {
    case Json::value_t::object: {
      if (j.empty()) {
        out += "{}";
        return;
      }
      out += "{\n";
      bool first = true;
      for (const auto& [key, value] : j.items()) {
        if (!first) out += ",\n";
        first = false;
        out += pad_in + nlohmann::json(key).dump() + ": ";
        write_json(value, out, indent + 1);
      }
      out += "\n" + pad + "}";
      return;
    }
    case Json::value_t::array: {
      if (j.empty()) {
        out += "[]";
        return;
      }
      out += "[\n";
      bool first = true;
      for (const auto& value : j) {
        if (!first) out += ",\n";
        first = false;
        out += pad_in;
        write_json(value, out, indent + 1);
      }
      out += "\n" + pad + "]";
      return;
    }
    case Json::value_t::number_float:
      out += format_double(j.get<double>());
      return;
    default:
      out += j.dump();
      return;
  }
}

}  // namespace detail

inline std::string serialize_report(const Json& report) {
  std::string out;
  detail::write_json(report, out, 0);
  out += "\n";
  return out;
}

inline Json report_header() {
  Json tool;
  tool["name"] = "kmsgraph";
  tool["version"] = std::string(kVersion);
  return tool;
}

}  // namespace kmsgraph
