#include "dsq/graph_io.hpp"

#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>

#include "dsq/error.hpp"

namespace dsq {

namespace {

// Next content line, with comments and blanks stripped. lineno counts raw
// input lines so parse errors can cite them.
bool next_line(std::istream& in, std::string& line, std::size_t& lineno) {
  while (std::getline(in, line)) {
    ++lineno;
    auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    std::size_t a = line.find_first_not_of(" \t\r");
    if (a == std::string::npos) continue;
    line.erase(0, a);
    return true;
  }
  return false;
}

std::string at_line(std::size_t lineno) { return "line " + std::to_string(lineno) + ": "; }

bool is_involution(const RotationGraph& g) {
  for (std::uint32_t v = 0; v < g.n; ++v)
    for (std::uint32_t i = 0; i < g.d; ++i) {
      RotStep s = g.rot(v, i);
      if (g.rot(s.vertex, s.label) != RotStep{v, i}) return false;
    }
  return true;
}

}  // namespace

RotationGraph parse_rotation_graph(std::istream& in) {
  std::string line;
  std::size_t lineno = 0;
  if (!next_line(in, line, lineno)) throw Error("ParseError", "missing header");
  std::istringstream hdr(line);
  std::string tag;
  std::uint32_t n = 0, d = 0;
  if (!(hdr >> tag >> n >> d) || tag != "rotg")
    throw Error("ParseError", at_line(lineno) + "expected 'rotg n d' header, got '" + line + "'");
  if (n == 0 || d == 0) throw Error("ParseError", at_line(lineno) + "n and d must be positive");
  if (std::uint64_t(n) * d > kMaxEdgeSlots)
    throw Error("SlotBound", "n*d exceeds the materialization bound");

  RotationGraph g;
  g.n = n;
  g.d = d;
  std::size_t slots = std::size_t(n) * d;
  g.to.assign(slots, 0);
  g.in_label.assign(slots, 0);
  std::vector<char> seen(slots, 0);
  std::size_t count = 0;
  while (next_line(in, line, lineno)) {
    std::istringstream ls(line);
    std::uint32_t v, i, w, j;
    if (!(ls >> v >> i >> w >> j))
      throw Error("ParseError", at_line(lineno) + "bad edge line '" + line + "'");
    std::string extra;
    if (ls >> extra) throw Error("ParseError", at_line(lineno) + "trailing tokens on '" + line + "'");
    if (v >= n || w >= n || i >= d || j >= d)
      throw Error("ParseError", at_line(lineno) + "edge line out of range: '" + line + "'");
    std::size_t s = g.slot(v, i);
    if (seen[s])
      throw Error("ParseError", at_line(lineno) + "slot (" + std::to_string(v) + "," +
                                    std::to_string(i) + ") given twice");
    seen[s] = 1;
    g.to[s] = w;
    g.in_label[s] = j;
    ++count;
  }
  if (count != slots)
    throw Error("ParseError", "expected " + std::to_string(slots) + " edge lines, got " +
                                  std::to_string(count));
  g.undirected = is_involution(g);
  return g;
}

void emit_rotation_graph(std::ostream& out, const RotationGraph& g) {
  out << "rotg " << g.n << ' ' << g.d << '\n';
  for (std::uint32_t v = 0; v < g.n; ++v)
    for (std::uint32_t i = 0; i < g.d; ++i) {
      RotStep s = g.rot(v, i);
      out << v << ' ' << i << ' ' << s.vertex << ' ' << s.label << '\n';
    }
}

UndirectedGraph parse_undirected(std::istream& in) {
  std::string line;
  std::size_t lineno = 0;
  if (!next_line(in, line, lineno)) throw Error("ParseError", "missing header");
  std::istringstream hdr(line);
  std::string tag;
  std::uint32_t n = 0;
  if (!(hdr >> tag >> n) || tag != "ug")
    throw Error("ParseError", at_line(lineno) + "expected 'ug n' header, got '" + line + "'");
  if (n == 0) throw Error("ParseError", at_line(lineno) + "n must be positive");
  UndirectedGraph g;
  g.n = n;
  while (next_line(in, line, lineno)) {
    std::istringstream ls(line);
    std::uint32_t u, v;
    if (!(ls >> u >> v))
      throw Error("ParseError", at_line(lineno) + "bad edge line '" + line + "'");
    std::string extra;
    if (ls >> extra) throw Error("ParseError", at_line(lineno) + "trailing tokens on '" + line + "'");
    if (u >= n || v >= n)
      throw Error("ParseError", at_line(lineno) + "edge endpoint out of range: '" + line + "'");
    g.edges.push_back({u, v});
  }
  return g;
}

void emit_undirected(std::ostream& out, const UndirectedGraph& g) {
  out << "ug " << g.n << '\n';
  for (auto [u, v] : g.edges) out << u << ' ' << v << '\n';
}

RotationGraph load_rotation_graph(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw Error("IoError", "cannot open '" + path + "'");
  return parse_rotation_graph(f);
}

UndirectedGraph load_undirected(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw Error("IoError", "cannot open '" + path + "'");
  return parse_undirected(f);
}

Json matrix_to_json(const RatMat& m) {
  Json rows = Json::array();
  for (std::size_t i = 0; i < m.rows; ++i) {
    Json row = Json::array();
    for (std::size_t j = 0; j < m.cols; ++j) row.push_back(format_rat(m.at(i, j)));
    rows.push_back(std::move(row));
  }
  return rows;
}

RatMat matrix_from_json(const Json& j) {
  if (!j.is_array() || j.empty()) throw Error("ParseError", "matrix json must be a nonempty array");
  std::size_t rows = j.size();
  std::size_t cols = j[0].size();
  RatMat m(rows, cols);
  for (std::size_t i = 0; i < rows; ++i) {
    if (!j[i].is_array() || j[i].size() != cols)
      throw Error("ParseError", "ragged matrix json");
    for (std::size_t k = 0; k < cols; ++k)
      m.at(i, k) = parse_rat(j[i][k].get<std::string>());
  }
  return m;
}

Json vector_to_json(const RatVec& v) {
  Json a = Json::array();
  for (const Rat& x : v) a.push_back(format_rat(x));
  return a;
}

RatVec vector_from_json(const Json& j) {
  if (!j.is_array()) throw Error("ParseError", "vector json must be an array");
  RatVec v;
  v.reserve(j.size());
  for (const auto& e : j) v.push_back(parse_rat(e.get<std::string>()));
  return v;
}

}  // namespace dsq
