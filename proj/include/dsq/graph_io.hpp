#pragma once

#include <iosfwd>
#include <string>

#include "dsq/rational.hpp"
#include "dsq/report.hpp"
#include "dsq/rotation_graph.hpp"

namespace dsq {

// Rotation-map text format:
//   rotg <n> <d>
//   <v> <i> <w> <j>     (one line per slot: rot(v,i) = (w,j); any order)
// Blank lines and '#' comments are skipped. Every slot must appear exactly
// once; a repeated (v,i) is an error. The undirected flag is recomputed from
// the parsed map (set iff it is an involution).
RotationGraph parse_rotation_graph(std::istream& in);
void emit_rotation_graph(std::ostream& out, const RotationGraph& g);

// Undirected edge-list format:
//   ug <n>
//   <u> <v>             (repeats = multiplicity, "u u" = self-loop)
UndirectedGraph parse_undirected(std::istream& in);
void emit_undirected(std::ostream& out, const UndirectedGraph& g);

RotationGraph load_rotation_graph(const std::string& path);
UndirectedGraph load_undirected(const std::string& path);

Json matrix_to_json(const RatMat& m);   // rows of "p/q" strings
RatMat matrix_from_json(const Json& j);
Json vector_to_json(const RatVec& v);
RatVec vector_from_json(const Json& j);

}  // namespace dsq
