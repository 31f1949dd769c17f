#pragma once

#include <optional>
#include <ostream>
#include <string>
#include <string_view>

#include "pdpk/knowledge_graph.hpp"

namespace pdpk {

// Byte-deterministic Turtle: fixed prefix block, one statement per line,
// statements sorted by (head IRI, relation IRI, tail), numeric literals as
// shortest round-trip xsd:double.
void write_turtle(std::ostream& out, const KnowledgeGraph& kg);
std::string to_turtle(const KnowledgeGraph& kg);

// Lexical form used for xsd:double literals.
std::string format_double(double value);

// Parses the Turtle subset the writer emits plus the usual shorthands
// (';' and ',' lists, 'a', comments, PREFIX, bare numerals). Blank nodes and
// non-numeric literals are rejected. Without a hint the representation is
// inferred from the relation vocabulary. Throws ParseError.
KnowledgeGraph parse_turtle(std::string_view text,
                            std::optional<Representation> representation = std::nullopt);

}  // namespace pdpk
