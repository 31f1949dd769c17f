#include "pdpk/turtle.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>
#include <map>
#include <set>
#include <sstream>
#include <tuple>

#include "pdpk/errors.hpp"

namespace pdpk {

namespace {

constexpr std::string_view kVocabPrefix = "pdpk";
constexpr std::string_view kEntityPrefix = "pe";
constexpr std::string_view kXsdPrefix = "xsd";
constexpr std::string_view kRdfType = "http://www.w3.org/1999/02/22-rdf-syntax-ns#type";

bool plain_local_name(std::string_view local) {
  if (local.empty()) return false;
  return std::all_of(local.begin(), local.end(), [](unsigned char c) {
    return std::isalnum(c) || c == '_';
  });
}

std::string compact(const std::string& iri) {
  for (auto [ns, prefix] : {std::pair{vocab::kVocabNamespace, kVocabPrefix},
                            std::pair{vocab::kEntityNamespace, kEntityPrefix}}) {
    if (iri.starts_with(ns)) {
      std::string_view local(iri);
      local.remove_prefix(ns.size());
      if (plain_local_name(local)) return std::string(prefix) + ":" + std::string(local);
    }
  }
  return "<" + iri + ">";
}

}  // namespace

std::string format_double(double value) {
  if (std::isnan(value)) return "NaN";
  if (std::isinf(value)) return value > 0 ? "INF" : "-INF";
  char buffer[64];
  auto result = std::to_chars(buffer, buffer + sizeof buffer, value);
  return std::string(buffer, result.ptr);
}

void write_turtle(std::ostream& out, const KnowledgeGraph& kg) {
  using Line = std::tuple<std::string, std::string, std::string, std::string>;
  std::vector<Line> lines;
  lines.reserve(kg.triples().size());
  for (const auto& t : kg.triples()) {
    const auto& head = kg.entity_iri(t.head);
    const auto& rel = kg.relation_iri(t.relation);
    if (t.tail_is_entity()) {
      const auto& tail = kg.entity_iri(t.tail_entity());
      lines.emplace_back(head, rel, tail, compact(tail));
    } else {
      const auto lexical = format_double(std::get<Literal>(t.tail).value);
      lines.emplace_back(head, rel, lexical,
                         "\"" + lexical + "\"^^" + std::string(kXsdPrefix) + ":double");
    }
  }
  std::sort(lines.begin(), lines.end());
  out << "@prefix " << kVocabPrefix << ": <" << vocab::kVocabNamespace << "> .\n"
      << "@prefix " << kEntityPrefix << ": <" << vocab::kEntityNamespace << "> .\n"
      << "@prefix " << kXsdPrefix << ": <" << vocab::kXsdNamespace << "> .\n\n";
  for (const auto& [head, rel, key, tail] : lines) {
    out << compact(head) << ' ' << compact(rel) << ' ' << tail << " .\n";
  }
}

std::string to_turtle(const KnowledgeGraph& kg) {
  std::ostringstream out;
  write_turtle(out, kg);
  return out.str();
}

namespace {

struct Term {
  enum class Kind { iri, literal } kind;
  std::string iri;
  double value = 0.0;
};

class TurtleParser {
 public:
  explicit TurtleParser(std::string_view text) : text_(text) {}

  struct Statement {
    std::string subject, predicate;
    Term object;
  };

  std::vector<Statement> parse() {
    std::vector<Statement> statements;
    skip_space();
    while (pos_ < text_.size()) {
      if (peek_keyword("@prefix")) {
        pos_ += 7;
        parse_prefix(true);
      } else if (peek_keyword_ci("PREFIX")) {
        pos_ += 6;
        parse_prefix(false);
      } else if (peek_keyword("@base") || peek_keyword_ci("BASE")) {
        fail("@base is not supported");
      } else {
        parse_triples(statements);
      }
      skip_space();
    }
    return statements;
  }

 private:
  [[noreturn]] void fail(const std::string& what) const {
    std::size_t line = 1 + static_cast<std::size_t>(
                               std::count(text_.begin(), text_.begin() + pos_, '\n'));
    throw ParseError("turtle line " + std::to_string(line) + ": " + what);
  }

  void skip_space() {
    while (pos_ < text_.size()) {
      const char c = text_[pos_];
      if (c == '#') {
        while (pos_ < text_.size() && text_[pos_] != '\n') ++pos_;
      } else if (std::isspace(static_cast<unsigned char>(c))) {
        ++pos_;
      } else {
        break;
      }
    }
  }

  bool peek_keyword(std::string_view word) const {
    return text_.substr(pos_).starts_with(word);
  }
  bool peek_keyword_ci(std::string_view word) const {
    if (text_.size() - pos_ < word.size() + 1) return false;
    for (std::size_t i = 0; i < word.size(); ++i) {
      if (std::toupper(static_cast<unsigned char>(text_[pos_ + i])) != word[i]) return false;
    }
    return std::isspace(static_cast<unsigned char>(text_[pos_ + word.size()]));
  }

  void expect(char c) {
    skip_space();
    if (pos_ >= text_.size() || text_[pos_] != c) fail(std::string("expected '") + c + "'");
    ++pos_;
  }

  void parse_prefix(bool needs_dot) {
    skip_space();
    const auto colon = text_.find(':', pos_);
    if (colon == std::string_view::npos) fail("malformed prefix declaration");
    std::string name(text_.substr(pos_, colon - pos_));
    pos_ = colon + 1;
    skip_space();
    prefixes_[name] = parse_iriref();
    if (needs_dot) expect('.');
  }

  std::string parse_iriref() {
    if (pos_ >= text_.size() || text_[pos_] != '<') fail("expected IRI");
    const auto end = text_.find('>', pos_);
    if (end == std::string_view::npos) fail("unterminated IRI");
    std::string iri(text_.substr(pos_ + 1, end - pos_ - 1));
    pos_ = end + 1;
    return iri;
  }

  static bool name_char(char c) {
    return std::isalnum(static_cast<unsigned char>(c)) || c == '_' || c == '-' || c == '.' ||
           c == ':';
  }

  std::string parse_prefixed_name() {
    const std::size_t start = pos_;
    while (pos_ < text_.size() && name_char(text_[pos_])) ++pos_;
    // A trailing '.' terminates the statement rather than the name.
    while (pos_ > start && text_[pos_ - 1] == '.') --pos_;
    const auto token = text_.substr(start, pos_ - start);
    if (token == "a") return std::string(kRdfType);
    const auto colon = token.find(':');
    if (colon == std::string_view::npos) fail("expected a prefixed name, got '" + std::string(token) + "'");
    auto it = prefixes_.find(std::string(token.substr(0, colon)));
    if (it == prefixes_.end()) fail("undeclared prefix in '" + std::string(token) + "'");
    return it->second + std::string(token.substr(colon + 1));
  }

  std::string parse_iri_term() {
    skip_space();
    if (pos_ >= text_.size()) fail("unexpected end of input");
    if (text_[pos_] == '<') return parse_iriref();
    if (text_[pos_] == '_' || text_[pos_] == '[') fail("blank nodes are not supported");
    return parse_prefixed_name();
  }

  static std::optional<double> parse_number(std::string_view lexical) {
    if (lexical == "NaN") return std::nan("");
    if (lexical == "INF" || lexical == "+INF") return HUGE_VAL;
    if (lexical == "-INF") return -HUGE_VAL;
    if (!lexical.empty() && lexical.front() == '+') lexical.remove_prefix(1);
    double value = 0.0;
    auto result = std::from_chars(lexical.data(), lexical.data() + lexical.size(), value);
    if (result.ec != std::errc{} || result.ptr != lexical.data() + lexical.size()) {
      return std::nullopt;
    }
    return value;
  }

  Term parse_object() {
    skip_space();
    if (pos_ >= text_.size()) fail("unexpected end of input");
    const char c = text_[pos_];
    if (c == '"') {
      const auto end = text_.find('"', pos_ + 1);
      if (end == std::string_view::npos) fail("unterminated literal");
      const auto lexical = text_.substr(pos_ + 1, end - pos_ - 1);
      pos_ = end + 1;
      if (text_.substr(pos_).starts_with("^^")) {
        pos_ += 2;
        const auto datatype = parse_iri_term();
        static const std::set<std::string, std::less<>> numeric = {
            std::string(vocab::kXsdNamespace) + "double",
            std::string(vocab::kXsdNamespace) + "decimal",
            std::string(vocab::kXsdNamespace) + "float",
            std::string(vocab::kXsdNamespace) + "integer"};
        if (!numeric.contains(datatype)) fail("unsupported literal datatype " + datatype);
      } else if (text_.substr(pos_).starts_with("@")) {
        fail("language-tagged literals are not supported");
      }
      auto value = parse_number(lexical);
      if (!value) fail("non-numeric literal \"" + std::string(lexical) + "\"");
      return Term{Term::Kind::literal, {}, *value};
    }
    if (c == '+' || c == '-' || std::isdigit(static_cast<unsigned char>(c))) {
      const std::size_t start = pos_;
      while (pos_ < text_.size() &&
             (std::isalnum(static_cast<unsigned char>(text_[pos_])) || text_[pos_] == '.' ||
              text_[pos_] == '+' || text_[pos_] == '-')) {
        ++pos_;
      }
      while (pos_ > start && text_[pos_ - 1] == '.') --pos_;
      auto value = parse_number(text_.substr(start, pos_ - start));
      if (!value) fail("malformed numeric literal");
      return Term{Term::Kind::literal, {}, *value};
    }
    return Term{Term::Kind::iri, parse_iri_term(), 0.0};
  }

  void parse_triples(std::vector<Statement>& out) {
    const auto subject = parse_iri_term();
    while (true) {
      const auto predicate = parse_iri_term();
      while (true) {
        out.push_back({subject, predicate, parse_object()});
        skip_space();
        if (pos_ < text_.size() && text_[pos_] == ',') {
          ++pos_;
          continue;
        }
        break;
      }
      skip_space();
      if (pos_ < text_.size() && text_[pos_] == ';') {
        ++pos_;
        skip_space();
        if (pos_ < text_.size() && text_[pos_] == '.') break;
        continue;
      }
      break;
    }
    expect('.');
  }

  std::string_view text_;
  std::size_t pos_ = 0;
  std::map<std::string, std::string> prefixes_;
};

Representation infer_representation(const std::set<std::string>& relations) {
  auto has = [&](std::string_view local) {
    return relations.contains(vocab::relation_iri(local));
  };
  if (has(vocab::kHasAdjustment)) return Representation::rei_e;
  if (has(vocab::kHasQuantification)) return Representation::ch_l_eta;
  if (has(vocab::kHasCondition) && has(vocab::kAdjusts)) return Representation::ch_e;
  if (has(vocab::kImplies) && has(vocab::kAdjusts)) return Representation::ch_e_eta;
  if (has(vocab::kImplies)) return Representation::ch_l_eta;
  throw ParseError("cannot infer the representation from the relation vocabulary");
}

}  // namespace

KnowledgeGraph parse_turtle(std::string_view text,
                            std::optional<Representation> representation) {
  const auto statements = TurtleParser(text).parse();
  if (!representation) {
    std::set<std::string> relations;
    for (const auto& s : statements) relations.insert(s.predicate);
    representation = infer_representation(relations);
  }
  KnowledgeGraph kg(*representation);
  for (const auto& s : statements) {
    const auto head = kg.add_entity(s.subject);
    const auto rel = kg.add_relation(s.predicate);
    if (s.object.kind == Term::Kind::iri) {
      kg.add_triple(head, rel, kg.add_entity(s.object.iri));
    } else {
      kg.add_triple(head, rel, Literal{s.object.value});
    }
  }
  return kg;
}

}  // namespace pdpk
