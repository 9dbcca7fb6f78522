#include "patchnet/formats.hpp"

#include <cmath>
#include <map>
#include <optional>
#include <tuple>
#include <set>
#include <sstream>

#include <boost/property_tree/ptree.hpp>
#include <boost/property_tree/xml_parser.hpp>

#include "patchnet/error.hpp"
#include "patchnet/text.hpp"

namespace patchnet {

void NetDocument::validate() const {
  if (marking.size() != net.place_count())
    throw PreconditionError("marking covers " + std::to_string(marking.size()) + " places, net has " +
                            std::to_string(net.place_count()));
  if (rates.size() != net.transition_count())
    throw PreconditionError("rates cover " + std::to_string(rates.size()) + " transitions, net has " +
                            std::to_string(net.transition_count()));
  for (std::size_t t = 0; t < rates.size(); ++t)
    if (!(rates[t] > 0) || !std::isfinite(rates[t]))
      throw PreconditionError("rate of '" + net.transitions()[t] + "' must be positive and finite");
  for (char c : name)
    if (c == ']' || static_cast<unsigned char>(c) < 0x20)
      throw PreconditionError("document name contains ']' or a control character");
}

// ================================================================ ANDL

namespace {

void append_terms(std::string& out, const PetriNet& net, std::span<const ArcTerm> arcs, char sign) {
  if (arcs.empty()) {
    out += "[]";
    return;
  }
  bool first = true;
  for (const auto& a : arcs) {
    if (!first) out += '&';
    first = false;
    out += '[';
    out += net.places()[a.place];
    out += ' ';
    out += sign;
    out += ' ';
    out += std::to_string(a.weight);
    out += ']';
  }
}

class AndlParser {
 public:
  explicit AndlParser(std::string_view src) : src_(src) {}

  NetDocument parse() {
    NetDocument doc;
    expect_word("spn");
    expect('[');
    auto close = src_.find(']', pos_);
    auto nl = src_.find('\n', pos_);
    if (close == std::string_view::npos || (nl != std::string_view::npos && nl < close))
      fail("unterminated net name");
    doc.name = std::string(src_.substr(pos_, close - pos_));
    pos_ = close + 1;
    expect('{');
    expect_word("places");
    expect(':');

    NetBuilder b;
    std::vector<std::pair<std::size_t, Tokens>> counts;
    while (true) {
      skip_ws();
      const auto save = pos_;
      auto id = identifier();
      skip_ws();
      if (id == "transitions" && peek() == ':') {
        ++pos_;
        break;
      }
      expect('=');
      const Tokens n = integer();
      expect(';');
      try {
        counts.emplace_back(b.add_place(id), n);
      } catch (const IdentifierError&) {
        pos_ = save;
        throw IdentifierError("duplicate place '" + id + "' at " + where());
      }
    }

    std::vector<double> rates;
    // Arcs are applied after the whole block is read, against the declared places.
    struct PendingArc {
      std::string place;
      std::size_t transition;
      Tokens weight;
      bool input;
      std::size_t line, column;
    };
    std::vector<PendingArc> arcs;
    while (true) {
      skip_ws();
      if (peek() == '}') {
        ++pos_;
        break;
      }
      const auto [line, column] = line_col(pos_);
      auto id = identifier();
      std::size_t t;
      try {
        t = b.add_transition(id);
      } catch (const IdentifierError&) {
        throw IdentifierError("duplicate transition '" + id + "' at line " + std::to_string(line) +
                              ", column " + std::to_string(column));
      }
      expect(':');
      read_terms(arcs, t, '-');
      expect(':');
      read_terms(arcs, t, '+');
      expect(':');
      skip_ws();
      rates.push_back(real());
      expect(';');
    }
    skip_ws();
    if (pos_ != src_.size()) fail("unexpected text after closing brace");

    std::set<std::tuple<bool, std::size_t, std::string>> seen;
    PetriNet probe = b.build();
    for (const auto& a : arcs) {
      auto at = " at line " + std::to_string(a.line) + ", column " + std::to_string(a.column);
      if (!probe.has_place(a.place)) throw IdentifierError("unknown place '" + a.place + "'" + at);
      if (!seen.emplace(a.input, a.transition, a.place).second)
        throw IdentifierError("place '" + a.place + "' repeated in an arc list" + at);
      if (a.input)
        b.set_input(a.place, probe.transitions()[a.transition], a.weight);
      else
        b.set_output(probe.transitions()[a.transition], a.place, a.weight);
    }
    doc.net = b.build();
    doc.marking = Marking(doc.net.place_count());
    for (const auto& [p, n] : counts) doc.marking.set(p, n);
    doc.rates = std::move(rates);
    return doc;
  }

 private:
  template <typename Arc>
  void read_terms(std::vector<Arc>& arcs, std::size_t t, char sign) {
    skip_ws();
    expect('[');
    skip_ws();
    if (peek() == ']') {
      ++pos_;
      return;
    }
    while (true) {
      skip_ws();
      const auto [line, column] = line_col(pos_);
      auto place = identifier();
      expect(sign);
      skip_ws();
      const Tokens w = integer();
      if (w < 1) fail("arc weight must be at least 1");
      expect(']');
      arcs.push_back({std::move(place), t, w, sign == '-', line, column});
      skip_ws();
      if (peek() != '&') break;
      ++pos_;
      expect('[');
    }
  }

  char peek() const { return pos_ < src_.size() ? src_[pos_] : '\0'; }

  void skip_ws() {
    while (pos_ < src_.size() &&
           (src_[pos_] == ' ' || src_[pos_] == '\t' || src_[pos_] == '\n' || src_[pos_] == '\r'))
      ++pos_;
  }

  void expect(char c) {
    skip_ws();
    if (peek() != c) fail(std::string("expected '") + c + "'");
    ++pos_;
  }

  void expect_word(std::string_view w) {
    skip_ws();
    const auto save = pos_;
    if (identifier() != w) {
      pos_ = save;
      fail("expected '" + std::string(w) + "'");
    }
  }

  std::string identifier() {
    skip_ws();
    const auto start = pos_;
    auto is_start = [](char c) { return std::isalpha(static_cast<unsigned char>(c)) || c == '_'; };
    auto is_body = [](char c) { return std::isalnum(static_cast<unsigned char>(c)) || c == '_'; };
    if (!is_start(peek())) fail("expected an identifier");
    while (pos_ < src_.size() && is_body(src_[pos_])) ++pos_;
    return std::string(src_.substr(start, pos_ - start));
  }

  Tokens integer() {
    skip_ws();
    const auto start = pos_;
    while (pos_ < src_.size() && std::isdigit(static_cast<unsigned char>(src_[pos_]))) ++pos_;
    std::int64_t v;
    if (start == pos_ || !text::parse_int(src_.substr(start, pos_ - start), v)) {
      pos_ = start;
      fail("expected a non-negative integer");
    }
    return v;
  }

  double real() {
    const auto start = pos_;
    auto digits = [&] {
      while (pos_ < src_.size() && std::isdigit(static_cast<unsigned char>(src_[pos_]))) ++pos_;
    };
    digits();
    if (peek() == '.') {
      ++pos_;
      digits();
    }
    if (peek() == 'e' || peek() == 'E') {
      ++pos_;
      if (peek() == '+' || peek() == '-') ++pos_;
      digits();
    }
    double v;
    if (start == pos_ || !text::parse_real(src_.substr(start, pos_ - start), v)) {
      pos_ = start;
      fail("expected a rate");
    }
    return v;
  }

  // Positions are queried mostly in increasing order; scanning resumes from
  // the last answer so large files stay linear.
  std::pair<std::size_t, std::size_t> line_col(std::size_t at) const {
    if (at < lc_pos_) lc_pos_ = 0, lc_line_ = 1, lc_col_ = 1;
    for (; lc_pos_ < at && lc_pos_ < src_.size(); ++lc_pos_) {
      if (src_[lc_pos_] == '\n') {
        ++lc_line_;
        lc_col_ = 1;
      } else {
        ++lc_col_;
      }
    }
    return {lc_line_, lc_col_};
  }

  std::string where() const {
    auto [line, col] = line_col(pos_);
    return "line " + std::to_string(line) + ", column " + std::to_string(col);
  }

  [[noreturn]] void fail(const std::string& what) const {
    auto [line, col] = line_col(pos_);
    throw ParseError("ANDL syntax error at line " + std::to_string(line) + ", column " +
                         std::to_string(col) + ": " + what,
                     line, col);
  }

  std::string_view src_;
  std::size_t pos_ = 0;
  mutable std::size_t lc_pos_ = 0, lc_line_ = 1, lc_col_ = 1;
};

}  // namespace

std::string emit_andl(const NetDocument& doc) {
  doc.validate();
  const auto& net = doc.net;
  std::string out = "spn [" + doc.name + "]\n{\nplaces:\n";
  for (std::size_t p = 0; p < net.place_count(); ++p)
    out += "  " + net.places()[p] + " = " + std::to_string(doc.marking[p]) + ";\n";
  out += "transitions:\n";
  for (std::size_t t = 0; t < net.transition_count(); ++t) {
    out += "  " + net.transitions()[t] + " : ";
    append_terms(out, net, net.inputs(t), '-');
    out += " : ";
    append_terms(out, net, net.outputs(t), '+');
    out += " : " + text::format_real(doc.rates[t]) + ";\n";
  }
  out += "}\n";
  return out;
}

NetDocument parse_andl(std::string_view text) {
  auto doc = AndlParser(text).parse();
  doc.validate();
  return doc;
}

// ================================================================ SBML

namespace {

std::string xml_escape(std::string_view s) {
  std::string out;
  for (char c : s) {
    switch (c) {
      case '&': out += "&amp;"; break;
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '"': out += "&quot;"; break;
      case '\'': out += "&apos;"; break;
      default: out += c;
    }
  }
  return out;
}

using boost::property_tree::ptree;

const std::string kAttr = "<xmlattr>";

std::string required_attr(const ptree& node, const std::string& element, const std::string& attr) {
  if (auto attrs = node.get_child_optional(kAttr))
    if (auto v = attrs->get_optional<std::string>(attr)) return *v;
  throw SchemaError("element '" + element + "' is missing required attribute '" + attr + "'");
}

std::optional<std::string> optional_attr(const ptree& node, const std::string& attr) {
  if (auto attrs = node.get_child_optional(kAttr))
    if (auto v = attrs->get_optional<std::string>(attr)) return *v;
  return std::nullopt;
}

struct ReactionData {
  std::string id;
  std::vector<std::pair<std::string, Tokens>> reactants, products;
  double rate = 0;
};

class SbmlReader {
 public:
  explicit SbmlReader(std::vector<std::string>* warnings) : warnings_(warnings) {}

  NetDocument read(const ptree& root) {
    auto sbml = root.get_child_optional("sbml");
    if (!sbml) throw SchemaError("document root is not 'sbml'");
    const ptree* model = nullptr;
    for (const auto& [key, child] : *sbml) {
      if (key == "model" && !model)
        model = &child;
      else
        skip(key, "sbml");
    }
    if (!model) throw SchemaError("element 'sbml' has no 'model'");

    NetDocument doc;
    doc.name = optional_attr(*model, "name").value_or("");
    NetBuilder b;
    std::vector<Tokens> amounts;
    std::vector<ReactionData> reactions;

    for (const auto& [key, child] : *model) {
      if (key == "listOfSpecies") {
        for (const auto& [k2, sp] : child) {
          if (k2 != "species") {
            skip(k2, "listOfSpecies");
            continue;
          }
          auto id = required_attr(sp, "species", "id");
          amounts.push_back(amount(required_attr(sp, "species", "initialAmount"), id));
          b.add_place(id);
        }
      } else if (key == "listOfReactions") {
        for (const auto& [k2, rx] : child) {
          if (k2 != "reaction") {
            skip(k2, "listOfReactions");
            continue;
          }
          reactions.push_back(read_reaction(rx));
        }
      } else {
        skip(key, "model");
      }
    }

    for (const auto& r : reactions) b.add_transition(r.id);
    PetriNet declared = b.build();
    for (const auto& r : reactions) {
      std::set<std::string> in, out;
      for (const auto& [sp, w] : r.reactants) {
        if (!declared.has_place(sp))
          throw IdentifierError("reaction '" + r.id + "' references unknown species '" + sp + "'");
        if (!in.insert(sp).second)
          throw IdentifierError("reaction '" + r.id + "' lists reactant '" + sp + "' twice");
        b.set_input(sp, r.id, w);
      }
      for (const auto& [sp, w] : r.products) {
        if (!declared.has_place(sp))
          throw IdentifierError("reaction '" + r.id + "' references unknown species '" + sp + "'");
        if (!out.insert(sp).second)
          throw IdentifierError("reaction '" + r.id + "' lists product '" + sp + "' twice");
        b.set_output(r.id, sp, w);
      }
      doc.rates.push_back(r.rate);
    }
    doc.net = b.build();
    doc.marking = Marking(std::move(amounts));
    return doc;
  }

 private:
  ReactionData read_reaction(const ptree& rx);

  void read_refs(const ptree& list, const std::string& list_name,
                 std::vector<std::pair<std::string, Tokens>>& refs) {
    for (const auto& [key, ref] : list) {
      if (key != "speciesReference") {
        skip(key, list_name);
        continue;
      }
      auto sp = required_attr(ref, "speciesReference", "species");
      auto st = required_attr(ref, "speciesReference", "stoichiometry");
      double w;
      if (!text::parse_real(st, w) || w < 1 || w != std::floor(w))
        throw SchemaError("speciesReference to '" + sp + "' has non-integral stoichiometry '" + st + "'");
      refs.emplace_back(sp, static_cast<Tokens>(w));
    }
  }

  Tokens amount(const std::string& s, const std::string& id) {
    double v;
    if (!text::parse_real(s, v) || v < 0 || v != std::floor(v))
      throw SchemaError("species '" + id + "' has a non-integral initialAmount '" + s + "'");
    return static_cast<Tokens>(v);
  }

  void skip(const std::string& key, const std::string& parent) {
    if (key == kAttr || key == "<xmlcomment>") return;
    if (warnings_) warnings_->push_back("ignored element '" + key + "' inside '" + parent + "'");
  }

  std::vector<std::string>* warnings_;
};

ReactionData SbmlReader::read_reaction(const ptree& rx) {
  ReactionData r;
  r.id = required_attr(rx, "reaction", "id");
  bool have_rate = false;
  for (const auto& [key, child] : rx) {
    if (key == "listOfReactants") {
      read_refs(child, key, r.reactants);
    } else if (key == "listOfProducts") {
      read_refs(child, key, r.products);
    } else if (key == "kineticLaw") {
      for (const auto& [k2, params] : child) {
        if (k2 != "listOfLocalParameters") {
          skip(k2, "kineticLaw");
          continue;
        }
        for (const auto& [k3, param] : params) {
          if (k3 != "localParameter") {
            skip(k3, "listOfLocalParameters");
            continue;
          }
          if (required_attr(param, "localParameter", "id") != "rate") continue;
          auto v = required_attr(param, "localParameter", "value");
          if (!text::parse_real(v, r.rate))
            throw SchemaError("reaction '" + r.id + "' has a non-numeric rate '" + v + "'");
          have_rate = true;
        }
      }
    } else {
      skip(key, "reaction");
    }
  }
  if (!have_rate) throw SchemaError("reaction '" + r.id + "' has no local parameter 'rate'");
  return r;
}

}  // namespace

std::string emit_sbml(const NetDocument& doc) {
  doc.validate();
  const auto& net = doc.net;
  std::string out;
  out += "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n";
  out += "<sbml xmlns=\"http://www.sbml.org/sbml/level3/version1/core\" level=\"3\" version=\"1\">\n";
  out += "  <model name=\"" + xml_escape(doc.name) + "\">\n";
  if (net.place_count() > 0) {
    out += "    <listOfSpecies>\n";
    for (std::size_t p = 0; p < net.place_count(); ++p)
      out += "      <species id=\"" + net.places()[p] + "\" initialAmount=\"" +
             std::to_string(doc.marking[p]) + "\"/>\n";
    out += "    </listOfSpecies>\n";
  }
  auto refs = [&](const char* list, std::span<const ArcTerm> arcs) {
    if (arcs.empty()) return;
    out += std::string("        <") + list + ">\n";
    for (const auto& a : arcs)
      out += "          <speciesReference species=\"" + net.places()[a.place] +
             "\" stoichiometry=\"" + std::to_string(a.weight) + "\"/>\n";
    out += std::string("        </") + list + ">\n";
  };
  if (net.transition_count() > 0) {
    out += "    <listOfReactions>\n";
    for (std::size_t t = 0; t < net.transition_count(); ++t) {
      out += "      <reaction id=\"" + net.transitions()[t] + "\">\n";
      refs("listOfReactants", net.inputs(t));
      refs("listOfProducts", net.outputs(t));
      out += "        <kineticLaw>\n";
      out += "          <listOfLocalParameters>\n";
      out += "            <localParameter id=\"rate\" value=\"" + text::format_real(doc.rates[t]) +
             "\"/>\n";
      out += "          </listOfLocalParameters>\n";
      out += "        </kineticLaw>\n";
      out += "      </reaction>\n";
    }
    out += "    </listOfReactions>\n";
  }
  out += "  </model>\n";
  out += "</sbml>\n";
  return out;
}

NetDocument parse_sbml(std::string_view text, std::vector<std::string>* warnings) {
  namespace xml = boost::property_tree::xml_parser;
  ptree root;
  try {
    std::istringstream in{std::string(text)};
    xml::read_xml(in, root, xml::trim_whitespace);
  } catch (const xml::xml_parser_error& e) {
    throw ParseError("malformed XML at line " + std::to_string(e.line()) + ": " + e.message(),
                     e.line(), 0);
  }
  auto doc = SbmlReader(warnings).read(root);
  doc.validate();
  return doc;
}

NetDocument load_document(const std::filesystem::path& path, std::vector<std::string>* warnings) {
  const auto ext = path.extension().string();
  if (ext != ".andl" && ext != ".xml" && ext != ".sbml")
    throw ValidationError("cannot tell the format of '" + path.string() +
                          "' (expected .andl, .xml or .sbml)");
  if (!std::filesystem::exists(path))
    throw ValidationError("model file '" + path.string() + "' does not exist");
  const auto contents = text::read_file(path);
  return ext == ".andl" ? parse_andl(contents) : parse_sbml(contents, warnings);
}

// ================================================================ traces

std::string write_trace_csv(const Trace& trace) {
  std::string out = "time";
  for (const auto& p : trace.places) out += "," + p;
  out += '\n';
  for (const auto& row : trace.rows) {
    out += text::format_real(row.time);
    for (auto c : row.tokens) {
      out += ',';
      out += std::to_string(c);
    }
    out += '\n';
  }
  return out;
}

std::string write_trace_csv(const Trace& trace, const PetriNet& net) {
  if (trace.places != net.places())
    throw PreconditionError("trace columns do not match the net's places");
  for (const auto& row : trace.rows)
    if (row.tokens.size() != net.place_count())
      throw PreconditionError("trace row width does not match the net");
  return write_trace_csv(trace);
}

Trace read_trace_csv(std::string_view csv) {
  auto lines = text::split_lines(csv);
  if (lines.empty()) throw FormatError("trace CSV is empty");
  auto header = text::split_fields(lines[0]);
  if (header.empty() || header[0] != "time") throw FormatError("trace CSV row 1: header must start with 'time'");
  Trace trace;
  trace.places.assign(header.begin() + 1, header.end());
  for (std::size_t r = 1; r < lines.size(); ++r) {
    const auto row_no = std::to_string(r + 1);
    auto f = text::split_fields(lines[r]);
    if (f.size() != header.size())
      throw FormatError("trace CSV row " + row_no + " has " + std::to_string(f.size()) +
                        " fields, expected " + std::to_string(header.size()));
    TraceRow row;
    if (!text::parse_real(f[0], row.time) || row.time < 0)
      throw FormatError("trace CSV row " + row_no + " has an invalid time");
    if (!trace.rows.empty() && !(row.time > trace.rows.back().time))
      throw FormatError("trace CSV row " + row_no + ": time is not strictly increasing");
    row.tokens.reserve(f.size() - 1);
    for (std::size_t c = 1; c < f.size(); ++c) {
      std::int64_t v;
      if (!text::parse_int(f[c], v) || v < 0)
        throw FormatError("trace CSV row " + row_no + " column " + std::to_string(c + 1) +
                          " is not a token count");
      row.tokens.push_back(v);
    }
    trace.rows.push_back(std::move(row));
  }
  return trace;
}

}  // namespace patchnet
