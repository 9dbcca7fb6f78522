#pragma once

// Text serializations of nets (ANDL-style and SBML-style) and of traces.

#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include "patchnet/core.hpp"

namespace patchnet {

/// A net together with its initial marking, per-transition rates and name.
struct NetDocument {
  std::string name;
  PetriNet net;
  Marking marking;
  std::vector<double> rates;  // aligned with net.transitions()

  /// Throws PreconditionError when marking/rates do not fit the net or a
  /// rate is not positive and finite.
  void validate() const;

  double rate(std::string_view transition) const { return rates.at(net.transition_index(transition)); }

  friend bool operator==(const NetDocument&, const NetDocument&) = default;
};

/// Grammar emitted (one item per line, LF endings):
///
///   spn [<name>]
///   {
///   places:
///     <place> = <tokens>;
///   transitions:
///     <transition> : <inputs> : <outputs> : <rate>;
///   }
///
/// <inputs> is "[p - w]&[q - w]", <outputs> "[p + w]&...", both in
/// canonical place order, or "[]" when empty. Rates use the shortest
/// round-trip decimal form.
std::string emit_andl(const NetDocument& doc);

/// Whitespace-tolerant parser for the grammar above. Syntax errors are
/// ParseError with line/column; duplicate ids are IdentifierError.
NetDocument parse_andl(std::string_view text);

/// SBML level 3 version 1 subset: species per place (id, initialAmount),
/// reactions per transition with speciesReference stoichiometry, and the
/// rate as a local parameter named "rate". Output is byte-stable.
std::string emit_sbml(const NetDocument& doc);

/// Parses the emitted subset. Unknown elements are skipped and reported in
/// `warnings` when given. Malformed XML is ParseError; a missing required
/// attribute is SchemaError.
NetDocument parse_sbml(std::string_view text, std::vector<std::string>* warnings = nullptr);

/// Reads a model file, choosing the parser by extension: ".andl" for ANDL,
/// ".xml" or ".sbml" for SBML. Other extensions are a ValidationError.
NetDocument load_document(const std::filesystem::path& path,
                          std::vector<std::string>* warnings = nullptr);

/// Sample-and-hold snapshots of a simulation run.
struct TraceRow {
  double time = 0;
  std::vector<Tokens> tokens;  // canonical place order
  friend bool operator==(const TraceRow&, const TraceRow&) = default;
};

/// One firing, logged only when the simulation is asked to keep it.
struct FiringEvent {
  double time = 0;
  std::size_t transition = 0;
};

/// Equality compares places and rows only.
struct Trace {
  std::vector<std::string> places;
  std::vector<TraceRow> rows;
  bool truncated = false;
  std::size_t events = 0;
  std::vector<FiringEvent> firings;

  friend bool operator==(const Trace& a, const Trace& b) {
    return a.places == b.places && a.rows == b.rows;
  }
};

/// Header "time,<places>", then one row per snapshot.
std::string write_trace_csv(const Trace& trace);
/// Same, after checking the trace columns match `net`'s places.
std::string write_trace_csv(const Trace& trace, const PetriNet& net);
/// Throws FormatError (with row number) on non-increasing time.
Trace read_trace_csv(std::string_view text);

}  // namespace patchnet
