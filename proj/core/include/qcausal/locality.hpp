#pragma once

#include <cstddef>
#include <map>
#include <stdexcept>
#include <string>
#include <vector>

#include "qcausal/footprint.hpp"

namespace qcausal::locality {

enum class LocalityClass { SpacePointLocal = 0, ObjectLocal = 1, NonLocal = 2 };

std::string to_string(LocalityClass c);

struct ObjectDecl {
  std::string id;
  std::vector<std::string> globals;
  bool operator==(const ObjectDecl&) const = default;
};

struct LawSpec {
  std::string id;
  AccessFootprint footprint;
  std::size_t line = 0;  // declaration line, for reports
  bool operator==(const LawSpec& o) const { return id == o.id && footprint == o.footprint; }
};

struct ModelSpec {
  std::string name;
  std::vector<ObjectDecl> objects;
  std::vector<LawSpec> laws;
  bool operator==(const ModelSpec&) const = default;
};

struct SyntaxIssue {
  std::size_t line = 0;
  std::size_t column = 0;
  std::string message;
};

/// Parse or semantic failure; carries every issue found.
class ParseError : public std::runtime_error {
 public:
  explicit ParseError(std::vector<SyntaxIssue> issues);
  const std::vector<SyntaxIssue>& issues() const noexcept { return issues_; }

 private:
  std::vector<SyntaxIssue> issues_;
};

/// Grammar (line comments start with '#'):
///   spec    := "model" IDENT { object | law }
///   object  := "object" IDENT "{" [ "globals" ":" IDENT { "," IDENT } [";"] ] "}"
///   law     := "law" IDENT "{" { ("reads" | "writes") ":" [ ref { "," ref } ] ";" } "}"
///   ref     := "cell" "(" INT { "," INT } ")"       relative offset
///            | "cell@" "(" INT { "," INT } ")"      absolute point
///            | "global" "(" IDENT "." IDENT ")"
///            | "allpaths" "(" IDENT ")"
///            | "space" | "objects"
/// Throws ParseError on syntax errors, duplicate law ids and references to
/// undeclared objects or attributes.
ModelSpec parse_model_spec(const std::string& text);

/// Canonical text form; parse(pretty_print(m)) == m.
std::string pretty_print(const ModelSpec& spec);

struct LawReport {
  std::string law;
  LocalityClass cls = LocalityClass::SpacePointLocal;
  std::vector<std::string> offenders;  // refs that raised the class, DSL spelling
  std::vector<std::string> reasons;    // one per offender
};

struct ModelReport {
  std::string model;
  LocalityClass cls = LocalityClass::SpacePointLocal;
  std::vector<LawReport> laws;
};

LawReport classify_law(const LawSpec& law);
ModelReport classify_model(const ModelSpec& spec);

std::string report_text(const ModelReport& r);
/// JSON document (as text) with schema_version, model class and per-law entries.
std::string report_json(const ModelReport& r);

/// True if every observed (write, read) cell offset pair is covered by a
/// CellAt of the law's footprint. Offsets are relative to the written cell.
bool covers_observed_offsets(const AccessFootprint& declared, const std::vector<int>& observed_read_offsets);

}  // namespace qcausal::locality
