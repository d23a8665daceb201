#include <algorithm>
#include <cstdlib>
#include <set>
#include <sstream>

#include <json.hpp>

#include "qcausal/locality.hpp"

namespace qcausal::locality {

std::string to_string(LocalityClass c) {
  switch (c) {
    case LocalityClass::SpacePointLocal:
      return "SpacePointLocal";
    case LocalityClass::ObjectLocal:
      return "ObjectLocal";
    default:
      return "NonLocal";
  }
}

namespace {

struct Classifier {
  LawReport report;
  std::set<std::string> seen;

  void raise(LocalityClass c, const AccessRef& ref, const std::string& reason) {
    report.cls = std::max(report.cls, c);
    const auto text = to_string(ref);
    if (!seen.insert(text).second) return;
    report.offenders.push_back(text);
    report.reasons.push_back(reason);
  }
};

}  // namespace

LawReport classify_law(const LawSpec& law) {
  Classifier c;
  c.report.law = law.id;

  std::vector<AccessRef> refs = law.footprint.reads;
  refs.insert(refs.end(), law.footprint.writes.begin(), law.footprint.writes.end());

  std::vector<const AccessRef*> relative;
  std::vector<const AccessRef*> absolute;
  std::set<std::vector<int>> points;
  std::vector<const AccessRef*> globals;
  std::set<std::string> global_objects;

  for (const auto& r : refs) {
    if (const auto* cell = std::get_if<CellAt>(&r)) {
      relative.push_back(&r);
      const bool near = std::all_of(cell->offset.begin(), cell->offset.end(), [](int o) { return std::abs(o) <= 1; });
      if (!near) c.raise(LocalityClass::NonLocal, r, "offset beyond the immediate neighbourhood");
    } else if (const auto* abs = std::get_if<CellAbsolute>(&r)) {
      absolute.push_back(&r);
      points.insert(abs->point);
    } else if (const auto* g = std::get_if<ObjectGlobal>(&r)) {
      globals.push_back(&r);
      global_objects.insert(g->object);
    } else if (const auto* a = std::get_if<ObjectAllPaths>(&r)) {
      c.raise(LocalityClass::NonLocal, r, "references the complete extent of object '" + a->object + "'");
    } else if (std::holds_alternative<WholeSpace>(r)) {
      c.raise(LocalityClass::NonLocal, r, "references the whole space");
    } else {
      c.raise(LocalityClass::NonLocal, r, "ranges over all quantum objects");
    }
  }

  if (points.size() > 1)
    for (const auto* r : absolute) c.raise(LocalityClass::NonLocal, *r, "refers to more than one absolute position");
  if (!absolute.empty() && !relative.empty())
    for (const auto* r : absolute)
      c.raise(LocalityClass::NonLocal, *r, "absolute position mixed with positions relative to the update point");

  if (global_objects.size() > 1) {
    std::string names;
    for (const auto& o : global_objects) names += (names.empty() ? "" : ", ") + o;
    for (const auto* r : globals) c.raise(LocalityClass::NonLocal, *r, "cross-references objects " + names);
  } else {
    for (const auto* r : globals) c.raise(LocalityClass::ObjectLocal, *r, "global property of one object");
  }
  return c.report;
}

ModelReport classify_model(const ModelSpec& spec) {
  ModelReport r;
  r.model = spec.name;
  for (const auto& l : spec.laws) {
    r.laws.push_back(classify_law(l));
    r.cls = std::max(r.cls, r.laws.back().cls);
  }
  return r;
}

std::string report_text(const ModelReport& r) {
  std::ostringstream os;
  os << "model " << r.model << ": " << to_string(r.cls) << "\n";
  for (const auto& l : r.laws) {
    os << "  law " << l.law << ": " << to_string(l.cls) << "\n";
    for (std::size_t i = 0; i < l.offenders.size(); ++i)
      os << "    " << l.offenders[i] << "  (" << l.reasons[i] << ")\n";
  }
  return os.str();
}

std::string report_json(const ModelReport& r) {
  nlohmann::ordered_json j;
  j["schema_version"] = 1;
  j["model"] = r.model;
  j["class"] = to_string(r.cls);
  auto laws = nlohmann::ordered_json::array();
  for (const auto& l : r.laws) {
    nlohmann::ordered_json e;
    e["law"] = l.law;
    e["class"] = to_string(l.cls);
    auto off = nlohmann::ordered_json::array();
    for (std::size_t i = 0; i < l.offenders.size(); ++i) off.push_back({{"ref", l.offenders[i]}, {"reason", l.reasons[i]}});
    e["offenders"] = std::move(off);
    laws.push_back(std::move(e));
  }
  j["laws"] = std::move(laws);
  return j.dump(2);
}

bool covers_observed_offsets(const AccessFootprint& declared, const std::vector<int>& observed) {
  std::set<int> allowed;
  for (const auto& r : declared.reads)
    if (const auto* c = std::get_if<CellAt>(&r); c && !c->offset.empty()) allowed.insert(c->offset.front());
  return std::all_of(observed.begin(), observed.end(), [&](int o) { return allowed.contains(o); });
}

}  // namespace qcausal::locality
