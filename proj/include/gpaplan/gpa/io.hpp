#pragma once

#include <iomanip>
#include <istream>
#include <map>
#include <ostream>
#include <sstream>
#include <string>

#include <nlohmann/json.hpp>

#include "gpaplan/gpa/gpa.hpp"

namespace gpaplan::gpa {

inline constexpr const char* kGpaFormat = "gpa-plan-gpa";
inline constexpr int kGpaVersion = 1;

inline std::string hex64(std::uint64_t v) {
  std::ostringstream os;
  os << std::hex << std::setw(16) << std::setfill('0') << v;
  return os.str();
}

/// Writes the GPA as JSON. Vertices are renumbered in canonical order so
/// that structurally equal automata produce identical files.
inline void save_gpa(std::ostream& os, const Gpa& g, const std::string& domain_name = "") {
  const auto& v = g.vocabulary();
  std::vector<VertexId> order(g.num_vertices());
  for (VertexId i = 0; i < order.size(); ++i) order[i] = i;
  std::sort(order.begin(), order.end(), [&](VertexId a, VertexId b) { return g.vertex(a) < g.vertex(b); });
  std::vector<VertexId> renumber(order.size());
  for (VertexId i = 0; i < order.size(); ++i) renumber[order[i]] = i;

  std::set<abstraction::Role> roles;
  for (VertexId i = 0; i < g.num_vertices(); ++i) {
    for (const auto& [r, n] : g.vertex(i).role_counts) roles.insert(r);
    for (const auto& rel : g.vertex(i).relations) roles.insert(rel.roles.begin(), rel.roles.end());
  }
  for (const auto& [key, dests] : g.edges()) roles.insert(key.second.roles.begin(), key.second.roles.end());

  nlohmann::ordered_json j;
  j["format"] = kGpaFormat;
  j["version"] = kGpaVersion;
  j["domain"] = domain_name;
  j["vocabulary_hash"] = hex64(v.hash());
  auto role_list = nlohmann::ordered_json::array();
  for (const auto& r : roles) role_list.push_back(abstraction::role_text(v, r));
  j["roles"] = role_list;
  auto states = nlohmann::ordered_json::array();
  for (VertexId i : order) states.push_back(abstraction::dump(v, g.vertex(i)));
  j["states"] = states;
  std::vector<std::tuple<VertexId, std::string, std::vector<VertexId>>> rows;
  for (const auto& [key, dests] : g.edges()) {
    std::vector<VertexId> ds;
    for (VertexId d : dests) ds.push_back(renumber[d]);
    std::sort(ds.begin(), ds.end());
    rows.emplace_back(renumber[key.first], abstraction::dump(v, key.second), std::move(ds));
  }
  std::sort(rows.begin(), rows.end());
  auto edges = nlohmann::ordered_json::array();
  for (const auto& [src, act, ds] : rows) edges.push_back(nlohmann::ordered_json::array({src, act, ds}));
  j["edges"] = edges;
  os << j.dump(1) << '\n';
}

/// Reads a GPA saved by save_gpa against the vocabulary of the domain it
/// is meant for; a different vocabulary is rejected.
inline Gpa load_gpa(std::istream& is, std::shared_ptr<const Vocabulary> vocab) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(is);
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::MalformedFile, std::string("gpa file: ") + e.what());
  }
  Gpa g(vocab);
  try {
    if (j.at("format") != kGpaFormat) throw Error(ErrorCode::MalformedFile, "not a GPA file");
    if (j.at("version") != kGpaVersion) throw Error(ErrorCode::MalformedFile, "unsupported GPA version");
    if (j.at("vocabulary_hash").get<std::string>() != hex64(vocab->hash()))
      throw Error(ErrorCode::DomainMismatch, "GPA was learned for a different domain vocabulary");
    for (const auto& s : j.at("states")) {
      const auto id = g.add_vertex(abstraction::parse_abstract_state(*vocab, s.get<std::string>()));
      if (id + 1 != g.num_vertices()) throw Error(ErrorCode::MalformedFile, "duplicate abstract state");
    }
    for (const auto& e : j.at("edges")) {
      if (!e.is_array() || e.size() != 3) throw Error(ErrorCode::MalformedFile, "edge must be [src, action, [dests]]");
      std::set<VertexId> dests;
      for (const auto& d : e[2]) dests.insert(d.get<VertexId>());
      const auto src = e[0].get<VertexId>();
      try {
        g.add_edge(src, abstraction::parse_abstract_action(*vocab, e[1].get<std::string>()), std::move(dests));
      } catch (const Error& err) {
        if (err.code() == ErrorCode::InvalidParam) throw Error(ErrorCode::MalformedFile, err.what());
        throw;
      }
    }
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::MalformedFile, std::string("gpa file: ") + e.what());
  }
  return g;
}

}  // namespace gpaplan::gpa
