#pragma once

#include <cstdint>
#include <iomanip>
#include <istream>
#include <map>
#include <ostream>
#include <sstream>
#include <string>

#include <nlohmann/json.hpp>

#include "gpaplan/error.hpp"
#include "gpaplan/ssp/policy.hpp"

namespace gpaplan {

inline constexpr const char* kPolicyFormat = "gpa-plan-policy";
inline constexpr int kPolicyVersion = 1;

/// FNV-1a over the names of the true facts; stable across separate
/// groundings of the same problem text.
inline std::uint64_t state_hash(const GroundSsp& ssp, const State& s) {
  std::uint64_t h = 0xcbf29ce484222325ull;
  auto feed = [&](char c) {
    h ^= static_cast<unsigned char>(c);
    h *= 0x100000001b3ull;
  };
  s.for_each_fact([&](FactId f) {
    for (char c : ssp.fact_name(f)) feed(c);
    feed('\n');
  });
  return h;
}

struct PolicyHeader {
  std::string problem_id;
  std::string domain_file;
  std::string problem_file;
  std::string solver;
  double value_s0 = 0.0;  // infinite values are stored as null
  std::size_t entries = 0;
};

struct PolicyFile {
  PolicyHeader header;
  std::map<std::uint64_t, std::string> entries;  // state hash -> action name
};

inline void write_policy(std::ostream& os, const GroundSsp& ssp, const Policy& pi, PolicyHeader header) {
  std::map<std::uint64_t, std::string> rows;
  for (const auto& [s, a] : pi.entries()) rows[state_hash(ssp, s)] = ssp.actions[a].name;
  header.entries = rows.size();
  nlohmann::ordered_json j;
  j["format"] = kPolicyFormat;
  j["version"] = kPolicyVersion;
  j["problem"] = header.problem_id;
  j["domain_file"] = header.domain_file;
  j["problem_file"] = header.problem_file;
  j["solver"] = header.solver;
  if (is_infinite(header.value_s0)) {
    j["value_s0"] = nullptr;
  } else {
    j["value_s0"] = header.value_s0;
  }
  j["entries"] = header.entries;
  os << j.dump() << '\n';
  for (const auto& [h, name] : rows) os << std::hex << std::setw(16) << std::setfill('0') << h << std::dec << '\t' << name << '\n';
}

inline PolicyFile read_policy_file(std::istream& is) {
  PolicyFile f;
  std::string line;
  if (!std::getline(is, line)) throw Error(ErrorCode::MalformedFile, "empty policy file");
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(line);
    if (j.at("format") != kPolicyFormat) throw Error(ErrorCode::MalformedFile, "not a policy file");
    if (j.at("version") != kPolicyVersion) throw Error(ErrorCode::MalformedFile, "unsupported policy version");
    f.header.problem_id = j.at("problem").get<std::string>();
    f.header.domain_file = j.value("domain_file", "");
    f.header.problem_file = j.value("problem_file", "");
    f.header.solver = j.value("solver", "");
    f.header.value_s0 = j.at("value_s0").is_null() ? kInfinity : j.at("value_s0").get<double>();
    f.header.entries = j.at("entries").get<std::size_t>();
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::MalformedFile, std::string("policy header: ") + e.what());
  }
  std::size_t lineno = 1;
  while (std::getline(is, line)) {
    ++lineno;
    if (line.empty()) continue;
    const auto tab = line.find('\t');
    if (tab == std::string::npos || tab == 0)
      throw Error(ErrorCode::MalformedFile, "policy line " + std::to_string(lineno) + ": expected hash<TAB>action");
    std::uint64_t h = 0;
    std::istringstream hs(line.substr(0, tab));
    hs >> std::hex >> h;
    if (!hs || !hs.eof()) throw Error(ErrorCode::MalformedFile, "policy line " + std::to_string(lineno) + ": bad hash");
    f.entries[h] = line.substr(tab + 1);
  }
  if (f.entries.size() != f.header.entries)
    throw Error(ErrorCode::MalformedFile, "policy entry count does not match header");
  return f;
}

/// Rebuilds a state-keyed policy by walking the problem from its initial
/// state and looking up each visited state's hash.
inline Policy resolve_policy(const GroundSsp& ssp, const PolicyFile& f) {
  Policy pi;
  std::vector<State> stack{ssp.initial_state};
  std::unordered_map<State, char, StateHash> seen{{ssp.initial_state, 1}};
  while (!stack.empty()) {
    State s = std::move(stack.back());
    stack.pop_back();
    if (ssp.is_goal(s)) continue;
    auto it = f.entries.find(state_hash(ssp, s));
    if (it == f.entries.end()) continue;
    const ActionId a = ssp.find_action(it->second);
    if (a == GroundSsp::npos) throw Error(ErrorCode::MalformedFile, "unknown action " + it->second);
    if (!ssp.actions[a].applicable(s)) throw Error(ErrorCode::MalformedFile, it->second + " is not applicable");
    pi.set(s, a);
    for (auto& succ : successors(ssp, s, ssp.actions[a]))
      if (seen.emplace(succ.state, 1).second) stack.push_back(std::move(succ.state));
  }
  return pi;
}

}  // namespace gpaplan
