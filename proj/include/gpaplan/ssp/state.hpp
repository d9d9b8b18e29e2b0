#pragma once

#include <bit>
#include <compare>
#include <cstdint>
#include <functional>
#include <vector>

namespace gpaplan {

using FactId = std::uint32_t;
using ActionId = std::uint32_t;
using ObjectId = std::uint32_t;
using PredicateId = std::uint32_t;

/// A ground state: the set of true facts, stored as a bitset over fact ids.
/// Two states with the same facts compare and hash equal.
class State {
 public:
  State() = default;
  explicit State(std::size_t num_facts) : words_((num_facts + 63) / 64, 0), num_facts_(num_facts) {}

  std::size_t universe_size() const { return num_facts_; }

  bool test(FactId f) const { return (words_[f >> 6] >> (f & 63)) & 1u; }
  void set(FactId f) { words_[f >> 6] |= std::uint64_t{1} << (f & 63); }
  void reset(FactId f) { words_[f >> 6] &= ~(std::uint64_t{1} << (f & 63)); }

  std::size_t count() const {
    std::size_t n = 0;
    for (auto w : words_) n += static_cast<std::size_t>(std::popcount(w));
    return n;
  }

  template <class F>
  void for_each_fact(F&& f) const {
    for (std::size_t i = 0; i < words_.size(); ++i) {
      std::uint64_t w = words_[i];
      while (w) {
        const int bit = std::countr_zero(w);
        f(static_cast<FactId>(i * 64 + static_cast<std::size_t>(bit)));
        w &= w - 1;
      }
    }
  }

  std::vector<FactId> facts() const {
    std::vector<FactId> out;
    for_each_fact([&](FactId f) { out.push_back(f); });
    return out;
  }

  std::size_t hash() const {
    std::uint64_t h = 0xcbf29ce484222325ull;
    for (auto w : words_) {
      h ^= w + 0x9e3779b97f4a7c15ull + (h << 6) + (h >> 2);
    }
    return static_cast<std::size_t>(h);
  }

  bool operator==(const State&) const = default;
  auto operator<=>(const State&) const = default;

 private:
  std::vector<std::uint64_t> words_;
  std::size_t num_facts_ = 0;
};

struct StateHash {
  std::size_t operator()(const State& s) const { return s.hash(); }
};

}  // namespace gpaplan
