#pragma once

#include <algorithm>
#include <cstddef>
#include <initializer_list>
#include <string>
#include <vector>

#include "roelab/errors.hpp"

namespace roelab {

/// Sorted, duplicate-free subset of {0, ..., universe-1}.
class IndexSet {
 public:
  IndexSet() = default;

  IndexSet(std::size_t universe, std::vector<std::size_t> members)
      : universe_(universe), members_(std::move(members)) {
    std::sort(members_.begin(), members_.end());
    if (std::adjacent_find(members_.begin(), members_.end()) != members_.end()) {
      throw DomainError("IndexSet: duplicate member");
    }
    if (!members_.empty() && members_.back() >= universe_) {
      throw DomainError("IndexSet: member " + std::to_string(members_.back()) +
                        " out of range " + std::to_string(universe_));
    }
  }

  IndexSet(std::size_t universe, std::initializer_list<std::size_t> members)
      : IndexSet(universe, std::vector<std::size_t>(members)) {}

  static IndexSet full(std::size_t universe) {
    std::vector<std::size_t> all(universe);
    for (std::size_t i = 0; i < universe; ++i) all[i] = i;
    return IndexSet(universe, std::move(all));
  }

  static IndexSet empty(std::size_t universe) { return IndexSet(universe, {}); }

  std::size_t universe() const noexcept { return universe_; }
  std::size_t size() const noexcept { return members_.size(); }
  bool is_empty() const noexcept { return members_.empty(); }
  bool is_full() const noexcept { return members_.size() == universe_; }

  bool contains(std::size_t i) const {
    return std::binary_search(members_.begin(), members_.end(), i);
  }

  bool is_subset_of(const IndexSet& other) const {
    return universe_ == other.universe_ &&
           std::includes(other.members_.begin(), other.members_.end(), members_.begin(),
                         members_.end());
  }

  IndexSet complement() const {
    std::vector<std::size_t> out;
    out.reserve(universe_ - members_.size());
    std::size_t j = 0;
    for (std::size_t i = 0; i < universe_; ++i) {
      if (j < members_.size() && members_[j] == i) {
        ++j;
      } else {
        out.push_back(i);
      }
    }
    return IndexSet(universe_, std::move(out));
  }

  const std::vector<std::size_t>& members() const noexcept { return members_; }
  auto begin() const noexcept { return members_.begin(); }
  auto end() const noexcept { return members_.end(); }
  std::size_t operator[](std::size_t k) const { return members_[k]; }

  friend bool operator==(const IndexSet&, const IndexSet&) = default;

 private:
  std::size_t universe_ = 0;
  std::vector<std::size_t> members_;
};

}  // namespace roelab
