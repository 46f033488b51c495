#pragma once

// Classified persuader actions: appeals to the target's mental states and
// disclosures of matrix cells.

#include <algorithm>
#include <vector>

#include "mindgames/core.hpp"

namespace mindgames {

struct Appeals {
  IndexSet motivational;   // attributes
  CellSet informational;   // cells
  IndexSet inferential;    // proposals

  bool empty() const {
    return motivational.empty() && informational.empty() && inferential.empty();
  }
  friend bool operator==(const Appeals&, const Appeals&) = default;
};

struct Disclosure {
  Cell cell;
  Effect claimed_effect = Effect::kNone;

  friend bool operator==(const Disclosure&, const Disclosure&) = default;
};

struct ActionMessage {
  Appeals appeals;
  std::vector<Disclosure> disclosures;

  /// A repeated cell keeps only its last claim.
  void add_disclosure(Disclosure d) {
    std::erase_if(disclosures, [&](const Disclosure& x) { return x.cell == d.cell; });
    disclosures.push_back(d);
  }

  bool empty() const { return appeals.empty() && disclosures.empty(); }

  CellSet disclosed_cells() const {
    CellSet s;
    for (const auto& d : disclosures) s.insert(d.cell);
    return s;
  }

  friend bool operator==(const ActionMessage&, const ActionMessage&) = default;
};

/// Disclosures sorted by cell; appeals are already order-free.
inline ActionMessage canonicalize(ActionMessage action) {
  std::vector<Disclosure> collapsed;
  for (const auto& d : action.disclosures) {
    std::erase_if(collapsed, [&](const Disclosure& x) { return x.cell == d.cell; });
    collapsed.push_back(d);
  }
  std::sort(collapsed.begin(), collapsed.end(),
            [](const Disclosure& a, const Disclosure& b) { return a.cell < b.cell; });
  action.disclosures = std::move(collapsed);
  return action;
}

inline ActionMessage disclose_cells(const UtilityMatrix& matrix, CellSet cells) {
  ActionMessage a;
  for (Cell c : cells.cells()) a.add_disclosure({c, matrix.at(c)});
  return a;
}

}  // namespace mindgames
