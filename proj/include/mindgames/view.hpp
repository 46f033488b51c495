#pragma once

// What a persuader is shown: the scenario, the full matrix, its goal, and in
// the Revealed condition the target's knowledge and preferences.

#include <optional>
#include <string>
#include <vector>

#include "mindgames/core.hpp"
#include "mindgames/target.hpp"
#include "mindgames/text.hpp"

namespace mindgames {

struct TargetPanel {
  std::vector<Disclosure> known_cells;
  ValueFunction values;
  int current_choice = 0;

  friend bool operator==(const TargetPanel&, const TargetPanel&) = default;
};

struct PersuaderView {
  Scenario scenario;
  UtilityMatrix matrix;
  int goal = 0;
  Condition condition = Condition::kHidden;
  std::optional<TargetPanel> target;  // Revealed only

  friend bool operator==(const PersuaderView&, const PersuaderView&) = default;
};

inline PersuaderView render_persuader_view(const Instance& instance, Condition condition) {
  PersuaderView view{instance.scenario, instance.matrix, instance.goal, condition, std::nullopt};
  if (condition == Condition::kRevealed) {
    const KnowledgeState start = initial_state(instance);
    TargetPanel panel;
    panel.known_cells = answer_informational(start, instance, CellSet::all());
    panel.values = instance.values;
    panel.current_choice = start.current_choice();
    view.target = std::move(panel);
  }
  return view;
}

namespace detail {

inline std::string bullet_effects(const std::vector<Disclosure>& cells, const Scenario& s) {
  std::string out;
  for (int p = 0; p < kNumProposals; ++p) {
    std::vector<Disclosure> row;
    for (const auto& d : cells)
      if (d.cell.proposal == p) row.push_back(d);
    if (row.empty()) continue;
    std::vector<std::string> clauses;
    for (const auto& d : row)
      clauses.push_back("will *" + std::string(effect_phrase(d.claimed_effect)) + " " +
                        s.attribute_names[d.cell.attribute] + "*");
    out += "- Proposal **" + s.proposal_names[p] + "** " + join_list(clauses) + ".\n";
  }
  return out;
}

inline std::string counterpart(const Scenario& s) {
  return s.flavor == Flavor::kMental ? "the other player" : "the system";
}

}  // namespace detail

/// The matrix block shown identically in both conditions.
inline std::string render_what_you_know(const PersuaderView& view) {
  std::vector<Disclosure> all;
  for (Cell c : CellSet::all().cells()) all.push_back({c, view.matrix.at(c)});
  std::string out = "### What you know\n\n";
  out += detail::bullet_effects(all, view.scenario);
  out += "\nYou want " + detail::counterpart(view.scenario) + " to choose proposal **" +
         view.scenario.proposal_names[view.goal] + "**.\n";
  return out;
}

inline std::string render_target_panel(const TargetPanel& panel, const Scenario& s) {
  std::string out = "### What " + detail::counterpart(s) + " knows\n\n";
  out += detail::bullet_effects(panel.known_cells, s);
  out += "\n";
  for (int a = 0; a < kNumAttributes; ++a) {
    out += "- They " + std::string(preference_phrase(panel.values.at(a))) + " " +
           s.attribute_names[a] + ".\n";
  }
  return out;
}

inline std::string render_view_text(const PersuaderView& view) {
  std::string out = "### Scenario\n\n" + view.scenario.cover_story + "\n\n";
  out += render_what_you_know(view);
  if (view.target) out += "\n" + render_target_panel(*view.target, view.scenario);
  return out;
}

}  // namespace mindgames
