#pragma once

// Sentence templates shared by the target's replies, the persuader view and
// the canonical persuader phrasings understood by the template classifier.

#include <algorithm>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "mindgames/action.hpp"

namespace mindgames {

inline constexpr std::string_view kCannedReply =
    "I am a perfectly rational agent. I will choose the best proposal given what I know. I will "
    "echo back information that is revealed to me, and I will answer questions about what I know "
    "or like.";

inline constexpr std::string_view kTieBreakPrefix =
    "When I prefer the top proposals the same, I choose whichever of them I had preferred first. "
    "Right now, that is ";

/// "a", "a and b", "a, b and c".
inline std::string join_list(const std::vector<std::string>& items) {
  std::string out;
  for (std::size_t i = 0; i < items.size(); ++i) {
    if (i > 0) out += (i + 1 == items.size()) ? " and " : ", ";
    out += items[i];
  }
  return out;
}

inline std::string_view effect_phrase(Effect e) {
  switch (e) {
    case Effect::kIncrease: return "increase";
    case Effect::kDecrease: return "decrease";
    case Effect::kNone: return "have no effect on";
  }
  return "";
}

inline std::string_view preference_phrase(Preference p) {
  switch (p) {
    case Preference::kLike: return "like";
    case Preference::kDislike: return "dislike";
    case Preference::kIndifferent: return "feel indifferent to";
  }
  return "";
}

inline std::string proposal_label(const Scenario& s, int p) {
  return "proposal " + s.proposal_names[p];
}

/// One sentence per proposal, in order of first appearance:
/// "Proposal A will have no effect on x, will increase y and will decrease z."
inline std::string effect_sentences(std::span<const Disclosure> items, const Scenario& scenario,
                                    std::string_view emphasis = "") {
  std::vector<int> order;
  for (const auto& d : items)
    if (std::find(order.begin(), order.end(), d.cell.proposal) == order.end())
      order.push_back(d.cell.proposal);
  std::string out;
  for (int p : order) {
    std::vector<std::string> clauses;
    for (const auto& d : items) {
      if (d.cell.proposal != p) continue;
      clauses.push_back("will " + std::string(emphasis) + std::string(effect_phrase(d.claimed_effect)) +
                        " " + scenario.attribute_names[d.cell.attribute] + std::string(emphasis));
    }
    if (!out.empty()) out += ' ';
    out += "Proposal " + scenario.proposal_names[p] + " " + join_list(clauses) + ".";
  }
  return out;
}

}  // namespace mindgames
