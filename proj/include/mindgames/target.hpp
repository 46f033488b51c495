#pragma once

// The naively-rational target. It believes every disclosure, keeps the
// utility-maximizing proposal given what it knows, and answers appeals about
// its preferences, its knowledge and its ranking of the proposals.

#include <algorithm>
#include <string>
#include <utility>
#include <vector>

#include "mindgames/action.hpp"
#include "mindgames/text.hpp"

namespace mindgames {

struct MotivationalAnswer {
  int attribute = 0;
  Preference preference = Preference::kIndifferent;

  friend bool operator==(const MotivationalAnswer&, const MotivationalAnswer&) = default;
};

struct InferentialAnswer {
  int proposal = 0;
  int utility = 0;
  bool chosen = false;

  friend bool operator==(const InferentialAnswer&, const InferentialAnswer&) = default;
};

struct TargetReply {
  std::vector<Disclosure> echo;
  std::vector<MotivationalAnswer> motivational_answers;
  std::vector<Disclosure> informational_answers;
  std::vector<InferentialAnswer> inferential_answers;
  bool canned = false;
  std::string rendered_text;

  friend bool operator==(const TargetReply&, const TargetReply&) = default;
};

/// Learns `cells` and re-evaluates the choice once. No truth check.
inline KnowledgeState simulate_disclosure(KnowledgeState state, const UtilityMatrix& matrix,
                                          const ValueFunction& values, CellSet cells) {
  state.known = state.known | cells;
  const Utilities u = evaluate_utilities(matrix, values, state.known);
  return update_choice(std::move(state), u);
}

inline std::pair<KnowledgeState, std::vector<Disclosure>> apply_disclosures(
    KnowledgeState state, const Instance& instance, const std::vector<Disclosure>& disclosures) {
  CellSet cells;
  for (const auto& d : disclosures) {
    if (instance.matrix.at(d.cell) != d.claimed_effect) {
      throw Error(ErrorCode::kUntruthfulDisclosure,
                  "proposal " + instance.scenario.proposal_names[d.cell.proposal] + " / " +
                      instance.scenario.attribute_names[d.cell.attribute]);
    }
    cells.insert(d.cell);
  }
  state = simulate_disclosure(std::move(state), instance.matrix, instance.values, cells);
  return {std::move(state), disclosures};
}

inline std::vector<MotivationalAnswer> answer_motivational(const ValueFunction& values,
                                                           IndexSet attributes) {
  std::vector<MotivationalAnswer> out;
  for (int a : attributes.items()) out.push_back({a, values.at(a)});
  return out;
}

/// Only cells the target knows are reported; unknown ones are left out.
inline std::vector<Disclosure> answer_informational(const KnowledgeState& state,
                                                    const Instance& instance, CellSet cells) {
  std::vector<Disclosure> out;
  for (Cell c : (cells & state.known).cells()) out.push_back({c, instance.matrix.at(c)});
  return out;
}

inline std::vector<InferentialAnswer> answer_inferential(const KnowledgeState& state,
                                                         const Instance& instance,
                                                         IndexSet proposals) {
  const Utilities u = evaluate_utilities(instance.matrix, instance.values, state.known);
  std::vector<InferentialAnswer> out;
  for (int p : proposals.items()) out.push_back({p, u[p], p == state.current_choice()});
  return out;
}

namespace detail {

inline std::string proposals_phrase(const Scenario& s, const std::vector<int>& group) {
  std::vector<std::string> names;
  for (int p : group) names.push_back(s.proposal_names[p]);
  return (group.size() == 1 ? "proposal " : "proposals ") + join_list(names);
}

}  // namespace detail

inline std::string render_motivational(const std::vector<MotivationalAnswer>& answers,
                                       const Scenario& scenario) {
  if (answers.empty()) return {};
  std::vector<std::string> clauses;
  for (const auto& m : answers)
    clauses.push_back("I " + std::string(preference_phrase(m.preference)) + " " +
                      scenario.attribute_names[m.attribute]);
  return join_list(clauses) + ".";
}

/// Ranks the answered proposals into equal-utility groups, best first.
inline std::string render_inferential(const std::vector<InferentialAnswer>& answers,
                                      const Scenario& scenario) {
  if (answers.empty()) return {};
  if (answers.size() == 1) {
    return "My utility for " + proposal_label(scenario, answers[0].proposal) + " is " +
           std::to_string(answers[0].utility) + ".";
  }
  std::vector<InferentialAnswer> sorted = answers;
  std::stable_sort(sorted.begin(), sorted.end(),
                   [](const auto& a, const auto& b) { return a.utility > b.utility; });
  std::vector<std::vector<int>> groups;
  for (std::size_t i = 0; i < sorted.size(); ++i) {
    if (i == 0 || sorted[i].utility != sorted[i - 1].utility) groups.emplace_back();
    groups.back().push_back(sorted[i].proposal);
  }
  std::vector<std::string> sentences;
  for (const auto& g : groups)
    if (g.size() > 1) sentences.push_back("I prefer " + detail::proposals_phrase(scenario, g) + " the same.");
  for (std::size_t i = 0; i + 1 < groups.size(); ++i) {
    sentences.push_back("I prefer " + detail::proposals_phrase(scenario, groups[i]) + " over " +
                        detail::proposals_phrase(scenario, groups[i + 1]) + ".");
  }
  std::string out;
  for (const auto& s : sentences) out += (out.empty() ? "" : " ") + s;

  const auto& top = groups.front();
  if (top.size() > 1) {
    for (const auto& a : sorted) {
      if (a.chosen && std::find(top.begin(), top.end(), a.proposal) != top.end()) {
        out += "\n\n" + std::string(kTieBreakPrefix) + scenario.proposal_names[a.proposal] + ".";
      }
    }
  }
  return out;
}

/// Echo, then preferences, then knowledge, then ranking.
inline std::string render_reply_text(const TargetReply& reply, const Scenario& scenario) {
  if (reply.canned) return std::string(kCannedReply);
  std::vector<std::string> parts = {
      effect_sentences(reply.echo, scenario),
      render_motivational(reply.motivational_answers, scenario),
      effect_sentences(reply.informational_answers, scenario),
      render_inferential(reply.inferential_answers, scenario),
  };
  std::string out;
  for (const auto& p : parts) {
    if (p.empty()) continue;
    if (!out.empty()) out += ' ';
    out += p;
  }
  return out;
}

/// Disclosures are applied first; every answer reflects the updated state.
inline std::pair<KnowledgeState, TargetReply> respond(KnowledgeState state, const Instance& instance,
                                                      const ActionMessage& action) {
  TargetReply reply;
  if (action.empty()) {
    reply.canned = true;
    reply.rendered_text = std::string(kCannedReply);
    return {std::move(state), std::move(reply)};
  }
  auto [next, echo] = apply_disclosures(std::move(state), instance, action.disclosures);
  reply.echo = std::move(echo);
  reply.motivational_answers = answer_motivational(instance.values, action.appeals.motivational);
  reply.informational_answers = answer_informational(next, instance, action.appeals.informational);
  reply.inferential_answers = answer_inferential(next, instance, action.appeals.inferential);
  reply.rendered_text = render_reply_text(reply, instance.scenario);
  return {std::move(next), std::move(reply)};
}

inline int final_choice(const KnowledgeState& state) { return state.current_choice(); }

}  // namespace mindgames
