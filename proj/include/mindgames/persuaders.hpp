#pragma once

// Persuader agents: the random-disclosure baseline and its closed form, the
// scripted perfect player, the brute-force planner, and the adapter that
// drives a chat model through assembled prompts.

#include <cmath>
#include <memory>
#include <optional>
#include <random>
#include <string>
#include <string_view>
#include <vector>

#include "mindgames/action.hpp"
#include "mindgames/prompts.hpp"
#include "mindgames/protocol.hpp"
#include "mindgames/scenarios.hpp"
#include "mindgames/target.hpp"
#include "mindgames/view.hpp"

namespace mindgames {

enum class Variant { kDefault, kNonMental, kAddHint, kPerfectGame, kDiscreteGame };

inline std::string_view to_string(Variant v) {
  switch (v) {
    case Variant::kDefault: return "default";
    case Variant::kNonMental: return "non_mental";
    case Variant::kAddHint: return "add_hint";
    case Variant::kPerfectGame: return "perfect_game";
    case Variant::kDiscreteGame: return "discrete_game";
  }
  return "";
}

inline Variant variant_from_string(std::string_view s) {
  for (Variant v : {Variant::kDefault, Variant::kNonMental, Variant::kAddHint,
                    Variant::kPerfectGame, Variant::kDiscreteGame}) {
    if (to_string(v) == s) return v;
  }
  throw Error(ErrorCode::kInvalidArgument, "unknown variant '" + std::string(s) + "'");
}

inline void check_variant(const Scenario& scenario, Variant variant) {
  if (variant == Variant::kNonMental && scenario.flavor != Flavor::kNonMental) {
    throw Error(ErrorCode::kIncompatibleVariant,
                "scenario '" + scenario.id + "' is not a non-mental scenario");
  }
}

// ---------------------------------------------------------------------------
// Random baseline, closed form

struct BaselineFactors {
  double no_incorrect = 0;                     // (7/9)^n
  double both_correct_given_no_incorrect = 0;  // 1 - 2(6/7)^n + (5/7)^n
  double probability = 0;
};

/// Win probability of `n` uniform draws with replacement over nine cells,
/// two of which must both appear and two of which must never appear.
inline BaselineFactors analytic_baseline_factors(int n) {
  if (n < 0) throw Error(ErrorCode::kInvalidArgument, "n must be >= 0");
  BaselineFactors f;
  f.no_incorrect = std::pow(7.0 / 9.0, n);
  // Over a common denominator so small n come out exact.
  f.both_correct_given_no_incorrect =
      (std::pow(7.0, n) - 2.0 * std::pow(6.0, n) + std::pow(5.0, n)) / std::pow(7.0, n);
  f.probability = f.no_incorrect * f.both_correct_given_no_incorrect;
  return f;
}

inline double analytic_win_probability(int n) { return analytic_baseline_factors(n).probability; }

inline double analytic_win_probability_expanded(int n) {
  if (n < 0) throw Error(ErrorCode::kInvalidArgument, "n must be >= 0");
  return std::pow(7.0 / 9.0, n) - 2.0 * std::pow(6.0 / 9.0, n) + std::pow(5.0 / 9.0, n);
}

// ---------------------------------------------------------------------------
// Agent interface

enum class Channel { kNaturalLanguage, kDiscrete, kStructured };

inline std::string_view to_string(Channel c) {
  switch (c) {
    case Channel::kNaturalLanguage: return "natural_language";
    case Channel::kDiscrete: return "discrete";
    case Channel::kStructured: return "structured";
  }
  return "";
}

inline Channel channel_from_string(std::string_view s) {
  for (Channel c : {Channel::kNaturalLanguage, Channel::kDiscrete, Channel::kStructured})
    if (to_string(c) == s) return c;
  throw Error(ErrorCode::kInvalidArgument, "unknown channel '" + std::string(s) + "'");
}

struct PersuaderContext {
  PersuaderView view;
  Variant variant = Variant::kDefault;
  Channel channel = Channel::kNaturalLanguage;
  int turn = 1;  // 1-based
  std::vector<ChatMessage> history;
  std::optional<TargetReply> last_reply;
  std::string rejection_feedback;  // set when re-prompting after a rejected message
};

struct PersuaderMessage {
  std::string text;
  std::string chain_of_thought;
  std::optional<ActionMessage> structured;  // built-in agents only
  bool format_violation = false;
  std::string raw_completion;
};

class Persuader {
 public:
  virtual ~Persuader() = default;
  virtual std::string kind() const = 0;
  virtual PersuaderMessage step(const PersuaderContext& context) = 0;
  /// Called with every target reply, in order.
  virtual void observe(const TargetReply& /*reply*/) {}
};

namespace detail {

/// Wraps a built-in agent's action in the text its channel carries.
inline PersuaderMessage built_in_message(ActionMessage action, const PersuaderContext& ctx) {
  PersuaderMessage m;
  const Scenario& s = ctx.view.scenario;
  if (ctx.channel == Channel::kDiscrete) {
    m.text = serialize_discrete_action(action, s);
  } else {
    m.text = action.empty() ? std::string(kFillerMessage) : render_action_text(action, s);
  }
  m.structured = std::move(action);
  return m;
}

}  // namespace detail

// ---------------------------------------------------------------------------
// Random baseline

enum class BaselineSchedule {
  kSingleTurn,  // every draw disclosed in the first message
  kRoundRobin,  // draw i disclosed on turn (i mod 8) + 1
};

class RandomBaselinePersuader final : public Persuader {
 public:
  RandomBaselinePersuader(int n, std::uint64_t seed,
                          BaselineSchedule schedule = BaselineSchedule::kSingleTurn)
      : schedule_(schedule) {
    if (n < 0) throw Error(ErrorCode::kInvalidArgument, "n must be >= 0");
    std::mt19937_64 rng(seed);
    std::uniform_int_distribution<int> cell(0, kNumCells - 1);
    for (int i = 0; i < n; ++i) draws_.push_back(cell_at<kNumAttributes>(cell(rng)));
  }

  std::string kind() const override { return "random"; }
  const std::vector<Cell>& draws() const { return draws_; }

  PersuaderMessage step(const PersuaderContext& ctx) override {
    ActionMessage action;
    for (std::size_t i = 0; i < draws_.size(); ++i) {
      const bool due = schedule_ == BaselineSchedule::kSingleTurn
                           ? ctx.turn == 1
                           : static_cast<int>(i % kNumTurns) + 1 == ctx.turn;
      if (due) action.add_disclosure({draws_[i], ctx.view.matrix.at(draws_[i])});
    }
    return detail::built_in_message(std::move(action), ctx);
  }

 private:
  BaselineSchedule schedule_;
  std::vector<Cell> draws_;
};

// ---------------------------------------------------------------------------
// Planning

/// Smallest set of cells unknown in `state` whose disclosure leaves the
/// target choosing `goal`; ties go to the lexicographically first set.
inline CellSet plan_bruteforce(const KnowledgeState& state, const ValueFunction& values,
                               const UtilityMatrix& matrix, int goal) {
  const CellSet unknown = state.known.complement();
  std::vector<CellSet> candidates;
  const std::uint16_t u = unknown.bits();
  for (std::uint16_t s = u;; s = static_cast<std::uint16_t>((s - 1) & u)) {
    candidates.emplace_back(s);
    if (s == 0) break;
  }
  std::sort(candidates.begin(), candidates.end(),
            [](CellSet a, CellSet b) { return size_lex_less(a, b); });
  for (CellSet c : candidates) {
    if (simulate_disclosure(state, matrix, values, c).current_choice() == goal) return c;
  }
  throw Error(ErrorCode::kNoWinningSet, "no disclosure of the unknown cells wins");
}

inline CellSet plan_bruteforce(const KnowledgeState& state, const Instance& instance) {
  return plan_bruteforce(state, instance.values, instance.matrix, instance.goal);
}

namespace detail {

/// What a persuader has learned about the target, from the Revealed panel
/// or from answered appeals.
struct TargetModel {
  std::optional<CellSet> known;
  std::array<std::optional<Preference>, kNumAttributes> values{};
  std::optional<int> choice;

  void seed_from(const PersuaderView& view) {
    if (!view.target) return;
    CellSet k;
    for (const auto& d : view.target->known_cells) k.insert(d.cell);
    known = k;
    for (int a = 0; a < kNumAttributes; ++a) values[a] = view.target->values.at(a);
    choice = view.target->current_choice;
  }

  /// `asked` is the informational appeal the reply answers.
  void learn(const TargetReply& reply, CellSet asked) {
    if (!asked.empty()) {
      CellSet k = known.value_or(CellSet{}) - asked;
      for (const auto& d : reply.informational_answers) k.insert(d.cell);
      known = k;
    }
    if (known) {
      for (const auto& d : reply.echo) known->insert(d.cell);
    }
    for (const auto& m : reply.motivational_answers) values[m.attribute] = m.preference;
    for (const auto& i : reply.inferential_answers)
      if (i.chosen) choice = i.proposal;
  }

  bool complete() const {
    return known && choice &&
           std::all_of(values.begin(), values.end(), [](const auto& v) { return v.has_value(); });
  }

  CellSet plan(const PersuaderView& view) const {
    if (!complete()) throw Error(ErrorCode::kInvalidArgument, "target model incomplete");
    ValueFunction vf;
    for (int a = 0; a < kNumAttributes; ++a) vf.weights[a] = *values[a];
    return plan_bruteforce(KnowledgeState{*known, {*choice}}, vf, view.matrix, view.goal);
  }
};

inline ActionMessage appeal_all(bool informational, bool motivational, bool inferential) {
  ActionMessage a;
  if (informational) a.appeals.informational = CellSet::all();
  if (motivational) a.appeals.motivational = IndexSet::all();
  if (inferential) a.appeals.inferential = IndexSet::all();
  return a;
}

}  // namespace detail

/// Asks about everything, asks for the ranking, then discloses the minimal
/// winning set and idles.
class ScriptedPerfectPersuader final : public Persuader {
 public:
  std::string kind() const override { return "scripted"; }

  PersuaderMessage step(const PersuaderContext& ctx) override {
    ActionMessage action;
    if (ctx.turn == 1) {
      model_ = {};
      model_.seed_from(ctx.view);
      action = detail::appeal_all(true, true, false);
    } else if (ctx.turn == 2) {
      action = detail::appeal_all(false, false, true);
    } else if (ctx.turn == 3) {
      action = disclose_cells(ctx.view.matrix, model_.plan(ctx.view));
    }
    asked_ = action.appeals.informational;
    return detail::built_in_message(std::move(action), ctx);
  }

  void observe(const TargetReply& reply) override { model_.learn(reply, asked_); }

 private:
  detail::TargetModel model_;
  CellSet asked_;
};

/// Discloses the minimal winning set as early as possible: on turn 1 when
/// the target is visible, otherwise right after one round of appeals.
class BruteForcePersuader final : public Persuader {
 public:
  std::string kind() const override { return "bruteforce"; }

  PersuaderMessage step(const PersuaderContext& ctx) override {
    if (ctx.turn == 1) {
      model_ = {};
      model_.seed_from(ctx.view);
      done_ = false;
    }
    ActionMessage action;
    if (!done_) {
      if (model_.complete()) {
        action = disclose_cells(ctx.view.matrix, model_.plan(ctx.view));
        done_ = true;
      } else {
        action = detail::appeal_all(true, true, true);
      }
    }
    asked_ = action.appeals.informational;
    return detail::built_in_message(std::move(action), ctx);
  }

  void observe(const TargetReply& reply) override { model_.learn(reply, asked_); }

 private:
  detail::TargetModel model_;
  CellSet asked_;
  bool done_ = false;
};

// ---------------------------------------------------------------------------
// Model persuaders

/// Splits a chain-of-thought completion at the first "---".
inline PersuaderMessage split_completion(std::string completion) {
  PersuaderMessage m;
  m.raw_completion = std::move(completion);
  const std::string_view raw = m.raw_completion;
  if (detail::trim(raw).empty()) throw Error(ErrorCode::kEmptyCompletion, "empty completion");
  const auto pos = raw.find("---");
  if (pos == std::string_view::npos) {
    m.format_violation = true;
    m.text = truncate_chars(detail::trim(raw));
  } else {
    m.chain_of_thought = std::string(detail::trim(raw.substr(0, pos)));
    m.text = truncate_chars(detail::trim(raw.substr(pos + 3)));
  }
  return m;
}

inline PersuaderMessage model_persuader_step(const std::string& prompt, ModelClient& client) {
  std::string completion;
  try {
    completion = client.complete(prompt);
  } catch (const Error& e) {
    if (e.code() == ErrorCode::kModelUnavailable) throw;
    throw Error(ErrorCode::kModelUnavailable, e.what());
  } catch (const std::exception& e) {
    throw Error(ErrorCode::kModelUnavailable, e.what());
  }
  return split_completion(std::move(completion));
}

struct PromptOptions {
  /// Model persuaders see the response-format section; people do not.
  bool include_response_format = true;
};

namespace detail {

inline std::string speaker_label(Speaker s, const Scenario& scenario) {
  if (s == Speaker::kPersuader) return "You";
  return scenario.flavor == Flavor::kMental ? "Other player" : "System";
}

inline std::string render_history(const std::vector<ChatMessage>& history, const Scenario& s) {
  std::string out;
  for (const auto& m : history) out += "**" + speaker_label(m.speaker, s) + ":** " + m.text + "\n\n";
  return out;
}

/// The demonstration instance: the worked example moved into `scenario` and
/// relabeled so its matrix differs from `avoid`.
inline Instance demo_instance(const Scenario& scenario, const UtilityMatrix& avoid) {
  Instance base = canonical_example_instance();
  base.scenario = scenario;
  std::array<int, kNumProposals> pp{0, 1, 2};
  do {
    std::array<int, kNumAttributes> ap{0, 1, 2};
    do {
      Instance cand = relabel(base, pp, ap);
      if (cand.matrix != avoid) {
        cand.id = "demo";
        return cand;
      }
    } while (std::next_permutation(ap.begin(), ap.end()));
  } while (std::next_permutation(pp.begin(), pp.end()));
  throw Error(ErrorCode::kInvalidArgument, "no distinct demonstration payoffs");
}

}  // namespace detail

/// A full scripted game on a different payoff matrix, rendered as dialogue.
inline std::string render_perfect_game_demo(const PersuaderView& view) {
  const Instance demo = detail::demo_instance(view.scenario, view.matrix);
  ScriptedPerfectPersuader agent;
  KnowledgeState state = initial_state(demo);
  PersuaderContext ctx;
  ctx.view = render_persuader_view(demo, Condition::kHidden);
  std::vector<ChatMessage> dialogue;
  for (int turn = 1; turn <= kNumTurns; ++turn) {
    ctx.turn = turn;
    PersuaderMessage msg = agent.step(ctx);
    auto [next, reply] = respond(std::move(state), demo, *msg.structured);
    state = std::move(next);
    agent.observe(reply);
    dialogue.push_back({Speaker::kPersuader, msg.text});
    dialogue.push_back({Speaker::kTarget, reply.canned ? std::string(kFillerMessage) : reply.rendered_text});
  }
  std::string out = "### Example game\n\nAn example of a game played well, on a different round:\n\n";
  out += detail::render_history(dialogue, view.scenario);
  return out;
}

inline std::string assemble_prompt(const PersuaderView& view, Variant variant,
                                   const std::vector<ChatMessage>& history,
                                   const PromptOptions& options = {}) {
  check_variant(view.scenario, variant);
  std::string out(variant == Variant::kNonMental ? kNonMentalInstructionsPrompt : kInstructionsPrompt);
  if (options.include_response_format) out += std::string(kResponseFormatSection);
  if (!out.ends_with('\n')) out += '\n';
  out += "\n" + render_view_text(view);
  switch (variant) {
    case Variant::kAddHint: out += "\n" + std::string(kHintPrompt) + "\n"; break;
    case Variant::kPerfectGame: out += "\n" + render_perfect_game_demo(view); break;
    case Variant::kDiscreteGame: out += "\n" + fill_template(kDiscreteGamePrompt) + "\n"; break;
    case Variant::kDefault:
    case Variant::kNonMental: break;
  }
  out += "\n### Conversation\n\n";
  out += history.empty() ? std::string("(You send the first message.)\n")
                         : detail::render_history(history, view.scenario);
  return out;
}

inline std::string assemble_prompt(const Instance& instance, Condition condition, Variant variant,
                                   const std::vector<ChatMessage>& history,
                                   const PromptOptions& options = {}) {
  return assemble_prompt(render_persuader_view(instance, condition), variant, history, options);
}

class ModelPersuader final : public Persuader {
 public:
  ModelPersuader(std::shared_ptr<ModelClient> client, std::string name = "model")
      : client_(std::move(client)), name_(std::move(name)) {}

  std::string kind() const override { return name_; }

  PersuaderMessage step(const PersuaderContext& ctx) override {
    std::string prompt = assemble_prompt(ctx.view, ctx.variant, ctx.history);
    if (!ctx.rejection_feedback.empty())
      prompt += "\nYour last message was rejected: " + ctx.rejection_feedback + "\n";
    return model_persuader_step(prompt, *client_);
  }

 private:
  std::shared_ptr<ModelClient> client_;
  std::string name_;
};

}  // namespace mindgames
