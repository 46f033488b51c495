#pragma once

// The referee: runs the eight-turn dialogue between a persuader and the
// target, classifies and validates each persuader message, and records a
// replayable transcript. Also sink-state detection and the Monte Carlo
// random baseline.

#include <algorithm>
#include <atomic>
#include <memory>
#include <optional>
#include <random>
#include <set>
#include <string>
#include <thread>
#include <tuple>
#include <vector>

#include "mindgames/persuaders.hpp"
#include "mindgames/protocol.hpp"
#include "mindgames/target.hpp"
#include "mindgames/view.hpp"

namespace mindgames {

// ---------------------------------------------------------------------------
// Sink states

namespace detail {

/// Future choices depend on the known cells, the current choice and the
/// order in which proposals first became incumbent.
inline std::tuple<std::uint16_t, int, std::vector<int>> sink_key(const KnowledgeState& s) {
  std::vector<int> order;
  for (int p : s.incumbency)
    if (std::find(order.begin(), order.end(), p) == order.end()) order.push_back(p);
  return {s.known.bits(), s.current_choice(), std::move(order)};
}

inline bool goal_reachable(const KnowledgeState& state, const Instance& instance,
                           std::set<std::tuple<std::uint16_t, int, std::vector<int>>>& dead) {
  if (state.current_choice() == instance.goal) return true;
  auto key = sink_key(state);
  if (dead.contains(key)) return false;
  const std::uint16_t rest = state.known.complement().bits();
  for (std::uint16_t b = rest; b != 0; b = static_cast<std::uint16_t>((b - 1) & rest)) {
    const KnowledgeState next =
        simulate_disclosure(state, instance.matrix, instance.values, CellSet(b));
    if (goal_reachable(next, instance, dead)) return true;
  }
  dead.insert(std::move(key));
  return false;
}

}  // namespace detail

/// True iff no sequence of truthful messages, each disclosing any batch of
/// the still-unknown cells, leaves the target choosing the goal.
inline bool detect_sink_state(const KnowledgeState& state, const Instance& instance) {
  std::set<std::tuple<std::uint16_t, int, std::vector<int>>> dead;
  return !detail::goal_reachable(state, instance, dead);
}

// ---------------------------------------------------------------------------
// Transcripts

struct Rejection {
  std::string text;
  ErrorCode reason = ErrorCode::kValidationRejected;
  std::string detail;

  friend bool operator==(const Rejection&, const Rejection&) = default;
};

struct TurnRecord {
  int turn = 0;
  std::string persuader_text;
  std::string chain_of_thought;
  std::string raw_completion;
  bool format_violation = false;
  std::vector<Rejection> rejections;
  bool forfeited = false;  // every attempt rejected; recorded as an empty action
  ActionMessage action;
  TargetReply reply;
  std::string reply_text;  // as sent over the channel
  KnowledgeState state;    // after this turn
  bool success_so_far = false;
  bool sink_state = false;

  friend bool operator==(const TurnRecord&, const TurnRecord&) = default;
};

struct GameOutcome {
  bool success = false;
  int final_choice = 0;

  friend bool operator==(const GameOutcome&, const GameOutcome&) = default;
};

struct GameTranscript {
  Instance instance;
  Condition condition = Condition::kHidden;
  Variant variant = Variant::kDefault;
  Channel channel = Channel::kNaturalLanguage;
  std::string persuader_kind;
  std::vector<TurnRecord> turns;
  std::optional<GameOutcome> outcome;  // set once all turns are played
  std::optional<int> first_success_turn;

  friend bool operator==(const GameTranscript&, const GameTranscript&) = default;
};

struct GameOptions {
  Condition condition = Condition::kHidden;
  Variant variant = Variant::kDefault;
  Channel channel = Channel::kNaturalLanguage;
  ValidationOptions validation;
  int max_retries = 2;             // extra attempts after a rejected message
  int classifier_retries = 2;      // extra attempts after a classifier failure
  bool track_sink_state = true;
};

// ---------------------------------------------------------------------------
// Referee

/// One game, advanced one persuader message at a time. Rejected messages do
/// not consume a turn.
class Referee {
 public:
  struct Submission {
    bool accepted = false;
    std::optional<Rejection> rejection;
  };

  Referee(Instance instance, GameOptions options, std::shared_ptr<Classifier> classifier = nullptr)
      : options_(options), classifier_(std::move(classifier)) {
    check_variant(instance.scenario, options_.variant);
    if (options_.variant == Variant::kDiscreteGame) options_.channel = Channel::kDiscrete;
    if (!classifier_) classifier_ = std::make_shared<TemplateClassifier>();
    state_ = initial_state(instance);
    view_ = render_persuader_view(instance, options_.condition);
    transcript_.instance = std::move(instance);
    transcript_.condition = options_.condition;
    transcript_.variant = options_.variant;
    transcript_.channel = options_.channel;
  }

  const GameOptions& options() const { return options_; }
  const PersuaderView& view() const { return view_; }
  const Instance& instance() const { return transcript_.instance; }
  const KnowledgeState& state() const { return state_; }
  const std::vector<ChatMessage>& history() const { return history_; }
  const GameTranscript& transcript() const { return transcript_; }
  GameTranscript& transcript() { return transcript_; }
  int turns_played() const { return static_cast<int>(transcript_.turns.size()); }
  int next_turn() const { return turns_played() + 1; }
  bool finished() const { return turns_played() >= kNumTurns; }

  /// Classifies and validates `message`. Accepted messages are applied and
  /// consume a turn; rejections are recorded for the pending turn.
  Submission submit(const PersuaderMessage& message) {
    if (finished()) throw Error(ErrorCode::kSessionFinished, "all turns have been played");
    Submission result;
    ActionMessage action;
    try {
      action = classify(message);
    } catch (const Error& e) {
      if (e.code() != ErrorCode::kMalformedAction && e.code() != ErrorCode::kUnknownName &&
          e.code() != ErrorCode::kBadUtility)
        throw;
      result.rejection = Rejection{message.text, e.code(), e.what()};
    }
    if (!result.rejection) {
      const ValidationResult v =
          validate_persuader_message(action, transcript_.instance, message.text, options_.validation);
      if (!v) result.rejection = Rejection{message.text, v.reason, v.detail};
    }
    if (result.rejection) {
      pending_rejections_.push_back(*result.rejection);
      return result;
    }
    apply(message, std::move(action), false);
    result.accepted = true;
    return result;
  }

  /// Ends the pending turn with an empty action after repeated rejections.
  void forfeit_turn() {
    if (finished()) throw Error(ErrorCode::kSessionFinished, "all turns have been played");
    PersuaderMessage empty;
    if (!pending_rejections_.empty()) empty.text = pending_rejections_.back().text;
    apply(empty, ActionMessage{}, true);
  }

  const std::vector<Rejection>& pending_rejections() const { return pending_rejections_; }

  PersuaderContext context() const {
    PersuaderContext ctx;
    ctx.view = view_;
    ctx.variant = options_.variant;
    ctx.channel = options_.channel;
    ctx.turn = next_turn();
    ctx.history = history_;
    if (!transcript_.turns.empty()) ctx.last_reply = transcript_.turns.back().reply;
    if (!pending_rejections_.empty()) ctx.rejection_feedback = pending_rejections_.back().detail;
    return ctx;
  }

 private:
  ActionMessage classify(const PersuaderMessage& message) {
    switch (options_.channel) {
      case Channel::kStructured:
        if (message.structured) return *message.structured;
        [[fallthrough]];
      case Channel::kNaturalLanguage: {
        std::vector<ChatMessage> h = history_;
        h.push_back({Speaker::kPersuader, truncate_chars(message.text)});
        for (int attempt = 0;; ++attempt) {
          try {
            return classifier_->classify(h, transcript_.instance.scenario);
          } catch (const Error& e) {
            const bool transient = e.code() == ErrorCode::kClassifierUnavailable ||
                                   e.code() == ErrorCode::kClassifierParseError;
            if (!transient) throw;
            if (attempt >= options_.classifier_retries)
              throw Error(ErrorCode::kSessionAborted, std::string("classifier failed: ") + e.what());
          }
        }
      }
      case Channel::kDiscrete:
        return parse_discrete_action(message.text, transcript_.instance.scenario);
    }
    return {};
  }

  void apply(const PersuaderMessage& message, ActionMessage action, bool forfeited) {
    const Instance& in = transcript_.instance;
    auto [next, reply] = respond(std::move(state_), in, action);
    state_ = std::move(next);

    TurnRecord rec;
    rec.turn = next_turn();
    // The length cap is for chat prose; discrete actions are recorded whole.
    rec.persuader_text = options_.channel == Channel::kDiscrete ? message.text : truncate_chars(message.text);
    rec.chain_of_thought = message.chain_of_thought;
    rec.raw_completion = message.raw_completion;
    rec.format_violation = message.format_violation;
    rec.rejections = std::move(pending_rejections_);
    pending_rejections_.clear();
    rec.forfeited = forfeited;
    rec.action = std::move(action);
    rec.reply_text = options_.channel == Channel::kDiscrete
                         ? serialize_target_reply(reply, ReplyMode::kDiscrete, in.scenario)
                         : reply.rendered_text;
    rec.reply = std::move(reply);
    rec.state = state_;
    if (!transcript_.first_success_turn && state_.current_choice() == in.goal)
      transcript_.first_success_turn = rec.turn;
    rec.success_so_far = transcript_.first_success_turn.has_value();
    rec.sink_state = options_.track_sink_state && detect_sink_state(state_, in);

    history_.push_back({Speaker::kPersuader, rec.persuader_text});
    history_.push_back({Speaker::kTarget, rec.reply_text});
    transcript_.turns.push_back(std::move(rec));
    if (finished()) {
      const int choice = final_choice(state_);
      transcript_.outcome = GameOutcome{choice == in.goal, choice};
    }
  }

  GameOptions options_;
  std::shared_ptr<Classifier> classifier_;
  KnowledgeState state_;
  PersuaderView view_;
  std::vector<ChatMessage> history_;
  std::vector<Rejection> pending_rejections_;
  GameTranscript transcript_;
};

/// Plays all eight turns. Persuader errors are retried within the budget and
/// abort the game beyond it.
inline GameTranscript run_game(const Instance& instance, Persuader& persuader,
                               const GameOptions& options = {},
                               std::shared_ptr<Classifier> classifier = nullptr) {
  Referee referee(instance, options, std::move(classifier));
  referee.transcript().persuader_kind = persuader.kind();
  while (!referee.finished()) {
    bool accepted = false;
    for (int attempt = 0; attempt <= options.max_retries && !accepted; ++attempt) {
      PersuaderMessage message;
      try {
        message = persuader.step(referee.context());
      } catch (const Error& e) {
        if (attempt >= options.max_retries)
          throw Error(ErrorCode::kSessionAborted, std::string("persuader failed: ") + e.what());
        continue;
      }
      accepted = referee.submit(message).accepted;
    }
    if (!accepted) referee.forfeit_turn();
    persuader.observe(referee.transcript().turns.back().reply);
  }
  return referee.transcript();
}

// ---------------------------------------------------------------------------
// Replay

struct ReplayResult {
  bool identical = true;
  std::optional<int> first_mismatch_turn;
  GameTranscript replayed;
};

/// Feeds the recorded persuader texts through a fresh referee and compares
/// the target's replies byte for byte.
inline ReplayResult replay_transcript(const GameTranscript& original,
                                      std::shared_ptr<Classifier> classifier = nullptr,
                                      ValidationOptions validation = {}) {
  GameOptions options;
  options.condition = original.condition;
  options.variant = original.variant;
  options.channel = original.channel == Channel::kStructured ? Channel::kNaturalLanguage
                                                             : original.channel;
  options.validation = validation;
  Referee referee(original.instance, options, std::move(classifier));
  referee.transcript().persuader_kind = original.persuader_kind;
  ReplayResult result;
  for (const auto& turn : original.turns) {
    if (referee.finished()) break;
    PersuaderMessage m;
    m.text = turn.persuader_text;
    m.chain_of_thought = turn.chain_of_thought;
    m.raw_completion = turn.raw_completion;
    m.format_violation = turn.format_violation;
    if (turn.forfeited || !referee.submit(m).accepted) {
      while (!referee.finished() && referee.turns_played() < turn.turn) referee.forfeit_turn();
    }
    const auto& got = referee.transcript().turns.back();
    if (got.reply_text != turn.reply_text && !result.first_mismatch_turn) {
      result.identical = false;
      result.first_mismatch_turn = turn.turn;
    }
  }
  if (referee.turns_played() != static_cast<int>(original.turns.size())) result.identical = false;
  result.replayed = referee.transcript();
  result.replayed.channel = original.channel;
  return result;
}

// ---------------------------------------------------------------------------
// Monte Carlo baseline

struct RateEstimate {
  double rate = 0;
  double ci_low = 0;
  double ci_high = 0;
  std::uint64_t trials = 0;
  std::uint64_t successes = 0;
};

/// Percentile bootstrap for a proportion: resampling games is a binomial draw.
inline RateEstimate binomial_bootstrap(std::uint64_t successes, std::uint64_t trials,
                                       int resamples = 10000, std::uint64_t seed = 0) {
  RateEstimate r;
  r.trials = trials;
  r.successes = successes;
  if (trials == 0) return r;
  r.rate = static_cast<double>(successes) / static_cast<double>(trials);
  std::mt19937_64 rng(seed);
  std::binomial_distribution<std::uint64_t> draw(trials, r.rate);
  std::vector<double> stats(static_cast<std::size_t>(resamples));
  for (auto& s : stats) s = static_cast<double>(draw(rng)) / static_cast<double>(trials);
  std::sort(stats.begin(), stats.end());
  if (stats.empty()) {
    r.ci_low = r.ci_high = r.rate;
    return r;
  }
  const auto at = [&](double q) {
    const auto i = static_cast<std::size_t>(q * static_cast<double>(stats.size() - 1) + 0.5);
    return stats[std::min(i, stats.size() - 1)];
  };
  r.ci_low = at(0.025);
  r.ci_high = at(0.975);
  return r;
}

struct BaselineOptions {
  int n = 6;
  std::uint64_t trials = 50000;
  std::uint64_t seed = 0;
  BaselineSchedule schedule = BaselineSchedule::kSingleTurn;
  int bootstrap_resamples = 10000;
  unsigned threads = 0;  // 0: hardware concurrency
};

/// Trial i plays instance i mod |instances| with the baseline seeded by
/// seed + i, so results do not depend on the thread count.
inline RateEstimate monte_carlo_baseline(const std::vector<Instance>& instances,
                                         const BaselineOptions& options) {
  if (instances.empty()) throw Error(ErrorCode::kEmptyInput, "no instances");
  if (options.trials == 0) throw Error(ErrorCode::kInvalidArgument, "trials must be >= 1");
  GameOptions game;
  game.condition = Condition::kHidden;
  game.channel = Channel::kStructured;
  game.track_sink_state = false;
  const auto classifier = std::make_shared<TemplateClassifier>();

  unsigned threads = options.threads ? options.threads : std::thread::hardware_concurrency();
  threads = std::max(1U, std::min<unsigned>(threads, static_cast<unsigned>(options.trials)));
  std::atomic<std::uint64_t> successes{0};
  std::atomic<std::uint64_t> next{0};
  auto worker = [&] {
    std::uint64_t local = 0;
    for (std::uint64_t i; (i = next.fetch_add(1)) < options.trials;) {
      RandomBaselinePersuader agent(options.n, options.seed + i, options.schedule);
      const auto t = run_game(instances[i % instances.size()], agent, game, classifier);
      if (t.outcome && t.outcome->success) ++local;
    }
    successes += local;
  };
  std::vector<std::thread> pool;
  for (unsigned k = 1; k < threads; ++k) pool.emplace_back(worker);
  worker();
  for (auto& t : pool) t.join();
  return binomial_bootstrap(successes.load(), options.trials, options.bootstrap_resamples,
                            options.seed);
}

}  // namespace mindgames
