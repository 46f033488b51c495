#pragma once

// Game sessions for interactive play: a registry of referees that people or
// server-side agents drive one message at a time, with persuader-safe state
// payloads, an event feed for live clients and durable transcript storage.

#include <chrono>
#include <condition_variable>
#include <filesystem>
#include <functional>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <random>
#include <shared_mutex>
#include <sstream>
#include <string>
#include <vector>

#include "mindgames/game.hpp"
#include "mindgames/io.hpp"
#include "mindgames/persuaders.hpp"

namespace mindgames {

enum class PersuaderKind { kHuman, kModel, kRandom, kScriptedPerfect, kBruteForce };

inline std::string_view to_string(PersuaderKind k) {
  switch (k) {
    case PersuaderKind::kHuman: return "human";
    case PersuaderKind::kModel: return "model";
    case PersuaderKind::kRandom: return "random";
    case PersuaderKind::kScriptedPerfect: return "scripted_perfect";
    case PersuaderKind::kBruteForce: return "bruteforce";
  }
  return "";
}

inline PersuaderKind persuader_kind_from_string(std::string_view s) {
  for (auto k : {PersuaderKind::kHuman, PersuaderKind::kModel, PersuaderKind::kRandom,
                 PersuaderKind::kScriptedPerfect, PersuaderKind::kBruteForce})
    if (to_string(k) == s) return k;
  throw Error(ErrorCode::kBadConfig, "unknown persuader '" + std::string(s) + "'");
}

enum class ClassifierBinding { kTemplate, kModel };

struct SessionConfig {
  std::optional<std::string> instance_id;  // otherwise sampled from the pool
  std::uint64_t sample_seed = 0;
  Condition condition = Condition::kHidden;
  Variant variant = Variant::kDefault;
  PersuaderKind persuader = PersuaderKind::kHuman;
  ClassifierBinding classifier = ClassifierBinding::kTemplate;
  bool human_checks = true;  // minimum length for human messages
  int baseline_n = 6;
  std::uint64_t baseline_seed = 0;
};

inline SessionConfig session_config_from_json(const Json& j) {
  SessionConfig c;
  try {
    if (j.contains("instance_id") && !j.at("instance_id").is_null())
      c.instance_id = j.at("instance_id").get<std::string>();
    c.sample_seed = j.value("sample_seed", std::uint64_t{0});
    c.condition = condition_from_string(j.value("condition", std::string("Hidden")));
    c.variant = variant_from_string(j.value("variant", std::string("default")));
    c.persuader = persuader_kind_from_string(j.value("persuader", std::string("human")));
    const std::string cls = j.value("classifier", std::string("template"));
    if (cls != "template" && cls != "model") throw Error(ErrorCode::kBadConfig, "unknown classifier '" + cls + "'");
    c.classifier = cls == "model" ? ClassifierBinding::kModel : ClassifierBinding::kTemplate;
    c.human_checks = j.value("human_checks", true);
    c.baseline_n = j.value("baseline_n", 6);
    c.baseline_seed = j.value("baseline_seed", std::uint64_t{0});
  } catch (const Error& e) {
    if (e.code() == ErrorCode::kBadConfig) throw;
    throw Error(ErrorCode::kBadConfig, e.what());
  } catch (const Json::exception& e) {
    throw Error(ErrorCode::kBadConfig, e.what());
  }
  return c;
}

/// Raised when a message fails validation; the turn is not consumed.
class ValidationRejectedError : public Error {
 public:
  explicit ValidationRejectedError(Rejection r)
      : Error(ErrorCode::kValidationRejected, std::string(to_string(r.reason)) + ": " + r.detail),
        rejection_(std::move(r)) {}
  const Rejection& rejection() const { return rejection_; }

 private:
  Rejection rejection_;
};

struct SessionDeps {
  std::vector<Instance> instances;
  std::optional<std::filesystem::path> storage_dir;
  /// Required for model persuaders and the model classifier binding.
  std::function<std::shared_ptr<ModelClient>()> model_factory;
};

class SessionManager {
 public:
  explicit SessionManager(SessionDeps deps) : deps_(std::move(deps)) {
    if (deps_.storage_dir) {
      std::filesystem::create_directories(*deps_.storage_dir);
      log_ = std::make_unique<TranscriptLog>((*deps_.storage_dir / "transcripts.ndjson").string());
    }
  }

  std::string create(const SessionConfig& config) {
    const Instance instance = pick_instance(config);
    try {
      check_variant(instance.scenario, config.variant);
    } catch (const Error& e) {
      throw Error(ErrorCode::kBadConfig, e.what());
    }
    if (config.persuader == PersuaderKind::kHuman && config.variant == Variant::kDiscreteGame)
      throw Error(ErrorCode::kBadConfig, "people play in natural language only");

    GameOptions options;
    options.condition = config.condition;
    options.variant = config.variant;
    options.channel = config.variant == Variant::kDiscreteGame ? Channel::kDiscrete
                                                               : Channel::kNaturalLanguage;
    options.validation.human_checks = config.persuader == PersuaderKind::kHuman && config.human_checks;

    auto session = std::make_shared<Session>();
    session->config = config;
    session->referee = std::make_unique<Referee>(instance, options, make_classifier(config));
    session->agent = make_agent(config);
    session->referee->transcript().persuader_kind =
        session->agent ? session->agent->kind() : std::string(to_string(config.persuader));

    std::unique_lock lock(registry_mutex_);
    std::string id;
    do {
      id = new_id();
    } while (sessions_.contains(id));
    session->id = id;
    sessions_.emplace(id, session);
    return id;
  }

  /// Persuader-safe snapshot of a session.
  Json get_state(const std::string& id) const {
    auto s = find(id);
    std::lock_guard lock(s->state_mutex);
    return state_payload(*s);
  }

  struct PostResult {
    Json reply;
    Json state;
  };

  /// A person's message. Throws ValidationRejectedError without consuming
  /// the turn, SessionFinished after eight turns, SessionBusy while another
  /// message of the same session is in flight.
  PostResult post_message(const std::string& id, const std::string& text) {
    auto s = find(id);
    std::unique_lock turn(s->turn_mutex, std::try_to_lock);
    if (!turn.owns_lock()) throw Error(ErrorCode::kSessionBusy, "a message is already in flight");
    if (s->agent) throw Error(ErrorCode::kBadConfig, "this session is played by an agent; use advance");
    PersuaderMessage m;
    m.text = text;
    return submit(*s, m);
  }

  /// Lets a server-side agent play its next turn.
  PostResult advance(const std::string& id) {
    auto s = find(id);
    std::unique_lock turn(s->turn_mutex, std::try_to_lock);
    if (!turn.owns_lock()) throw Error(ErrorCode::kSessionBusy, "a message is already in flight");
    if (!s->agent) throw Error(ErrorCode::kBadConfig, "this session is played by a person");
    {
      std::lock_guard lock(s->state_mutex);
      if (s->referee->finished()) throw Error(ErrorCode::kSessionFinished, "all turns have been played");
    }
    constexpr int kAttempts = 3;
    for (int attempt = 0; attempt < kAttempts; ++attempt) {
      PersuaderContext ctx;
      {
        std::lock_guard lock(s->state_mutex);
        ctx = s->referee->context();
      }
      PersuaderMessage m;
      try {
        m = s->agent->step(ctx);
      } catch (const Error& e) {
        if (attempt + 1 == kAttempts) throw Error(ErrorCode::kSessionAborted, e.what());
        continue;
      }
      try {
        PostResult r = submit(*s, m);
        return r;
      } catch (const ValidationRejectedError&) {
        if (attempt + 1 == kAttempts) break;
      }
    }
    std::lock_guard lock(s->state_mutex);
    s->referee->forfeit_turn();
    return after_turn(*s);
  }

  /// Events published after `since` (an index into the session's feed),
  /// waiting up to `timeout` for at least one.
  std::vector<std::string> events_since(const std::string& id, std::size_t since,
                                        std::chrono::milliseconds timeout) const {
    auto s = find(id);
    std::unique_lock lock(s->state_mutex);
    s->events_cv.wait_for(lock, timeout, [&] { return s->events.size() > since; });
    if (since >= s->events.size()) return {};
    return {s->events.begin() + static_cast<std::ptrdiff_t>(since), s->events.end()};
  }

  bool finished(const std::string& id) const {
    auto s = find(id);
    std::lock_guard lock(s->state_mutex);
    return s->referee->finished();
  }

  GameTranscript transcript(const std::string& id) const {
    auto s = find(id);
    std::lock_guard lock(s->state_mutex);
    return s->referee->transcript();
  }

  /// Finished games as newline-delimited records behind a header line.
  std::string export_transcripts(const TranscriptFilter& filter = {}) const {
    std::vector<GameTranscript> games;
    if (log_) {
      games = load_transcripts(log_->path());
    } else {
      std::shared_lock lock(registry_mutex_);
      for (const auto& [_, s] : sessions_) {
        std::lock_guard slock(s->state_mutex);
        if (s->referee->finished()) games.push_back(s->referee->transcript());
      }
    }
    std::ostringstream out;
    write_transcripts(out, games, filter);
    return out.str();
  }

  std::vector<std::string> instance_ids() const {
    std::vector<std::string> ids;
    for (const auto& in : deps_.instances) ids.push_back(in.id);
    return ids;
  }

 private:
  struct Session {
    std::string id;
    SessionConfig config;
    std::unique_ptr<Referee> referee;
    std::unique_ptr<Persuader> agent;
    mutable std::mutex turn_mutex;   // one in-flight message
    mutable std::mutex state_mutex;  // referee and event feed
    mutable std::condition_variable events_cv;
    std::vector<std::string> events;
  };

  std::shared_ptr<Session> find(const std::string& id) const {
    std::shared_lock lock(registry_mutex_);
    const auto it = sessions_.find(id);
    if (it == sessions_.end()) throw Error(ErrorCode::kUnknownSession, "no session '" + id + "'");
    return it->second;
  }

  Instance pick_instance(const SessionConfig& config) const {
    if (deps_.instances.empty()) throw Error(ErrorCode::kBadConfig, "no instances loaded");
    if (config.instance_id) {
      for (const auto& in : deps_.instances)
        if (in.id == *config.instance_id) return in;
      throw Error(ErrorCode::kBadConfig, "unknown instance '" + *config.instance_id + "'");
    }
    std::mt19937_64 rng(config.sample_seed);
    std::uniform_int_distribution<std::size_t> pick(0, deps_.instances.size() - 1);
    return deps_.instances[pick(rng)];
  }

  std::shared_ptr<Classifier> make_classifier(const SessionConfig& config) const {
    if (config.classifier == ClassifierBinding::kTemplate) return std::make_shared<TemplateClassifier>();
    if (!deps_.model_factory) throw Error(ErrorCode::kBadConfig, "no model endpoint configured");
    return std::make_shared<ModelClassifier>(deps_.model_factory());
  }

  std::unique_ptr<Persuader> make_agent(const SessionConfig& config) const {
    switch (config.persuader) {
      case PersuaderKind::kHuman: return nullptr;
      case PersuaderKind::kRandom:
        return std::make_unique<RandomBaselinePersuader>(config.baseline_n, config.baseline_seed);
      case PersuaderKind::kScriptedPerfect: return std::make_unique<ScriptedPerfectPersuader>();
      case PersuaderKind::kBruteForce: return std::make_unique<BruteForcePersuader>();
      case PersuaderKind::kModel:
        if (!deps_.model_factory) throw Error(ErrorCode::kBadConfig, "no model endpoint configured");
        return std::make_unique<ModelPersuader>(deps_.model_factory());
    }
    return nullptr;
  }

  PostResult submit(Session& s, const PersuaderMessage& m) {
    std::lock_guard lock(s.state_mutex);
    const Referee::Submission sub = s.referee->submit(m);
    if (!sub.accepted) throw ValidationRejectedError(*sub.rejection);
    return after_turn(s);
  }

  /// Caller holds `state_mutex`.
  PostResult after_turn(Session& s) {
    const TurnRecord& turn = s.referee->transcript().turns.back();
    if (s.agent) s.agent->observe(turn.reply);
    PostResult r;
    r.reply = {{"turn", turn.turn}, {"text", turn.reply_text}};
    r.state = state_payload(s);
    s.events.push_back(Json{{"type", "turn"}, {"reply", r.reply}, {"state", r.state}}.dump());
    s.events_cv.notify_all();
    if (s.referee->finished() && log_) log_->append(s.referee->transcript());
    return r;
  }

  static Json state_payload(const Session& s) {
    const Referee& ref = *s.referee;
    const PersuaderView& view = ref.view();
    const Scenario& sc = view.scenario;
    Json matrix = Json::array();
    for (int p = 0; p < kNumProposals; ++p) {
      Json row = Json::array();
      for (int a = 0; a < kNumAttributes; ++a) row.push_back(to_int(view.matrix.at({p, a})));
      matrix.push_back(row);
    }
    Json v = {{"scenario",
               {{"id", sc.id},
                {"cover_story", sc.cover_story},
                {"proposals", sc.proposal_names},
                {"attributes", sc.attribute_names}}},
              {"matrix", matrix},
              {"goal", sc.proposal_names[view.goal]},
              {"text", render_view_text(view)}};
    if (view.target) {
      Json values = Json::array();
      for (auto w : view.target->values.weights) values.push_back(to_int(w));
      v["target"] = {{"known", detail::disclosures_json(view.target->known_cells)},
                     {"values", values},
                     {"current_choice", sc.proposal_names[view.target->current_choice]}};
    }
    Json history = Json::array();
    for (const auto& m : ref.history())
      history.push_back({{"speaker", m.speaker == Speaker::kPersuader ? "persuader" : "target"},
                         {"text", m.text}});
    Json out = {{"session_id", s.id},
                {"condition", to_string(ref.options().condition)},
                {"variant", to_string(ref.options().variant)},
                {"persuader", to_string(s.config.persuader)},
                {"turn", ref.turns_played()},
                {"max_turns", kNumTurns},
                {"finished", ref.finished()},
                {"view", v},
                {"history", history}};
    if (const auto& o = ref.transcript().outcome)
      out["outcome"] = {{"success", o->success}, {"final_choice", sc.proposal_names[o->final_choice]}};
    return out;
  }

  std::string new_id() {
    std::uniform_int_distribution<std::uint64_t> d;
    char buf[24];
    std::snprintf(buf, sizeof buf, "s%016llx", static_cast<unsigned long long>(d(id_rng_)));
    return buf;
  }

  SessionDeps deps_;
  std::unique_ptr<TranscriptLog> log_;
  mutable std::shared_mutex registry_mutex_;
  std::map<std::string, std::shared_ptr<Session>> sessions_;
  std::mt19937_64 id_rng_{std::random_device{}()};
};

}  // namespace mindgames
