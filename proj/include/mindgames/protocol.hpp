#pragma once

// Message formats between persuader and target: the structured (discrete)
// action codec, canonical natural-language phrasings, the classifiers that
// turn persuader text into actions, and referee-side validation.

#include <algorithm>
#include <array>
#include <cctype>
#include <cstring>
#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "json.hpp"
#include "mindgames/action.hpp"
#include "mindgames/prompts.hpp"
#include "mindgames/target.hpp"
#include "mindgames/text.hpp"

namespace mindgames {

using Json = nlohmann::ordered_json;

/// Truncates to at most `max_chars` UTF-8 code points.
inline std::string truncate_chars(std::string_view text, std::size_t max_chars = kMaxMessageChars) {
  std::size_t chars = 0;
  for (std::size_t i = 0; i < text.size(); ++i) {
    const auto byte = static_cast<unsigned char>(text[i]);
    if ((byte & 0xC0) != 0x80) {
      if (chars == max_chars) return std::string(text.substr(0, i));
      ++chars;
    }
  }
  return std::string(text);
}

inline std::size_t count_chars(std::string_view text) {
  return static_cast<std::size_t>(std::count_if(text.begin(), text.end(), [](char c) {
    return (static_cast<unsigned char>(c) & 0xC0) != 0x80;
  }));
}

namespace detail {

inline std::string lower(std::string_view s) {
  std::string out(s);
  for (char& c : out) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  return out;
}

inline std::string_view trim(std::string_view s) {
  const auto is_space = [](char c) { return std::isspace(static_cast<unsigned char>(c)) != 0; };
  while (!s.empty() && is_space(s.front())) s.remove_prefix(1);
  while (!s.empty() && is_space(s.back())) s.remove_suffix(1);
  return s;
}

template <std::size_t N>
std::optional<int> find_name(const std::array<std::string, N>& names, std::string_view candidate) {
  const std::string c = lower(trim(candidate));
  for (std::size_t i = 0; i < N; ++i)
    if (lower(names[i]) == c) return static_cast<int>(i);
  return std::nullopt;
}

inline std::string strip_code_fence(std::string_view text) {
  std::string_view t = trim(text);
  if (t.starts_with("```")) {
    const auto nl = t.find('\n');
    t = nl == std::string_view::npos ? std::string_view{} : t.substr(nl + 1);
    const auto close = t.rfind("```");
    if (close != std::string_view::npos) t = t.substr(0, close);
  }
  return std::string(trim(t));
}

}  // namespace detail

// ---------------------------------------------------------------------------
// Structured actions

inline ActionMessage parse_discrete_action(std::string_view text, const Scenario& scenario) {
  Json doc;
  try {
    doc = Json::parse(detail::strip_code_fence(text));
  } catch (const Json::parse_error& e) {
    throw Error(ErrorCode::kMalformedAction, e.what());
  }
  ActionMessage action;
  if (doc.is_array() && doc.empty()) return action;
  if (!doc.is_object()) throw Error(ErrorCode::kMalformedAction, "expected a JSON object");

  const auto proposal = [&](const Json& v) {
    if (!v.is_string()) throw Error(ErrorCode::kMalformedAction, "proposal must be a string");
    const auto p = detail::find_name(scenario.proposal_names, v.get<std::string>());
    if (!p) throw Error(ErrorCode::kUnknownName, "proposal '" + v.get<std::string>() + "'");
    return *p;
  };
  const auto attribute = [&](const Json& v) {
    if (!v.is_string()) throw Error(ErrorCode::kMalformedAction, "attribute must be a string");
    const auto a = detail::find_name(scenario.attribute_names, v.get<std::string>());
    if (!a) throw Error(ErrorCode::kUnknownName, "attribute '" + v.get<std::string>() + "'");
    return *a;
  };
  const auto list = [&](const char* key) -> const Json& {
    static const Json empty = Json::array();
    if (!doc.contains(key)) return empty;
    const Json& v = doc.at(key);
    if (!v.is_array()) throw Error(ErrorCode::kMalformedAction, std::string(key) + " must be a list");
    return v;
  };
  for (const auto& [key, _] : doc.items()) {
    if (key != "motivational" && key != "informational" && key != "inferential" &&
        key != "disclosures")
      throw Error(ErrorCode::kMalformedAction, "unexpected key '" + key + "'");
  }

  for (const auto& v : list("motivational")) action.appeals.motivational.insert(attribute(v));
  for (const auto& v : list("inferential")) action.appeals.inferential.insert(proposal(v));
  for (const auto& v : list("informational")) {
    if (!v.is_object() || !v.contains("proposal") || !v.contains("attribute"))
      throw Error(ErrorCode::kMalformedAction, "informational entries need proposal and attribute");
    action.appeals.informational.insert(Cell{proposal(v.at("proposal")), attribute(v.at("attribute"))});
  }
  for (const auto& v : list("disclosures")) {
    if (!v.is_object() || !v.contains("proposal") || !v.contains("attribute") ||
        !v.contains("utility"))
      throw Error(ErrorCode::kMalformedAction, "disclosures need proposal, attribute and utility");
    const Json& u = v.at("utility");
    if (!u.is_number_integer()) throw Error(ErrorCode::kMalformedAction, "utility must be an integer");
    const auto effect = effect_from_int(u.get<long long>());
    if (!effect) throw Error(ErrorCode::kBadUtility, "utility " + u.dump() + " not in {-1, 0, 1}");
    action.add_disclosure({Cell{proposal(v.at("proposal")), attribute(v.at("attribute"))}, *effect});
  }
  return action;
}

inline std::string serialize_discrete_action(const ActionMessage& action, const Scenario& scenario) {
  Json doc = {{"motivational", Json::array()},
              {"informational", Json::array()},
              {"inferential", Json::array()},
              {"disclosures", Json::array()}};
  for (int a : action.appeals.motivational.items())
    doc["motivational"].push_back(scenario.attribute_names[a]);
  for (Cell c : action.appeals.informational.cells()) {
    doc["informational"].push_back({{"proposal", scenario.proposal_names[c.proposal]},
                                    {"attribute", scenario.attribute_names[c.attribute]}});
  }
  for (int p : action.appeals.inferential.items())
    doc["inferential"].push_back(scenario.proposal_names[p]);
  for (const auto& d : action.disclosures) {
    doc["disclosures"].push_back({{"proposal", scenario.proposal_names[d.cell.proposal]},
                                  {"attribute", scenario.attribute_names[d.cell.attribute]},
                                  {"utility", to_int(d.claimed_effect)}});
  }
  return doc.dump();
}

enum class ReplyMode { kNaturalLanguage, kDiscrete };

inline std::string serialize_target_reply(const TargetReply& reply, ReplyMode mode,
                                          const Scenario& scenario) {
  if (mode == ReplyMode::kNaturalLanguage) return render_reply_text(reply, scenario);
  Json doc = {{"motivational", Json::array()},
              {"informational", Json::array()},
              {"inferential", Json::array()}};
  for (const auto& m : reply.motivational_answers) {
    doc["motivational"].push_back(
        {{"attribute", scenario.attribute_names[m.attribute]}, {"utility", to_int(m.preference)}});
  }
  const auto add_info = [&](const Disclosure& d) {
    doc["informational"].push_back({{"proposal", scenario.proposal_names[d.cell.proposal]},
                                    {"attribute", scenario.attribute_names[d.cell.attribute]},
                                    {"utility", to_int(d.claimed_effect)}});
  };
  for (const auto& d : reply.echo) add_info(d);
  for (const auto& d : reply.informational_answers) add_info(d);
  for (const auto& i : reply.inferential_answers) {
    doc["inferential"].push_back({{"proposal", scenario.proposal_names[i.proposal]},
                                  {"utility", i.utility},
                                  {"chosen", i.chosen}});
  }
  return doc.dump();
}

// ---------------------------------------------------------------------------
// Canonical natural-language phrasings

inline constexpr std::string_view kAskAllKnowledge = "What do you know about the proposals?";
inline constexpr std::string_view kAskAllPreferences = "Which attributes do you like?";
inline constexpr std::string_view kAskRanking = "What is your preferred proposal?";
inline constexpr std::string_view kFillerMessage = "Okay.";

/// Renders an action with the phrasings the template classifier recognizes:
/// disclosures, then knowledge, preference and ranking questions.
inline std::string render_action_text(const ActionMessage& action, const Scenario& scenario) {
  std::vector<std::string> parts;
  if (!action.disclosures.empty()) parts.push_back(effect_sentences(action.disclosures, scenario));

  const CellSet info = action.appeals.informational;
  if (info == CellSet::all()) {
    parts.emplace_back(kAskAllKnowledge);
  } else {
    for (int p = 0; p < kNumProposals; ++p) {
      const CellSet row{{p, 0}, {p, 1}, {p, 2}};
      if ((info & row) == row) {
        parts.push_back("What do you know about proposal " + scenario.proposal_names[p] + "?");
        continue;
      }
      for (Cell c : (info & row).cells()) {
        parts.push_back("What do you know about the effect of proposal " +
                        scenario.proposal_names[c.proposal] + " on " +
                        scenario.attribute_names[c.attribute] + "?");
      }
    }
  }

  if (action.appeals.motivational == IndexSet::all()) {
    parts.emplace_back(kAskAllPreferences);
  } else {
    for (int a : action.appeals.motivational.items())
      parts.push_back("How do you feel about " + scenario.attribute_names[a] + "?");
  }

  if (action.appeals.inferential == IndexSet::all()) {
    parts.emplace_back(kAskRanking);
  } else {
    for (int p : action.appeals.inferential.items())
      parts.push_back("What is your utility for proposal " + scenario.proposal_names[p] + "?");
  }

  std::string out;
  for (const auto& p : parts) out += (out.empty() ? "" : " ") + p;
  return out;
}

// ---------------------------------------------------------------------------
// Classification

enum class Speaker { kPersuader, kTarget };

struct ChatMessage {
  Speaker speaker = Speaker::kPersuader;
  std::string text;

  friend bool operator==(const ChatMessage&, const ChatMessage&) = default;
};

/// Single entry point shared by model-backed persuaders and classifiers.
class ModelClient {
 public:
  virtual ~ModelClient() = default;
  virtual std::string complete(const std::string& prompt) = 0;
};

class Classifier {
 public:
  virtual ~Classifier() = default;
  /// Classifies the last message of `history`, which must be the persuader's.
  virtual ActionMessage classify(const std::vector<ChatMessage>& history,
                                 const Scenario& scenario) = 0;
};

namespace detail {

inline void require_persuader_last(const std::vector<ChatMessage>& history) {
  if (history.empty() || history.back().speaker != Speaker::kPersuader)
    throw Error(ErrorCode::kInvalidArgument, "the last message must be the persuader's");
}

/// Splits after '.', '?', '!' and newlines.
inline std::vector<std::string_view> split_sentences(std::string_view text) {
  std::vector<std::string_view> out;
  std::size_t begin = 0;
  for (std::size_t i = 0; i <= text.size(); ++i) {
    if (i == text.size() || text[i] == '.' || text[i] == '?' || text[i] == '!' || text[i] == '\n') {
      const auto s = trim(text.substr(begin, i - begin));
      if (!s.empty()) out.push_back(s);
      begin = i + 1;
    }
  }
  return out;
}

/// Longest scenario name that `text` starts with, followed by `suffix`.
template <std::size_t N>
std::optional<std::pair<int, std::size_t>> match_name_prefix(const std::array<std::string, N>& names,
                                                             std::string_view text,
                                                             std::string_view suffix) {
  std::optional<std::pair<int, std::size_t>> best;
  const std::string lt = lower(text);
  for (std::size_t i = 0; i < N; ++i) {
    const std::string candidate = lower(names[i]) + std::string(suffix);
    if (lt.starts_with(candidate) && (!best || candidate.size() > best->second))
      best = std::pair<int, std::size_t>{static_cast<int>(i), candidate.size()};
  }
  return best;
}

inline bool parse_disclosure_sentence(std::string_view s, const Scenario& scenario,
                                      ActionMessage& action) {
  constexpr std::string_view kPrefix = "proposal ";
  if (!lower(s.substr(0, kPrefix.size())).starts_with(kPrefix)) return false;
  s.remove_prefix(kPrefix.size());
  const auto name = match_name_prefix(scenario.proposal_names, s, " will ");
  if (!name) return false;
  std::string rest = std::string(s.substr(name->second));
  // Clauses are joined by ", will " and " and will ".
  std::vector<std::string> clauses;
  for (;;) {
    const std::string lr = lower(rest);
    const auto comma = lr.find(", will ");
    const auto conj = lr.find(" and will ");
    const auto cut = std::min(comma, conj);
    if (cut == std::string::npos) {
      clauses.push_back(rest);
      break;
    }
    clauses.push_back(rest.substr(0, cut));
    rest = rest.substr(cut + (cut == comma ? 7 : 10));
  }
  std::vector<Disclosure> found;
  for (const auto& raw : clauses) {
    std::string clause(trim(raw));
    std::erase(clause, '*');
    const std::string lc = lower(clause);
    std::optional<Effect> effect;
    std::size_t skip = 0;
    if (lc.starts_with("increase ")) {
      effect = Effect::kIncrease;
      skip = 9;
    } else if (lc.starts_with("decrease ")) {
      effect = Effect::kDecrease;
      skip = 9;
    } else if (lc.starts_with("have no effect on ")) {
      effect = Effect::kNone;
      skip = 18;
    }
    if (!effect) return false;
    const auto attr = find_name(scenario.attribute_names, std::string_view(clause).substr(skip));
    if (!attr) return false;
    found.push_back({Cell{name->first, *attr}, *effect});
  }
  for (const auto& d : found) action.add_disclosure(d);
  return !found.empty();
}

inline bool parse_question(std::string_view s, const Scenario& scenario, ActionMessage& action) {
  const std::string l = lower(s);
  auto strip = [&](std::string_view prefix) -> std::optional<std::string_view> {
    if (!l.starts_with(lower(prefix))) return std::nullopt;
    return s.substr(prefix.size());
  };
  if (l == "what do you know about the proposals") {
    action.appeals.informational = action.appeals.informational | CellSet::all();
    return true;
  }
  if (l == "which attributes do you like" || l == "how do you feel about the attributes") {
    action.appeals.motivational = action.appeals.motivational | IndexSet::all();
    return true;
  }
  if (l == "what is your preferred proposal") {
    action.appeals.inferential = action.appeals.inferential | IndexSet::all();
    return true;
  }
  if (auto rest = strip("What do you know about the effect of proposal ")) {
    const auto p = match_name_prefix(scenario.proposal_names, *rest, " on ");
    if (!p) return false;
    const auto a = find_name(scenario.attribute_names, rest->substr(p->second));
    if (!a) return false;
    action.appeals.informational.insert(Cell{p->first, *a});
    return true;
  }
  if (auto rest = strip("What do you know about proposal ")) {
    const auto p = find_name(scenario.proposal_names, *rest);
    if (!p) return false;
    for (int a = 0; a < kNumAttributes; ++a) action.appeals.informational.insert(Cell{*p, a});
    return true;
  }
  if (auto rest = strip("How do you feel about ")) {
    const auto a = find_name(scenario.attribute_names, *rest);
    if (!a) return false;
    action.appeals.motivational.insert(*a);
    return true;
  }
  if (auto rest = strip("What is your utility for proposal ")) {
    const auto p = find_name(scenario.proposal_names, *rest);
    if (!p) return false;
    action.appeals.inferential.insert(*p);
    return true;
  }
  return false;
}

}  // namespace detail

/// Offline, deterministic classifier for the phrasings produced by
/// `render_action_text`. Anything else is ignored.
class TemplateClassifier final : public Classifier {
 public:
  ActionMessage classify(const std::vector<ChatMessage>& history,
                         const Scenario& scenario) override {
    detail::require_persuader_last(history);
    return classify_text(history.back().text, scenario);
  }

  static ActionMessage classify_text(std::string_view text, const Scenario& scenario) {
    ActionMessage action;
    std::string plain(text);
    std::erase(plain, '*');  // markdown emphasis, as in the persuader's view
    for (auto sentence : detail::split_sentences(plain)) {
      if (!detail::parse_disclosure_sentence(sentence, scenario, action))
        detail::parse_question(sentence, scenario, action);
    }
    return action;
  }
};

namespace detail {

/// Tolerates the single-quoted, trailing-comma dicts that chat models echo
/// back from the prompt's example format.
inline Json parse_model_json(std::string_view text) {
  std::string body = strip_code_fence(text);
  try {
    return Json::parse(body);
  } catch (const Json::parse_error&) {
  }
  std::replace(body.begin(), body.end(), '\'', '"');
  std::string cleaned;
  for (std::size_t i = 0; i < body.size(); ++i) {
    if (body[i] == ',') {
      std::size_t j = i + 1;
      while (j < body.size() && std::isspace(static_cast<unsigned char>(body[j]))) ++j;
      if (j < body.size() && (body[j] == ']' || body[j] == '}')) continue;
    }
    cleaned += body[i];
  }
  for (const char* literal : {"True", "False"}) {
    std::string::size_type pos;
    while ((pos = cleaned.find(literal)) != std::string::npos)
      cleaned.replace(pos, std::strlen(literal), literal[0] == 'T' ? "true" : "false");
  }
  try {
    return Json::parse(cleaned);
  } catch (const Json::parse_error& e) {
    throw Error(ErrorCode::kClassifierParseError, e.what());
  }
}

inline std::string names_list(const auto& names) {
  std::string out;
  for (const auto& n : names) out += (out.empty() ? "" : ", ") + n;
  return out;
}

inline std::string messages_block(const std::vector<ChatMessage>& history) {
  Json arr = Json::array();
  for (const auto& m : history) arr.push_back(m.text);
  return arr.dump(2);
}

}  // namespace detail

/// Classifier backed by a chat model, using one appeals prompt and one
/// disclosures prompt per message.
class ModelClassifier final : public Classifier {
 public:
  explicit ModelClassifier(std::shared_ptr<ModelClient> client) : client_(std::move(client)) {}

  ActionMessage classify(const std::vector<ChatMessage>& history,
                         const Scenario& scenario) override {
    detail::require_persuader_last(history);
    const std::string messages = detail::messages_block(history);
    const std::string appeals_prompt = fill_template(
        kAppealsPrompt, {{"proposals", detail::names_list(scenario.proposal_names)},
                         {"attributes", detail::names_list(scenario.attribute_names)},
                         {"messages", messages}});
    const std::string game_info = "Proposals: " + detail::names_list(scenario.proposal_names) +
                                  "; Attributes: " + detail::names_list(scenario.attribute_names);
    const std::string disclosures_prompt =
        fill_template(kDisclosuresPrompt, {{"game_info", game_info}, {"messages", messages}});
    ActionMessage action;
    parse_appeals(call(appeals_prompt), scenario, action);
    parse_disclosures(call(disclosures_prompt), scenario, action);
    return action;
  }

  static void parse_appeals(std::string_view output, const Scenario& scenario, ActionMessage& action) {
    const Json doc = detail::parse_model_json(output);
    if (!doc.is_object()) throw Error(ErrorCode::kClassifierParseError, "appeals: expected an object");
    if (doc.contains("motivational")) {
      for (const auto& v : doc.at("motivational")) action.appeals.motivational.insert(attribute(v, scenario));
    }
    if (doc.contains("inferential")) {
      for (const auto& v : doc.at("inferential")) action.appeals.inferential.insert(proposal(v, scenario));
    }
    if (doc.contains("informational")) {
      const Json& info = doc.at("informational");
      if (info.is_object()) {
        for (const auto& [p, attrs] : info.items()) {
          const int pi = proposal(Json(p), scenario);
          for (const auto& a : attrs) action.appeals.informational.insert(Cell{pi, attribute(a, scenario)});
        }
      } else {
        for (const auto& v : info) {
          if (!v.is_object() || !v.contains("proposal") || !v.contains("attribute"))
            throw Error(ErrorCode::kClassifierParseError, "informational entry");
          action.appeals.informational.insert(
              Cell{proposal(v.at("proposal"), scenario), attribute(v.at("attribute"), scenario)});
        }
      }
    }
  }

  static void parse_disclosures(std::string_view output, const Scenario& scenario,
                                ActionMessage& action) {
    const Json doc = detail::parse_model_json(output);
    const auto add = [&](const Json& p, const Json& a, const Json& u) {
      if (!u.is_number()) throw Error(ErrorCode::kClassifierParseError, "utility must be a number");
      const double value = u.get<double>();
      // Magnitudes are not modelled; only the direction of an effect is kept.
      const Effect e = value > 0 ? Effect::kIncrease : (value < 0 ? Effect::kDecrease : Effect::kNone);
      action.add_disclosure({Cell{proposal(p, scenario), attribute(a, scenario)}, e});
    };
    if (doc.is_object()) {
      for (const auto& [p, attrs] : doc.items()) {
        if (!attrs.is_object()) throw Error(ErrorCode::kClassifierParseError, "disclosure map");
        for (const auto& [a, u] : attrs.items()) add(Json(p), Json(a), u);
      }
      return;
    }
    if (!doc.is_array()) throw Error(ErrorCode::kClassifierParseError, "disclosures: expected a list");
    for (const auto& v : doc) {
      if (!v.is_object() || !v.contains("proposal") || !v.contains("attribute") || !v.contains("utility"))
        throw Error(ErrorCode::kClassifierParseError, "disclosure entry");
      add(v.at("proposal"), v.at("attribute"), v.at("utility"));
    }
  }

 private:
  std::string call(const std::string& prompt) {
    try {
      return client_->complete(prompt);
    } catch (const Error& e) {
      throw Error(ErrorCode::kClassifierUnavailable, e.what());
    } catch (const std::exception& e) {
      throw Error(ErrorCode::kClassifierUnavailable, e.what());
    }
  }

  static int proposal(const Json& v, const Scenario& s) {
    if (!v.is_string()) throw Error(ErrorCode::kClassifierParseError, "proposal must be a string");
    const auto p = detail::find_name(s.proposal_names, v.get<std::string>());
    if (!p) throw Error(ErrorCode::kClassifierParseError, "unknown proposal " + v.dump());
    return *p;
  }
  static int attribute(const Json& v, const Scenario& s) {
    if (!v.is_string()) throw Error(ErrorCode::kClassifierParseError, "attribute must be a string");
    const auto a = detail::find_name(s.attribute_names, v.get<std::string>());
    if (!a) throw Error(ErrorCode::kClassifierParseError, "unknown attribute " + v.dump());
    return *a;
  }

  std::shared_ptr<ModelClient> client_;
};

// ---------------------------------------------------------------------------
// Validation

struct ValidationOptions {
  /// Human sessions: reject messages under `min_chars` characters.
  bool human_checks = false;
  std::size_t min_chars = 10;
};

struct ValidationResult {
  bool ok = true;
  ErrorCode reason = ErrorCode::kInvalidArgument;
  std::string detail;
  std::optional<Cell> cell;

  explicit operator bool() const { return ok; }
};

inline ValidationResult validate_persuader_message(const ActionMessage& action, const Instance& instance,
                                                   std::string_view raw_text = {},
                                                   const ValidationOptions& options = {}) {
  if (options.human_checks && count_chars(detail::trim(raw_text)) < options.min_chars) {
    return {false, ErrorCode::kTooShort,
            "messages must be at least " + std::to_string(options.min_chars) + " characters",
            std::nullopt};
  }
  for (const auto& d : action.disclosures) {
    if (instance.matrix.at(d.cell) != d.claimed_effect) {
      const auto& s = instance.scenario;
      return {false, ErrorCode::kFalseDisclosure,
              "proposal " + s.proposal_names[d.cell.proposal] + " does not " +
                  std::string(effect_phrase(d.claimed_effect)) + " " +
                  s.attribute_names[d.cell.attribute],
              d.cell};
    }
  }
  return {};
}

}  // namespace mindgames
