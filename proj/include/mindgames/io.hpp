#pragma once

// Newline-delimited JSON files for instances, transcripts and reports. Each
// file starts with a header record naming the schema and its version.

#include <fcntl.h>
#include <unistd.h>

#include <fstream>
#include <functional>
#include <mutex>
#include <string>
#include <vector>

#include "json.hpp"
#include "mindgames/game.hpp"
#include "mindgames/metrics.hpp"

namespace mindgames {

inline constexpr int kSchemaVersion = 1;
inline constexpr std::string_view kInstancesSchema = "mindgames.instances";
inline constexpr std::string_view kTranscriptsSchema = "mindgames.transcripts";

inline ErrorCode error_code_from_string(std::string_view s) {
  for (int i = 0; i <= static_cast<int>(ErrorCode::kStorageError); ++i) {
    const auto code = static_cast<ErrorCode>(i);
    if (to_string(code) == s) return code;
  }
  throw Error(ErrorCode::kInvalidArgument, "unknown error code '" + std::string(s) + "'");
}

namespace detail {

inline Json cell_json(Cell c) { return Json::array({c.proposal, c.attribute}); }

inline Cell cell_from(const Json& j) {
  const Cell c{j.at(0).get<int>(), j.at(1).get<int>()};
  if (c.proposal < 0 || c.proposal >= kNumProposals || c.attribute < 0 || c.attribute >= kNumAttributes)
    throw Error(ErrorCode::kInvalidArgument, "cell out of range: " + j.dump());
  return c;
}

inline Json cells_json(CellSet s) {
  Json out = Json::array();
  for (Cell c : s.cells()) out.push_back(cell_json(c));
  return out;
}

inline CellSet cells_from(const Json& j) {
  CellSet s;
  for (const auto& c : j) s.insert(cell_from(c));
  return s;
}

inline Json indices_json(IndexSet s) { return Json(s.items()); }

inline IndexSet indices_from(const Json& j) {
  IndexSet s;
  for (const auto& v : j) {
    const int i = v.get<int>();
    if (i < 0 || i >= 3) throw Error(ErrorCode::kInvalidArgument, "index out of range");
    s.insert(i);
  }
  return s;
}

inline Effect effect_from(const Json& j) {
  const auto e = effect_from_int(j.get<int>());
  if (!e) throw Error(ErrorCode::kInvalidArgument, "effect out of range");
  return *e;
}

inline Json disclosures_json(const std::vector<Disclosure>& ds) {
  Json out = Json::array();
  for (const auto& d : ds)
    out.push_back(Json::array({d.cell.proposal, d.cell.attribute, to_int(d.claimed_effect)}));
  return out;
}

inline std::vector<Disclosure> disclosures_from(const Json& j) {
  std::vector<Disclosure> out;
  for (const auto& d : j) out.push_back({cell_from(d), effect_from(d.at(2))});
  return out;
}

}  // namespace detail

// ---------------------------------------------------------------------------
// Domain objects

inline Json to_json(const Scenario& s) {
  return {{"id", s.id},
          {"cover_story", s.cover_story},
          {"proposals", s.proposal_names},
          {"attributes", s.attribute_names},
          {"flavor", s.flavor == Flavor::kMental ? "mental" : "non_mental"}};
}

inline Scenario scenario_from_json(const Json& j) {
  Scenario s;
  s.id = j.at("id").get<std::string>();
  s.cover_story = j.at("cover_story").get<std::string>();
  s.proposal_names = j.at("proposals").get<std::array<std::string, kNumProposals>>();
  s.attribute_names = j.at("attributes").get<std::array<std::string, kNumAttributes>>();
  s.flavor = j.at("flavor").get<std::string>() == "mental" ? Flavor::kMental : Flavor::kNonMental;
  return s;
}

inline Json to_json(const Instance& in) {
  Json matrix = Json::array();
  for (int p = 0; p < kNumProposals; ++p) {
    Json row = Json::array();
    for (int a = 0; a < kNumAttributes; ++a) row.push_back(to_int(in.matrix.at({p, a})));
    matrix.push_back(row);
  }
  Json values = Json::array();
  for (auto w : in.values.weights) values.push_back(to_int(w));
  return {{"id", in.id},
          {"scenario", to_json(in.scenario)},
          {"matrix", matrix},
          {"values", values},
          {"hidden", detail::cells_json(in.hidden)},
          {"reveal", detail::cells_json(in.reveal)},
          {"goal", in.goal},
          {"initial_choice", in.initial_choice},
          {"full_info_choice", in.full_info_choice}};
}

inline Instance instance_from_json(const Json& j) {
  Instance in;
  in.id = j.at("id").get<std::string>();
  in.scenario = scenario_from_json(j.at("scenario"));
  for (int p = 0; p < kNumProposals; ++p)
    for (int a = 0; a < kNumAttributes; ++a) in.matrix.set({p, a}, detail::effect_from(j.at("matrix").at(p).at(a)));
  for (int a = 0; a < kNumAttributes; ++a) {
    const auto w = preference_from_int(j.at("values").at(a).get<int>());
    if (!w) throw Error(ErrorCode::kInvalidArgument, "weight out of range");
    in.values.weights[a] = *w;
  }
  in.hidden = detail::cells_from(j.at("hidden"));
  in.reveal = detail::cells_from(j.at("reveal"));
  in.goal = j.at("goal").get<int>();
  in.initial_choice = j.at("initial_choice").get<int>();
  in.full_info_choice = j.at("full_info_choice").get<int>();
  return in;
}

inline Json to_json(const ActionMessage& a) {
  return {{"motivational", detail::indices_json(a.appeals.motivational)},
          {"informational", detail::cells_json(a.appeals.informational)},
          {"inferential", detail::indices_json(a.appeals.inferential)},
          {"disclosures", detail::disclosures_json(a.disclosures)}};
}

inline ActionMessage action_from_json(const Json& j) {
  ActionMessage a;
  a.appeals.motivational = detail::indices_from(j.at("motivational"));
  a.appeals.informational = detail::cells_from(j.at("informational"));
  a.appeals.inferential = detail::indices_from(j.at("inferential"));
  a.disclosures = detail::disclosures_from(j.at("disclosures"));
  return a;
}

inline Json to_json(const TargetReply& r) {
  Json motivational = Json::array();
  for (const auto& m : r.motivational_answers)
    motivational.push_back(Json::array({m.attribute, to_int(m.preference)}));
  Json inferential = Json::array();
  for (const auto& i : r.inferential_answers)
    inferential.push_back(Json::array({i.proposal, i.utility, i.chosen}));
  return {{"echo", detail::disclosures_json(r.echo)},
          {"motivational", motivational},
          {"informational", detail::disclosures_json(r.informational_answers)},
          {"inferential", inferential},
          {"canned", r.canned},
          {"text", r.rendered_text}};
}

inline TargetReply reply_from_json(const Json& j) {
  TargetReply r;
  r.echo = detail::disclosures_from(j.at("echo"));
  for (const auto& m : j.at("motivational")) {
    const auto p = preference_from_int(m.at(1).get<int>());
    if (!p) throw Error(ErrorCode::kInvalidArgument, "preference out of range");
    r.motivational_answers.push_back({m.at(0).get<int>(), *p});
  }
  r.informational_answers = detail::disclosures_from(j.at("informational"));
  for (const auto& i : j.at("inferential"))
    r.inferential_answers.push_back({i.at(0).get<int>(), i.at(1).get<int>(), i.at(2).get<bool>()});
  r.canned = j.at("canned").get<bool>();
  r.rendered_text = j.at("text").get<std::string>();
  return r;
}

inline Json to_json(const KnowledgeState& s) {
  return {{"known", detail::cells_json(s.known)}, {"incumbency", s.incumbency}};
}

inline KnowledgeState state_from_json(const Json& j) {
  return {detail::cells_from(j.at("known")), j.at("incumbency").get<std::vector<int>>()};
}

inline Json to_json(const TurnRecord& t) {
  Json rejections = Json::array();
  for (const auto& r : t.rejections)
    rejections.push_back({{"text", r.text}, {"reason", to_string(r.reason)}, {"detail", r.detail}});
  return {{"turn", t.turn},
          {"persuader_text", t.persuader_text},
          {"chain_of_thought", t.chain_of_thought},
          {"raw_completion", t.raw_completion},
          {"format_violation", t.format_violation},
          {"rejections", rejections},
          {"forfeited", t.forfeited},
          {"action", to_json(t.action)},
          {"reply", to_json(t.reply)},
          {"reply_text", t.reply_text},
          {"state", to_json(t.state)},
          {"success_so_far", t.success_so_far},
          {"sink_state", t.sink_state}};
}

inline TurnRecord turn_from_json(const Json& j) {
  TurnRecord t;
  t.turn = j.at("turn").get<int>();
  t.persuader_text = j.at("persuader_text").get<std::string>();
  t.chain_of_thought = j.at("chain_of_thought").get<std::string>();
  t.raw_completion = j.at("raw_completion").get<std::string>();
  t.format_violation = j.at("format_violation").get<bool>();
  for (const auto& r : j.at("rejections")) {
    t.rejections.push_back({r.at("text").get<std::string>(),
                            error_code_from_string(r.at("reason").get<std::string>()),
                            r.at("detail").get<std::string>()});
  }
  t.forfeited = j.at("forfeited").get<bool>();
  t.action = action_from_json(j.at("action"));
  t.reply = reply_from_json(j.at("reply"));
  t.reply_text = j.at("reply_text").get<std::string>();
  t.state = state_from_json(j.at("state"));
  t.success_so_far = j.at("success_so_far").get<bool>();
  t.sink_state = j.at("sink_state").get<bool>();
  return t;
}

inline Json to_json(const GameTranscript& t) {
  Json turns = Json::array();
  for (const auto& turn : t.turns) turns.push_back(to_json(turn));
  Json outcome = nullptr;
  if (t.outcome) outcome = {{"success", t.outcome->success}, {"final_choice", t.outcome->final_choice}};
  return {{"record", "game"},
          {"instance", to_json(t.instance)},
          {"condition", to_string(t.condition)},
          {"variant", to_string(t.variant)},
          {"channel", to_string(t.channel)},
          {"persuader", t.persuader_kind},
          {"turns", turns},
          {"outcome", outcome},
          {"first_success_turn", t.first_success_turn ? Json(*t.first_success_turn) : Json(nullptr)}};
}

inline GameTranscript transcript_from_json(const Json& j) {
  GameTranscript t;
  t.instance = instance_from_json(j.at("instance"));
  t.condition = condition_from_string(j.at("condition").get<std::string>());
  t.variant = variant_from_string(j.at("variant").get<std::string>());
  t.channel = channel_from_string(j.at("channel").get<std::string>());
  t.persuader_kind = j.at("persuader").get<std::string>();
  for (const auto& turn : j.at("turns")) t.turns.push_back(turn_from_json(turn));
  if (!j.at("outcome").is_null()) {
    t.outcome = GameOutcome{j.at("outcome").at("success").get<bool>(),
                            j.at("outcome").at("final_choice").get<int>()};
  }
  if (!j.at("first_success_turn").is_null()) t.first_success_turn = j.at("first_success_turn").get<int>();
  return t;
}

inline Json to_json(const Estimate& e) {
  return {{"value", e.value}, {"ci_low", e.ci_low}, {"ci_high", e.ci_high}};
}

inline Json to_json(const Curve& c) {
  Json out = Json::array();
  for (const auto& e : c) out.push_back(to_json(e));
  return out;
}

inline Json to_json(const MetricsReport& r) {
  return {{"games", r.games},
          {"count_inferential", r.count_inferential},
          {"success_rate", to_json(r.success_rate)},
          {"success_by_turn", to_json(r.success_by_turn)},
          {"appeals_to_all", to_json(r.appeals_to_all)},
          {"appeals_to_all_with_inferential", to_json(r.appeals_to_all_with_inferential)},
          {"appeals_to_all_without_inferential", to_json(r.appeals_to_all_without_inferential)},
          {"disclosures_per_turn", to_json(r.disclosures_per_turn)},
          {"raw_disclosures_per_turn", to_json(r.raw_disclosures_per_turn)},
          {"unique_motivational_per_turn", to_json(r.unique_motivational_per_turn)},
          {"unique_informational_per_turn", to_json(r.unique_informational_per_turn)},
          {"sink_state_by_turn", to_json(r.sink_state_by_turn)}};
}

inline Json to_json(const RateEstimate& r) {
  return {{"rate", r.rate}, {"ci_low", r.ci_low}, {"ci_high", r.ci_high},
          {"trials", r.trials}, {"successes", r.successes}};
}

// ---------------------------------------------------------------------------
// Files

inline Json header_record(std::string_view schema) {
  return {{"record", "header"}, {"schema", schema}, {"version", kSchemaVersion}};
}

namespace detail {

inline void check_header(const Json& j, std::string_view schema) {
  if (!j.is_object() || j.value("record", "") != "header" || j.value("schema", "") != schema)
    throw Error(ErrorCode::kStorageError, "missing " + std::string(schema) + " header");
  if (j.value("version", 0) != kSchemaVersion)
    throw Error(ErrorCode::kStorageError, "unsupported schema version " + j.at("version").dump());
}

inline void for_each_record(std::istream& in, std::string_view schema,
                            const std::function<void(const Json&)>& visit) {
  std::string line;
  bool header = false;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (trim(line).empty()) continue;
    Json j;
    try {
      j = Json::parse(line);
    } catch (const Json::parse_error& e) {
      throw Error(ErrorCode::kStorageError, "line " + std::to_string(lineno) + ": " + e.what());
    }
    if (!header) {
      check_header(j, schema);
      header = true;
      continue;
    }
    visit(j);
  }
  if (!header) throw Error(ErrorCode::kStorageError, "empty file: no header record");
}

}  // namespace detail

inline void write_instances(std::ostream& out, const std::vector<Instance>& instances) {
  out << header_record(kInstancesSchema).dump() << '\n';
  for (const auto& in : instances) out << to_json(in).dump() << '\n';
}

inline std::vector<Instance> read_instances(std::istream& in) {
  std::vector<Instance> out;
  detail::for_each_record(in, kInstancesSchema, [&](const Json& j) { out.push_back(instance_from_json(j)); });
  return out;
}

inline std::vector<Instance> load_instances(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw Error(ErrorCode::kStorageError, "cannot open " + path);
  return read_instances(f);
}

inline std::vector<GameTranscript> read_transcripts(std::istream& in) {
  std::vector<GameTranscript> out;
  detail::for_each_record(in, kTranscriptsSchema, [&](const Json& j) {
    if (j.value("record", "") == "game") out.push_back(transcript_from_json(j));
  });
  return out;
}

inline std::vector<GameTranscript> load_transcripts(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw Error(ErrorCode::kStorageError, "cannot open " + path);
  return read_transcripts(f);
}

/// Appends one record per line. Each record goes out in a single write and
/// is flushed to disk before `append` returns.
class TranscriptLog {
 public:
  explicit TranscriptLog(std::string path) : path_(std::move(path)) {
    fd_ = ::open(path_.c_str(), O_WRONLY | O_CREAT | O_APPEND | O_CLOEXEC, 0644);
    if (fd_ < 0) throw Error(ErrorCode::kStorageError, "cannot open " + path_);
    if (::lseek(fd_, 0, SEEK_END) == 0) write_line(header_record(kTranscriptsSchema).dump());
  }
  TranscriptLog(const TranscriptLog&) = delete;
  TranscriptLog& operator=(const TranscriptLog&) = delete;
  ~TranscriptLog() {
    if (fd_ >= 0) ::close(fd_);
  }

  void append(const GameTranscript& t) { write_line(to_json(t).dump()); }
  const std::string& path() const { return path_; }

 private:
  void write_line(std::string line) {
    line += '\n';
    std::lock_guard lock(mutex_);
    const char* p = line.data();
    std::size_t left = line.size();
    while (left > 0) {
      const ssize_t n = ::write(fd_, p, left);
      if (n < 0) throw Error(ErrorCode::kStorageError, "write failed on " + path_);
      p += n;
      left -= static_cast<std::size_t>(n);
    }
    if (::fsync(fd_) != 0) throw Error(ErrorCode::kStorageError, "fsync failed on " + path_);
  }

  std::string path_;
  int fd_ = -1;
  std::mutex mutex_;
};

struct TranscriptFilter {
  std::optional<Condition> condition;
  std::optional<Variant> variant;
  std::optional<std::string> persuader;

  bool matches(const GameTranscript& t) const {
    return (!condition || t.condition == *condition) && (!variant || t.variant == *variant) &&
           (!persuader || t.persuader_kind == *persuader);
  }
};

inline void write_transcripts(std::ostream& out, const std::vector<GameTranscript>& transcripts,
                              const TranscriptFilter& filter = {}) {
  out << header_record(kTranscriptsSchema).dump() << '\n';
  for (const auto& t : transcripts)
    if (filter.matches(t)) out << to_json(t).dump() << '\n';
}

}  // namespace mindgames
