#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include "metrics_fixture.hpp"

using namespace mindgames;
using namespace testing_support;

namespace {

std::filesystem::path temp_file(const std::string& name) {
  const auto dir = std::filesystem::temp_directory_path() / "mindgames_io_test";
  std::filesystem::create_directories(dir);
  const auto p = dir / name;
  std::filesystem::remove(p);
  return p;
}

std::vector<GameTranscript> mixed_games() {
  std::vector<GameTranscript> out;
  for (std::size_t i = 0; i < 6; ++i) {
    const Instance& in = critical_sample()[i];
    GameOptions o;
    o.condition = i % 2 ? Condition::kRevealed : Condition::kHidden;
    if (i % 3 == 0) {
      ScriptedPerfectPersuader p;
      out.push_back(run_game(in, p, o));
    } else {
      BruteForcePersuader p;
      out.push_back(run_game(in, p, o));
    }
  }
  TextPersuader liar({"Proposal A will increase public trust.", "Which attributes do you like?"});
  out.push_back(run_game(worked_example(), liar));
  return out;
}

}  // namespace

TEST(Io, instances_round_trip) {
  std::stringstream ss;
  std::vector<Instance> in = critical_sample();
  in.push_back(worked_example());
  write_instances(ss, in);
  EXPECT_EQ(read_instances(ss), in);
}

TEST(Io, instance_record_is_compact_and_readable) {
  const Json j = to_json(worked_example());
  EXPECT_EQ(j.at("goal"), 0);
  EXPECT_EQ(j.at("matrix"), Json::parse("[[0,-1,0],[0,-1,1],[0,1,1]]"));
  EXPECT_EQ(j.at("hidden"), Json::parse("[[0,1],[1,1],[1,2],[2,1]]"));
  EXPECT_EQ(instance_from_json(j), worked_example());
}

TEST(Io, transcripts_round_trip_exactly) {
  const auto games = mixed_games();
  std::stringstream ss;
  write_transcripts(ss, games);
  const auto back = read_transcripts(ss);
  ASSERT_EQ(back.size(), games.size());
  for (std::size_t i = 0; i < games.size(); ++i) EXPECT_EQ(back[i], games[i]) << i;
}

TEST(Io, exported_games_give_the_same_metrics) {
  std::vector<GameTranscript> games;
  for (const auto& h : metrics_fixture::hand_games()) games.push_back(metrics_fixture::play(h));
  const auto path = temp_file("hand.jsonl");
  {
    TranscriptLog log(path.string());
    for (const auto& g : games) log.append(g);
  }
  const auto loaded = load_transcripts(path.string());
  MetricsOptions o;
  o.bootstrap_resamples = 200;
  EXPECT_EQ(compute_metrics(loaded, o), compute_metrics(games, o));
}

TEST(Io, log_writes_a_single_header_across_reopens) {
  const auto path = temp_file("reopen.jsonl");
  const auto games = mixed_games();
  {
    TranscriptLog log(path.string());
    log.append(games[0]);
  }
  {
    TranscriptLog log(path.string());
    log.append(games[1]);
  }
  std::ifstream f(path);
  std::string line;
  int headers = 0, lines = 0;
  while (std::getline(f, line)) {
    ++lines;
    headers += line.find("\"header\"") != std::string::npos;
  }
  EXPECT_EQ(lines, 3);
  EXPECT_EQ(headers, 1);
  EXPECT_EQ(load_transcripts(path.string()).size(), 2u);
}

TEST(Io, empty_store_exports_only_a_header) {
  std::stringstream ss;
  write_transcripts(ss, {});
  EXPECT_EQ(ss.str(), R"({"record":"header","schema":"mindgames.transcripts","version":1})"
                      "\n");
  EXPECT_TRUE(read_transcripts(ss).empty());
}

TEST(Io, filter_by_condition_and_persuader) {
  const auto games = mixed_games();
  TranscriptFilter f;
  f.condition = Condition::kRevealed;
  std::stringstream ss;
  write_transcripts(ss, games, f);
  const auto revealed = read_transcripts(ss);
  EXPECT_EQ(revealed.size(), 3u);
  for (const auto& t : revealed) EXPECT_EQ(t.condition, Condition::kRevealed);

  TranscriptFilter g;
  g.persuader = "text";
  std::stringstream ss2;
  write_transcripts(ss2, games, g);
  EXPECT_EQ(read_transcripts(ss2).size(), 1u);
}

TEST(Io, version_and_header_errors) {
  const auto code = [](const std::string& text) {
    std::stringstream ss(text);
    try {
      read_transcripts(ss);
    } catch (const Error& e) {
      return e.code();
    }
    return ErrorCode::kInvalidArgument;
  };
  EXPECT_EQ(code(R"({"record":"header","schema":"mindgames.transcripts","version":2})"), ErrorCode::kStorageError);
  EXPECT_EQ(code(R"({"record":"header","schema":"mindgames.instances","version":1})"), ErrorCode::kStorageError);
  EXPECT_EQ(code(""), ErrorCode::kStorageError);
  EXPECT_EQ(code("{not json"), ErrorCode::kStorageError);
  EXPECT_THROW(load_transcripts("/nonexistent/dir/file.jsonl"), Error);
}

TEST(Io, error_codes_round_trip_by_name) {
  for (int i = 0; i <= static_cast<int>(ErrorCode::kStorageError); ++i) {
    const auto c = static_cast<ErrorCode>(i);
    EXPECT_EQ(error_code_from_string(to_string(c)), c);
  }
}
