#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>
#include <iterator>

#include "racesim/env.hpp"
#include "racesim/replay.hpp"
#include "test_util.hpp"

using namespace racesim;

namespace {

std::string temp_path(const std::string& name) {
  return (std::filesystem::temp_directory_path() / ("racesim_test_" + name)).string();
}

std::vector<char> slurp(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

void spit(const std::string& path, const std::vector<char>& bytes) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
}

std::vector<ReplayRecord> record_episodes(int steps) {
  auto cfg = test::quiet_config(Mode::train);
  cfg.randomization = RandomizationConfig::defaults(Mode::train);
  cfg.log_replay = true;
  Env env(cfg);
  std::vector<ReplayRecord> records;
  env.reset(0);
  CounterRng rng(1, "replay-actions");
  for (int t = 0; t < steps; ++t) {
    if (env.done()) env.reset();
    env.step(Action{Vec4(rng.uniform(0.2, 0.4), rng.uniform(0.2, 0.4), rng.uniform(0.2, 0.4),
                         rng.uniform(0.2, 0.4))});
    auto chunk = env.take_replay();
    records.insert(records.end(), chunk.begin(), chunk.end());
  }
  return records;
}

std::string write_sample(const std::string& name, const std::vector<ReplayRecord>& records) {
  const std::string path = temp_path(name);
  ReplayHeader h;
  h.informed = true;
  write_replay(path, h, records);
  return path;
}

ReplayError::Kind read_error_kind(const std::string& path, std::int64_t* index = nullptr) {
  try {
    read_replay(path);
  } catch (const ReplayError& e) {
    EXPECT_EQ(e.code(), ErrorCode::replay);
    if (index) *index = e.record_index();
    return e.kind();
  }
  ADD_FAILURE() << "no error for " << path;
  return ReplayError::Kind::io;
}

}  // namespace

TEST(Replay, VersionString) { EXPECT_EQ(replay_format_version(), "racesim-replay/1"); }

TEST(Replay, ThousandStepRoundTrip) {
  const auto records = record_episodes(1000);
  ASSERT_GE(records.size(), 1001u);
  EXPECT_EQ(records.front().kind, RecordKind::reset);
  const std::string path = write_sample("roundtrip.bin", records);
  const Replay replay = read_replay(path);
  EXPECT_EQ(replay.header.record_count, records.size());
  EXPECT_TRUE(replay.header.informed);
  ASSERT_EQ(replay.records.size(), records.size());
  for (std::size_t i = 0; i < records.size(); ++i) {
    ASSERT_TRUE(replay.records[i] == records[i]) << i;
  }
  EXPECT_TRUE(std::filesystem::exists(path + ".schema.txt"));
  std::filesystem::remove(path);
  std::filesystem::remove(path + ".schema.txt");
}

TEST(Replay, TruncationNamesTheRecord) {
  const auto records = record_episodes(20);
  const std::string path = write_sample("trunc.bin", records);
  auto bytes = slurp(path);
  const std::size_t record_bytes = 4 + encode_record(records[0]).size() + 4;
  bytes.resize(32 + record_bytes * 5 + 10);
  spit(path, bytes);
  std::int64_t index = -2;
  EXPECT_EQ(read_error_kind(path, &index), ReplayError::Kind::truncated);
  EXPECT_EQ(index, 5);
  std::filesystem::remove(path);
  std::filesystem::remove(path + ".schema.txt");
}

TEST(Replay, ChecksumMismatch) {
  const auto records = record_episodes(5);
  const std::string path = write_sample("crc.bin", records);
  auto bytes = slurp(path);
  bytes[32 + 4 + 20] ^= 0x01;
  spit(path, bytes);
  std::int64_t index = -2;
  EXPECT_EQ(read_error_kind(path, &index), ReplayError::Kind::checksum);
  EXPECT_EQ(index, 0);
  std::filesystem::remove(path);
  std::filesystem::remove(path + ".schema.txt");
}

TEST(Replay, HeaderFailures) {
  const auto records = record_episodes(2);
  const std::string path = write_sample("header.bin", records);
  const auto good = slurp(path);

  auto bad_version = good;
  bad_version[8] = 2;
  spit(path, bad_version);
  EXPECT_EQ(read_error_kind(path), ReplayError::Kind::version_mismatch);

  auto bad_magic = good;
  bad_magic[0] = 'X';
  spit(path, bad_magic);
  EXPECT_EQ(read_error_kind(path), ReplayError::Kind::bad_magic);

  spit(path, {});
  EXPECT_EQ(read_error_kind(path), ReplayError::Kind::truncated);

  auto trailing = good;
  trailing.push_back(0);
  spit(path, trailing);
  EXPECT_EQ(read_error_kind(path), ReplayError::Kind::malformed);

  EXPECT_EQ(read_error_kind(temp_path("missing.bin")), ReplayError::Kind::io);
  std::filesystem::remove(path);
  std::filesystem::remove(path + ".schema.txt");
}

TEST(Replay, EmptyReplayIsValid) {
  const std::string path = write_sample("empty.bin", {});
  const auto replay = read_replay(path);
  EXPECT_EQ(replay.header.record_count, 0u);
  EXPECT_TRUE(replay.records.empty());
  std::filesystem::remove(path);
  std::filesystem::remove(path + ".schema.txt");
}

TEST(Replay, WriterRejectsWrongMaskSize) {
  const std::string path = temp_path("size.bin");
  ReplayWriter w(path, 32, 32, false);
  ReplayRecord r;
  EXPECT_THROW(w.append(r), UsageError);
  w.finish();
  EXPECT_THROW(w.append(r), UsageError);
  std::filesystem::remove(path);
  std::filesystem::remove(path + ".schema.txt");
}
