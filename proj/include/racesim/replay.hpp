#pragma once

#include <cstdint>
#include <fstream>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "racesim/error.hpp"
#include "racesim/observation.hpp"

namespace racesim {

inline constexpr std::uint32_t kReplayVersion = 1;

/// "racesim-replay/<version>"; bindings compare against this string.
std::string replay_format_version();

enum class RecordKind : std::uint8_t { reset = 0, step = 1 };

/// One entry of the episode history. Reset records carry the initial
/// observation with zero action and reward.
struct ReplayRecord {
  RecordKind kind = RecordKind::step;
  std::uint32_t episode = 0;
  Observation obs;
  std::optional<PrivilegedObservation> priv;
  Action action;
  RewardBreakdown reward;
  TerminationReason termination;
  bool truncated = false;
  StepInfo info;

  bool operator==(const ReplayRecord& o) const;
};

struct ReplayHeader {
  std::uint32_t version = kReplayVersion;
  std::uint32_t width = kMaskSize;
  std::uint32_t height = kMaskSize;
  bool informed = false;
  std::uint64_t record_count = 0;
};

struct Replay {
  ReplayHeader header;
  std::vector<ReplayRecord> records;
};

class ReplayError : public Error {
 public:
  enum class Kind { io, bad_magic, version_mismatch, truncated, checksum, malformed };

  ReplayError(Kind kind, std::int64_t record_index, const std::string& what)
    : Error(ErrorCode::replay, what), kind_(kind), record_index_(record_index) {}

  Kind kind() const { return kind_; }
  /// -1 when the failure is in the file header.
  std::int64_t record_index() const { return record_index_; }

 private:
  Kind kind_;
  std::int64_t record_index_;
};

/// Streams records to disk. The record count in the header is patched on
/// finish(); a text schema sidecar is written next to the file.
class ReplayWriter {
 public:
  ReplayWriter(const std::string& path, std::uint32_t width, std::uint32_t height, bool informed);
  ~ReplayWriter();
  ReplayWriter(const ReplayWriter&) = delete;
  ReplayWriter& operator=(const ReplayWriter&) = delete;

  void append(const ReplayRecord& record);
  void finish();
  std::uint64_t count() const { return count_; }

 private:
  std::string path_;
  std::ofstream out_;
  std::uint32_t width_;
  std::uint32_t height_;
  std::uint64_t count_ = 0;
  bool finished_ = false;
};

void write_replay(const std::string& path, const ReplayHeader& header,
                  std::span<const ReplayRecord> records);
Replay read_replay(const std::string& path);

/// Payload encoding, exposed for byte-level comparisons.
std::vector<std::uint8_t> encode_record(const ReplayRecord& record);
ReplayRecord decode_record(std::span<const std::uint8_t> payload, std::uint32_t width,
                           std::uint32_t height, std::int64_t index);

std::string replay_schema_text();

}  // namespace racesim
