#include "racesim/replay.hpp"

#include <bit>
#include <cstring>
#include <iterator>

#include <zlib.h>

namespace racesim {

namespace {

constexpr char kMagic[8] = {'R', 'S', 'R', 'E', 'P', 'L', 'A', 'Y'};
constexpr std::size_t kHeaderSize = 8 + 4 * 4 + 8;
constexpr std::size_t kCountOffset = 8 + 4 * 4;

class ByteWriter {
 public:
  void u8(std::uint8_t v) { buf_.push_back(v); }
  void u16(std::uint16_t v) { uint(v, 2); }
  void u32(std::uint32_t v) { uint(v, 4); }
  void u64(std::uint64_t v) { uint(v, 8); }
  void i32(std::int32_t v) { u32(static_cast<std::uint32_t>(v)); }
  void i64(std::int64_t v) { u64(static_cast<std::uint64_t>(v)); }
  void f64(double v) { u64(std::bit_cast<std::uint64_t>(v)); }
  void bytes(const std::vector<std::uint8_t>& b) { buf_.insert(buf_.end(), b.begin(), b.end()); }
  template <typename V>
  void vec(const V& v) {
    for (int i = 0; i < static_cast<int>(v.size()); ++i) f64(v[i]);
  }
  std::vector<std::uint8_t>& buffer() { return buf_; }

 private:
  void uint(std::uint64_t v, int n) {
    for (int i = 0; i < n; ++i) buf_.push_back(static_cast<std::uint8_t>(v >> (8 * i)));
  }
  std::vector<std::uint8_t> buf_;
};

class ByteReader {
 public:
  ByteReader(std::span<const std::uint8_t> data, std::int64_t index) : data_(data), index_(index) {}

  std::uint8_t u8() { return static_cast<std::uint8_t>(uint(1)); }
  std::uint16_t u16() { return static_cast<std::uint16_t>(uint(2)); }
  std::uint32_t u32() { return static_cast<std::uint32_t>(uint(4)); }
  std::uint64_t u64() { return uint(8); }
  std::int32_t i32() { return static_cast<std::int32_t>(u32()); }
  std::int64_t i64() { return static_cast<std::int64_t>(u64()); }
  double f64() { return std::bit_cast<double>(u64()); }
  const std::uint8_t* take(std::size_t n) {
    need(n);
    const std::uint8_t* p = data_.data() + pos_;
    pos_ += n;
    return p;
  }
  template <typename V>
  void vec(V& v) {
    for (int i = 0; i < static_cast<int>(v.size()); ++i) v[i] = f64();
  }
  bool exhausted() const { return pos_ == data_.size(); }

 private:
  void need(std::size_t n) const {
    if (pos_ + n > data_.size()) {
      throw ReplayError(ReplayError::Kind::malformed, index_,
                        "replay record " + std::to_string(index_) + ": payload too short");
    }
  }
  std::uint64_t uint(int n) {
    need(n);
    std::uint64_t v = 0;
    for (int i = 0; i < n; ++i) v |= static_cast<std::uint64_t>(data_[pos_ + i]) << (8 * i);
    pos_ += n;
    return v;
  }
  std::span<const std::uint8_t> data_;
  std::size_t pos_ = 0;
  std::int64_t index_;
};

std::uint32_t checksum(std::span<const std::uint8_t> bytes) {
  return static_cast<std::uint32_t>(
    crc32(0L, reinterpret_cast<const Bytef*>(bytes.data()), static_cast<uInt>(bytes.size())));
}

std::vector<std::uint8_t> encode_header(const ReplayHeader& h) {
  ByteWriter w;
  for (char c : kMagic) w.u8(static_cast<std::uint8_t>(c));
  w.u32(h.version);
  w.u32(h.width);
  w.u32(h.height);
  w.u32(h.informed ? 1u : 0u);
  w.u64(h.record_count);
  return std::move(w.buffer());
}

void write_sidecar(const std::string& path) {
  std::ofstream out(path + ".schema.txt");
  if (!out) throw IoError("cannot write " + path + ".schema.txt");
  out << replay_schema_text();
}

}  // namespace

std::string replay_format_version() { return "racesim-replay/" + std::to_string(kReplayVersion); }

bool ReplayRecord::operator==(const ReplayRecord& o) const {
  return kind == o.kind && episode == o.episode && obs == o.obs && priv == o.priv &&
         action.u == o.action.u && reward == o.reward && termination == o.termination &&
         truncated == o.truncated && info == o.info;
}

std::vector<std::uint8_t> encode_record(const ReplayRecord& r) {
  ByteWriter w;
  w.u8(static_cast<std::uint8_t>(r.kind));
  w.u32(r.episode);
  w.i64(r.info.step);
  w.bytes(r.obs.mask.pack());
  w.vec(r.obs.rates);
  w.vec(r.obs.motor_speeds);
  w.vec(r.obs.flight_plan);
  w.u8(r.priv ? 1 : 0);
  if (r.priv) w.vec(r.priv->to_array());
  w.vec(r.action.u);
  w.f64(r.reward.progress);
  w.f64(r.reward.rate);
  w.f64(r.reward.gate);
  w.f64(r.reward.total);
  w.u8(static_cast<std::uint8_t>(r.termination.kind));
  w.i32(r.termination.gate_index);
  w.u32(r.termination.ground_predicates);
  w.u8(r.truncated ? 1 : 0);
  w.u32(r.info.laps);
  w.i64(r.info.flight_plan_index);
  w.u8(r.info.flight_plan_advanced ? 1 : 0);
  w.i64(r.info.target_gate);
  w.f64(r.info.specific_force);
  w.f64(r.info.specific_thrust);
  w.f64(r.info.speed);
  w.u16(static_cast<std::uint16_t>(r.info.crossings.size()));
  for (const auto& c : r.info.crossings) {
    w.i32(c.gate_index);
    w.u8(static_cast<std::uint8_t>(c.kind));
    w.f64(c.y);
    w.f64(c.z);
    w.f64(c.half_extent);
  }
  return std::move(w.buffer());
}

ReplayRecord decode_record(std::span<const std::uint8_t> payload, std::uint32_t width,
                           std::uint32_t height, std::int64_t index) {
  ByteReader rd(payload, index);
  ReplayRecord r;
  const std::uint8_t kind = rd.u8();
  if (kind > 1) throw ReplayError(ReplayError::Kind::malformed, index, "replay record " + std::to_string(index) + ": bad record kind");
  r.kind = static_cast<RecordKind>(kind);
  r.episode = rd.u32();
  r.info.step = rd.i64();
  const std::size_t mask_bytes = (static_cast<std::size_t>(width) * height + 7) / 8;
  r.obs.mask = MaskImage::unpack(static_cast<int>(width), static_cast<int>(height), rd.take(mask_bytes));
  rd.vec(r.obs.rates);
  rd.vec(r.obs.motor_speeds);
  rd.vec(r.obs.flight_plan);
  if (rd.u8()) {
    std::array<double, PrivilegedObservation::kSize> a{};
    rd.vec(a);
    r.priv = PrivilegedObservation::from_array(a);
  }
  rd.vec(r.action.u);
  r.reward.progress = rd.f64();
  r.reward.rate = rd.f64();
  r.reward.gate = rd.f64();
  r.reward.total = rd.f64();
  const std::uint8_t term = rd.u8();
  if (term > 2) throw ReplayError(ReplayError::Kind::malformed, index, "replay record " + std::to_string(index) + ": bad termination kind");
  r.termination.kind = static_cast<TerminationKind>(term);
  r.termination.gate_index = rd.i32();
  r.termination.ground_predicates = rd.u32();
  r.truncated = rd.u8() != 0;
  r.info.laps = rd.u32();
  r.info.flight_plan_index = rd.i64();
  r.info.flight_plan_advanced = rd.u8() != 0;
  r.info.target_gate = rd.i64();
  r.info.specific_force = rd.f64();
  r.info.specific_thrust = rd.f64();
  r.info.speed = rd.f64();
  const std::uint16_t n = rd.u16();
  for (std::uint16_t i = 0; i < n; ++i) {
    GateCrossing c;
    c.gate_index = rd.i32();
    const std::uint8_t ck = rd.u8();
    if (ck > 2) throw ReplayError(ReplayError::Kind::malformed, index, "replay record " + std::to_string(index) + ": bad crossing kind");
    c.kind = static_cast<CrossingKind>(ck);
    c.y = rd.f64();
    c.z = rd.f64();
    c.half_extent = rd.f64();
    r.info.crossings.push_back(c);
  }
  if (!rd.exhausted()) {
    throw ReplayError(ReplayError::Kind::malformed, index, "replay record " + std::to_string(index) + ": trailing payload bytes");
  }
  return r;
}

ReplayWriter::ReplayWriter(const std::string& path, std::uint32_t width, std::uint32_t height,
                           bool informed)
  : path_(path), out_(path, std::ios::binary | std::ios::trunc), width_(width), height_(height) {
  if (!out_) throw IoError("cannot open replay for writing: " + path);
  ReplayHeader h;
  h.width = width;
  h.height = height;
  h.informed = informed;
  const auto bytes = encode_header(h);
  out_.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
  write_sidecar(path);
}

ReplayWriter::~ReplayWriter() {
  try {
    finish();
  } catch (...) {
  }
}

void ReplayWriter::append(const ReplayRecord& record) {
  if (finished_) throw UsageError("replay writer already finished");
  if (static_cast<std::uint32_t>(record.obs.mask.width()) != width_ ||
      static_cast<std::uint32_t>(record.obs.mask.height()) != height_) {
    throw UsageError("replay record mask size does not match the header");
  }
  const auto payload = encode_record(record);
  ByteWriter w;
  w.u32(static_cast<std::uint32_t>(payload.size()));
  w.bytes(payload);
  w.u32(checksum(payload));
  out_.write(reinterpret_cast<const char*>(w.buffer().data()),
             static_cast<std::streamsize>(w.buffer().size()));
  if (!out_) throw IoError("short write to " + path_);
  ++count_;
}

void ReplayWriter::finish() {
  if (finished_) return;
  finished_ = true;
  ByteWriter w;
  w.u64(count_);
  out_.seekp(static_cast<std::streamoff>(kCountOffset));
  out_.write(reinterpret_cast<const char*>(w.buffer().data()), 8);
  out_.close();
  if (out_.fail()) throw IoError("failed to finalize " + path_);
}

void write_replay(const std::string& path, const ReplayHeader& header,
                  std::span<const ReplayRecord> records) {
  ReplayWriter writer(path, header.width, header.height, header.informed);
  for (const auto& r : records) writer.append(r);
  writer.finish();
}

Replay read_replay(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ReplayError(ReplayError::Kind::io, -1, "cannot open replay: " + path);
  const std::vector<std::uint8_t> data((std::istreambuf_iterator<char>(in)),
                                       std::istreambuf_iterator<char>());
  if (data.size() < kHeaderSize) {
    if (data.size() >= 8 && std::memcmp(data.data(), kMagic, 8) != 0) {
      throw ReplayError(ReplayError::Kind::bad_magic, -1, path + ": not a replay file");
    }
    throw ReplayError(ReplayError::Kind::truncated, -1, path + ": truncated header");
  }
  if (std::memcmp(data.data(), kMagic, 8) != 0) {
    throw ReplayError(ReplayError::Kind::bad_magic, -1, path + ": not a replay file");
  }
  ByteReader hr(std::span<const std::uint8_t>(data).subspan(8, kHeaderSize - 8), -1);
  Replay replay;
  replay.header.version = hr.u32();
  if (replay.header.version != kReplayVersion) {
    throw ReplayError(ReplayError::Kind::version_mismatch, -1,
                      path + ": replay version " + std::to_string(replay.header.version) +
                        ", expected " + std::to_string(kReplayVersion));
  }
  replay.header.width = hr.u32();
  replay.header.height = hr.u32();
  replay.header.informed = (hr.u32() & 1u) != 0;
  replay.header.record_count = hr.u64();

  std::size_t pos = kHeaderSize;
  auto truncated = [&](std::uint64_t i) {
    return ReplayError(ReplayError::Kind::truncated, static_cast<std::int64_t>(i),
                       path + ": truncated at record " + std::to_string(i) + " of " +
                         std::to_string(replay.header.record_count));
  };
  for (std::uint64_t i = 0; i < replay.header.record_count; ++i) {
    if (data.size() - pos < 4) throw truncated(i);
    ByteReader lr(std::span<const std::uint8_t>(data).subspan(pos, 4), static_cast<std::int64_t>(i));
    const std::uint32_t len = lr.u32();
    pos += 4;
    if (data.size() - pos < static_cast<std::size_t>(len) + 4) throw truncated(i);
    const auto payload = std::span(data).subspan(pos, len);
    pos += len;
    ByteReader cr(std::span<const std::uint8_t>(data).subspan(pos, 4), static_cast<std::int64_t>(i));
    const std::uint32_t stored = cr.u32();
    pos += 4;
    if (stored != checksum(payload)) {
      throw ReplayError(ReplayError::Kind::checksum, static_cast<std::int64_t>(i),
                        path + ": checksum mismatch in record " + std::to_string(i));
    }
    replay.records.push_back(decode_record(payload, replay.header.width, replay.header.height,
                                           static_cast<std::int64_t>(i)));
  }
  if (pos != data.size()) {
    throw ReplayError(ReplayError::Kind::malformed,
                      static_cast<std::int64_t>(replay.header.record_count),
                      path + ": unexpected bytes after the last record");
  }
  return replay;
}

std::string replay_schema_text() {
  return R"(racesim replay, format version 1 (little-endian)

header (32 bytes)
  magic            8 bytes  "RSREPLAY"
  version          u32      1
  width            u32      mask width in pixels
  height           u32      mask height in pixels
  flags            u32      bit 0: privileged observations present
  record_count     u64

record
  length           u32      payload byte count
  payload          length bytes
  crc32            u32      zlib crc32 of the payload

payload
  kind             u8       0 = reset, 1 = step
  episode          u32
  step             i64      step index within the episode
  mask             ceil(W*H/8) bytes, row-major, MSB first
  rates            3 x f64  measured body rates, rad/s
  motor_speeds     4 x f64  measured propeller speeds, rad/s
  flight_plan      24 x f64
  has_priv         u8
  priv             57 x f64 when has_priv: p_w(3) p_g(3) v_w(3) v_g(3)
                            roll pitch yaw_w yaw_g(4) rates(3) motors(4)
                            camera roll pitch yaw(3) d(31)
  action           4 x f64  normalized command submitted this step
  reward           4 x f64  progress, rate, gate, total
  termination      u8       0 none, 1 gate_collision, 2 ground_collision
  term_gate        i32
  term_ground      u32      bit 0 vertical speed, bit 1 roll, bit 2 pitch
  truncated        u8
  laps             u32
  fp_index         i64
  fp_advanced      u8
  target_gate      i64
  specific_force   f64      |F|, m/s^2
  specific_thrust  f64      k_w * sum(omega^2), m/s^2
  speed            f64      |v_w|, m/s
  crossing_count   u16
  crossings        per crossing: gate i32, kind u8 (0 pre, 1 main, 2 post),
                   y f64, z f64, half_extent f64
)";
}

}  // namespace racesim
