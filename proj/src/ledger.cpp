#include "iiot/ledger.hpp"

#include <openssl/evp.h>

#include <fstream>
#include <iterator>
#include <string>

#include "iiot/errors.hpp"

namespace iiot {
namespace {

void put_u64(Bytes& out, std::uint64_t v) {
  for (int shift = 56; shift >= 0; shift -= 8) out.push_back(static_cast<std::uint8_t>(v >> shift));
}

void put_u32(Bytes& out, std::uint32_t v) {
  for (int shift = 24; shift >= 0; shift -= 8) out.push_back(static_cast<std::uint8_t>(v >> shift));
}

std::uint32_t checked_u32(std::size_t n, const char* what) {
  if (n > 0xFFFFFFFFu) throw DomainError(std::string(what) + " does not fit in 32 bits");
  return static_cast<std::uint32_t>(n);
}

class Reader {
 public:
  explicit Reader(std::span<const std::uint8_t> bytes) : bytes_(bytes) {}

  bool done() const { return pos_ == bytes_.size(); }
  std::size_t remaining() const { return bytes_.size() - pos_; }

  std::uint64_t u64() { return read_be(8); }
  std::uint32_t u32() { return static_cast<std::uint32_t>(read_be(4)); }
  std::uint8_t u8() { return static_cast<std::uint8_t>(read_be(1)); }

  std::span<const std::uint8_t> take(std::size_t n) {
    need(n);
    auto out = bytes_.subspan(pos_, n);
    pos_ += n;
    return out;
  }

 private:
  void need(std::size_t n) const {
    if (remaining() < n) throw IntegrityError("truncated ledger data");
  }

  std::uint64_t read_be(std::size_t n) {
    need(n);
    std::uint64_t v = 0;
    for (std::size_t i = 0; i < n; ++i) v = (v << 8) | bytes_[pos_ + i];
    pos_ += n;
    return v;
  }

  std::span<const std::uint8_t> bytes_;
  std::size_t pos_ = 0;
};

Block parse_block(std::span<const std::uint8_t> bytes) {
  Reader r(bytes);
  Block b;
  b.index = r.u64();
  const auto prev = r.take(32);
  std::copy(prev.begin(), prev.end(), b.prev_hash.begin());
  b.timestamp_tick = r.u64();
  const std::uint32_t count = r.u32();
  for (std::uint32_t i = 0; i < count; ++i) {
    Record rec;
    rec.device_id = DeviceId{r.u64()};
    const std::uint8_t code = r.u8();
    if (code >= kPhaseCount) throw IntegrityError("unknown phase code in ledger data");
    rec.phase = static_cast<Phase>(code);
    rec.tick = r.u64();
    const auto payload = r.take(r.u32());
    rec.payload.assign(payload.begin(), payload.end());
    b.records.push_back(std::move(rec));
  }
  if (!r.done()) throw IntegrityError("trailing bytes inside a ledger block");
  b.hash = hash_block(b.index, b.prev_hash, b.records, b.timestamp_tick);
  return b;
}

}  // namespace

std::string_view phase_name(Phase phase) {
  switch (phase) {
    case Phase::Manufacturing: return "manufacturing";
    case Phase::Storage: return "storage";
    case Phase::Shipping: return "shipping";
    case Phase::Monitoring: return "monitoring";
    case Phase::Generic: return "generic";
  }
  return "unknown";
}

Digest sha256(std::span<const std::uint8_t> data) {
  Digest out{};
  unsigned int len = 0;
  if (EVP_Digest(data.data(), data.size(), out.data(), &len, EVP_sha256(), nullptr) != 1 ||
      len != out.size()) {
    throw std::runtime_error("SHA-256 computation failed");
  }
  return out;
}

Bytes serialize_block(std::uint64_t index, const Digest& prev_hash,
                      std::span<const Record> records, std::uint64_t tick) {
  Bytes out;
  out.reserve(52 + records.size() * 32);
  put_u64(out, index);
  out.insert(out.end(), prev_hash.begin(), prev_hash.end());
  put_u64(out, tick);
  put_u32(out, checked_u32(records.size(), "record count"));
  for (const auto& r : records) {
    put_u64(out, r.device_id.value);
    out.push_back(static_cast<std::uint8_t>(r.phase));
    put_u64(out, r.tick);
    put_u32(out, checked_u32(r.payload.size(), "payload length"));
    out.insert(out.end(), r.payload.begin(), r.payload.end());
  }
  return out;
}

Bytes serialize_block(const Block& b) {
  return serialize_block(b.index, b.prev_hash, b.records, b.timestamp_tick);
}

Digest hash_block(std::uint64_t index, const Digest& prev_hash, std::span<const Record> records,
                  std::uint64_t tick) {
  return sha256(serialize_block(index, prev_hash, records, tick));
}

Ledger::Ledger(Phase phase, std::vector<Block> blocks) : phase_(phase), blocks_(std::move(blocks)) {
  commit();
}

void Ledger::commit() {
  committed_length_ = blocks_.size();
  committed_head_ = blocks_.empty() ? Digest{} : blocks_.back().hash;
}

Ledger Ledger::prefix(std::size_t count) const {
  if (count == 0 || count > blocks_.size()) throw DomainError("prefix length out of range");
  return Ledger(phase_, std::vector<Block>(blocks_.begin(), blocks_.begin() + count));
}

Ledger genesis(Phase phase) {
  Block g;
  g.index = 0;
  g.prev_hash = Digest{};
  g.timestamp_tick = 0;
  g.hash = hash_block(g.index, g.prev_hash, g.records, g.timestamp_tick);
  return Ledger(phase, {std::move(g)});
}

std::optional<Block> append_record(Ledger& ledger, Record record, bool miner_tf) {
  if (record.payload.empty()) throw DomainError("record payload must not be empty");
  if (record.phase != ledger.phase_) throw DomainError("record belongs to another phase chain");
  // Tail check only; a full walk is validate_chain's job.
  if (ledger.blocks_.empty() || ledger.blocks_.size() != ledger.committed_length_ ||
      ledger.tail().hash != ledger.committed_head_ ||
      hash_block(ledger.tail().index, ledger.tail().prev_hash, ledger.tail().records,
                 ledger.tail().timestamp_tick) != ledger.tail().hash) {
    throw IntegrityError("ledger tail does not match its committed head; append refused");
  }
  if (!miner_tf) return std::nullopt;

  Block b;
  b.index = ledger.blocks_.size();
  b.prev_hash = ledger.tail().hash;
  b.timestamp_tick = record.tick;
  b.records.push_back(std::move(record));
  b.hash = hash_block(b.index, b.prev_hash, b.records, b.timestamp_tick);
  ledger.blocks_.push_back(b);
  ledger.commit();
  return b;
}

ChainStatus validate_chain(const Ledger& ledger) {
  const auto& blocks = ledger.blocks_;
  for (std::size_t k = 0; k < blocks.size(); ++k) {
    const Block& b = blocks[k];
    if (b.index != k) return {k};
    const Digest expected_prev = k == 0 ? Digest{} : blocks[k - 1].hash;
    if (b.prev_hash != expected_prev) return {k};
    if (hash_block(b.index, b.prev_hash, b.records, b.timestamp_tick) != b.hash) return {k};
  }
  if (blocks.size() != ledger.committed_length_) {
    return {std::min(blocks.size(), ledger.committed_length_)};
  }
  if (blocks.empty()) return {0};
  if (blocks.back().hash != ledger.committed_head_) return {blocks.size() - 1};
  return {};
}

Ledger tamper(Ledger ledger, std::size_t index, Mutation mutation, std::size_t byte_offset) {
  auto& blocks = ledger.blocks_;
  if (index == 0 || index >= blocks.size()) throw DomainError("tamper index out of range");

  if (mutation == Mutation::DeleteBlock) {
    blocks.erase(blocks.begin() + static_cast<std::ptrdiff_t>(index));
    return ledger;
  }
  Block& b = blocks[index];
  Record* target = nullptr;
  for (auto& r : b.records) {
    if (!r.payload.empty()) {
      target = &r;
      break;
    }
  }
  if (target != nullptr) {
    target->payload[byte_offset % target->payload.size()] ^= 0xFF;
  } else {
    b.timestamp_tick ^= 1;
  }
  if (mutation == Mutation::HashFixup) {
    b.hash = hash_block(b.index, b.prev_hash, b.records, b.timestamp_tick);
  }
  return ledger;
}

Bytes dump_chain(const Ledger& ledger) {
  Bytes out;
  for (const auto& b : ledger.blocks()) {
    const Bytes block = serialize_block(b);
    put_u32(out, checked_u32(block.size(), "block size"));
    out.insert(out.end(), block.begin(), block.end());
  }
  return out;
}

Ledger load_chain(std::span<const std::uint8_t> bytes, Phase phase) {
  Reader r(bytes);
  std::vector<Block> blocks;
  while (!r.done()) {
    const std::uint32_t len = r.u32();
    blocks.push_back(parse_block(r.take(len)));
  }
  if (blocks.empty()) throw IntegrityError("ledger dump holds no blocks");
  return Ledger(phase, std::move(blocks));
}

void write_chain(const Ledger& ledger, const std::filesystem::path& path) {
  const Bytes data = dump_chain(ledger);
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw std::runtime_error("cannot open " + path.string() + " for writing");
  out.write(reinterpret_cast<const char*>(data.data()), static_cast<std::streamsize>(data.size()));
  if (!out) throw std::runtime_error("failed writing " + path.string());
}

Ledger read_chain(const std::filesystem::path& path, Phase phase) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open " + path.string());
  const Bytes data((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  return load_chain(data, phase);
}

}  // namespace iiot
