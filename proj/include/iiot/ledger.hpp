#pragma once

// Private append-only hash chain, one per industrial process phase.
//
// Canonical block serialization (hash input and dump format), all integers
// big-endian:
//   index u64 | prev_hash 32 bytes | tick u64 | record count u32 |
//   per record: device_id u64 | phase u8 | tick u64 | payload length u32 | payload
// A chain dump is the blocks in index order, each prefixed by its u32 length.

#include <array>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <string_view>
#include <vector>

#include "iiot/trust.hpp"

namespace iiot {

using Digest = std::array<std::uint8_t, 32>;
using Bytes = std::vector<std::uint8_t>;

enum class Phase : std::uint8_t {
  Manufacturing = 0,
  Storage = 1,
  Shipping = 2,
  Monitoring = 3,
  Generic = 4,
};

inline constexpr std::size_t kPhaseCount = 5;

std::string_view phase_name(Phase phase);

struct Record {
  DeviceId device_id;
  Phase phase = Phase::Generic;
  Bytes payload;
  std::uint64_t tick = 0;

  friend bool operator==(const Record&, const Record&) = default;
};

struct Block {
  std::uint64_t index = 0;
  Digest prev_hash{};
  std::vector<Record> records;
  std::uint64_t timestamp_tick = 0;
  Digest hash{};

  friend bool operator==(const Block&, const Block&) = default;
};

Digest sha256(std::span<const std::uint8_t> data);

Bytes serialize_block(std::uint64_t index, const Digest& prev_hash,
                      std::span<const Record> records, std::uint64_t tick);
Bytes serialize_block(const Block& block);

Digest hash_block(std::uint64_t index, const Digest& prev_hash, std::span<const Record> records,
                  std::uint64_t tick);

/// Result of validate_chain: empty for a valid chain, otherwise the smallest
/// failing block index.
struct ChainStatus {
  std::optional<std::size_t> invalid_at;

  bool valid() const { return !invalid_at.has_value(); }
  friend bool operator==(const ChainStatus&, const ChainStatus&) = default;
};

enum class Mutation { PayloadFlip, HashFixup, DeleteBlock };

class Ledger;

Ledger genesis(Phase phase);

/// Appends `record` as a new block mined by a device with trust factor
/// `miner_tf`. Returns the new block, or nullopt when the miner is untrusted.
/// Throws DomainError for an empty payload or a record from another phase,
/// and IntegrityError when the chain tail no longer matches its head.
std::optional<Block> append_record(Ledger& ledger, Record record, bool miner_tf);

ChainStatus validate_chain(const Ledger& ledger);

/// Attacker model: mutates block `index` (>= 1) without revalidating.
/// PayloadFlip inverts one payload byte, HashFixup does the same and then
/// recomputes that block's hash, DeleteBlock removes the block and leaves the
/// gap. Throws DomainError when `index` is 0 or past the end.
Ledger tamper(Ledger ledger, std::size_t index, Mutation mutation, std::size_t byte_offset = 0);

Bytes dump_chain(const Ledger& ledger);

/// Parses a dump. Block hashes are recomputed from the bytes; the loaded tail
/// becomes the committed head. Throws IntegrityError on malformed input.
Ledger load_chain(std::span<const std::uint8_t> bytes, Phase phase);

void write_chain(const Ledger& ledger, const std::filesystem::path& path);
Ledger read_chain(const std::filesystem::path& path, Phase phase);

/// A phase chain. Besides its blocks the ledger keeps the committed head: the
/// length and tail hash as of the last trusted append. Tampering with the
/// blocks does not move the head, so truncation and tail rewrites remain
/// detectable.
class Ledger {
 public:
  Phase phase() const { return phase_; }
  const std::vector<Block>& blocks() const { return blocks_; }
  std::size_t size() const { return blocks_.size(); }
  const Block& tail() const { return blocks_.back(); }

  /// The first `count` blocks as a ledger of their own, committed at its tail.
  Ledger prefix(std::size_t count) const;

  friend bool operator==(const Ledger&, const Ledger&) = default;

 private:
  Ledger(Phase phase, std::vector<Block> blocks);

  void commit();

  Phase phase_;
  std::vector<Block> blocks_;
  std::size_t committed_length_ = 0;
  Digest committed_head_{};

  friend Ledger genesis(Phase);
  friend std::optional<Block> append_record(Ledger&, Record, bool);
  friend ChainStatus validate_chain(const Ledger&);
  friend Ledger tamper(Ledger, std::size_t, Mutation, std::size_t);
  friend Ledger load_chain(std::span<const std::uint8_t>, Phase);
};

}  // namespace iiot
