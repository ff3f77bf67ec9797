#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "ppdeal/wire.hpp"

namespace ppdeal {

// Append-only, byte-faithful record of every protocol frame a party sent or
// received. The timestamp is a logical per-transcript sequence number so
// that identically-seeded runs export identical bytes.
struct TranscriptRecord {
  bool sent = false;
  uint64_t seq = 0;
  wire::WireMessage msg;
};

class Transcript {
 public:
  void record_sent(const wire::WireMessage& msg) { append(true, msg); }
  void record_received(const wire::WireMessage& msg) { append(false, msg); }

  const std::vector<TranscriptRecord>& records() const { return records_; }

  // One JSON object per line: {"seq":N,"dir":"sent","frame":"<hex>"}
  std::string to_jsonl() const;
  static Transcript from_jsonl(const std::string& text);

 private:
  void append(bool sent, const wire::WireMessage& msg);

  std::vector<TranscriptRecord> records_;
  uint64_t next_seq_ = 0;
};

}  // namespace ppdeal
