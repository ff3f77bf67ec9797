#include "ppdeal/transcript.hpp"

#include <sstream>

#include "json.hpp"
#include "ppdeal/errors.hpp"

namespace ppdeal {

void Transcript::append(bool sent, const wire::WireMessage& msg) {
  records_.push_back({sent, next_seq_++, msg});
}

std::string Transcript::to_jsonl() const {
  std::string out;
  for (const TranscriptRecord& rec : records_) {
    nlohmann::json line = {
        {"seq", rec.seq},
        {"dir", rec.sent ? "sent" : "received"},
        {"frame", bytes_to_hex(wire::frame(rec.msg))},
    };
    out += line.dump();
    out += '\n';
  }
  return out;
}

Transcript Transcript::from_jsonl(const std::string& text) {
  Transcript t;
  std::istringstream in(text);
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    nlohmann::json obj = nlohmann::json::parse(line, nullptr, false);
    if (obj.is_discarded() || !obj.contains("seq") || !obj.contains("dir") ||
        !obj.contains("frame"))
      throw ConfigError("malformed transcript line: " + line);
    wire::FrameReader reader;
    Bytes raw = hex_to_bytes(obj["frame"].get<std::string>());
    reader.feed(raw);
    auto msg = reader.next();
    if (!msg) throw ConfigError("transcript line holds a truncated frame");
    TranscriptRecord rec;
    rec.sent = obj["dir"].get<std::string>() == "sent";
    rec.seq = obj["seq"].get<uint64_t>();
    rec.msg = std::move(*msg);
    t.records_.push_back(std::move(rec));
    t.next_seq_ = rec.seq + 1;
  }
  return t;
}

}  // namespace ppdeal
