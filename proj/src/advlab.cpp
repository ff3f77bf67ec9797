#include "ppdeal/advlab.hpp"

#include <algorithm>
#include <filesystem>
#include <fstream>

#include "ppdeal/config_io.hpp"
#include "ppdeal/errors.hpp"

namespace ppdeal::lab {

using namespace wire;

DlogResult brute_force_dlog(const GroupParams& params, const MaskedElement& base,
                            const MaskedElement& target, uint64_t budget) {
  DlogResult result;
  if (mpz_fits_ulong_p(params.p.get_mpz_t()) && params.bit_length <= 62) {
    uint64_t p = params.p.get_ui();
    uint64_t b = base.value.get_ui();
    uint64_t t = target.value.get_ui();
    uint64_t acc = 1;
    for (uint64_t k = 1; k <= budget; ++k) {
      acc = static_cast<unsigned __int128>(acc) * b % p;
      ++result.steps;
      if (acc == t) {
        result.exponent = Bigint(static_cast<unsigned long>(k));
        return result;
      }
    }
    return result;
  }
  Bigint acc = 1;
  for (uint64_t k = 1; k <= budget; ++k) {
    acc = acc * base.value % params.p;
    ++result.steps;
    if (acc == target.value) {
      result.exponent = Bigint(static_cast<unsigned long>(k));
      return result;
    }
  }
  return result;
}

std::vector<MaskedElement> linkage_elements(const GroupParams& params,
                                            const Transcript& transcript,
                                            bool sent, uint8_t msg_type) {
  std::vector<MaskedElement> out;
  for (const TranscriptRecord& rec : transcript.records()) {
    if (rec.sent != sent || rec.msg.protocol_id != kProtoLinkage ||
        rec.msg.msg_type != msg_type)
      continue;
    PayloadReader r(rec.msg.payload);
    for (MaskedElement& e : r.element_list(params)) out.push_back(std::move(e));
  }
  return out;
}

namespace {

// same traversal as linkage_elements but grouped per frame
std::vector<std::vector<MaskedElement>> linkage_lists(const GroupParams& params,
                                                      const Transcript& transcript,
                                                      bool sent, uint8_t msg_type) {
  std::vector<std::vector<MaskedElement>> out;
  for (const TranscriptRecord& rec : transcript.records()) {
    if (rec.sent != sent || rec.msg.protocol_id != kProtoLinkage ||
        rec.msg.msg_type != msg_type)
      continue;
    PayloadReader r(rec.msg.payload);
    out.push_back(r.element_list(params));
  }
  return out;
}

bool contains_subsequence(const Bytes& haystack, const Bytes& needle) {
  if (needle.empty()) return true;
  return std::search(haystack.begin(), haystack.end(), needle.begin(), needle.end()) !=
         haystack.end();
}

}  // namespace

CollusionFinding collusion_audit(const SessionRecord& record,
                                 const std::vector<PartyId>& colluders,
                                 const PartyId& target, uint64_t dlog_budget,
                                 size_t closure_depth) {
  CollusionFinding finding;
  if (colluders.empty()) return finding;
  const GroupParams& params = record.params;
  auto need = [](const auto& map, const PartyId& id,
                 const char* what) -> const auto& {
    auto it = map.find(id);
    if (it == map.end())
      throw ConfigError(std::string(what) + " missing for party " + id +
                        " in session record");
    return it->second;
  };

  // (a) substring scan of every protocol payload in the colluders' views for
  // the target's fixed-width key encoding. Handshake frames carry only
  // public session config and are excluded: their digest bytes would trip a
  // one-byte scan at tiny groups without holding any key material.
  Bytes target_key_bytes = key_to_bytes(params, need(record.keys, target, "key"));
  std::set<Bigint> observed;
  for (const PartyId& colluder : colluders) {
    const Transcript& t = need(record.transcripts, colluder, "transcript");
    for (const TranscriptRecord& rec : t.records()) {
      if (rec.msg.protocol_id != kProtoLinkage) continue;
      finding.payload_bytes_scanned += rec.msg.payload.size();
      if (contains_subsequence(rec.msg.payload, target_key_bytes))
        finding.key_bytes_found = true;
      PayloadReader r(rec.msg.payload);
      for (const MaskedElement& e : r.element_list(params)) observed.insert(e.value);
    }
  }
  finding.observed_elements = observed.size();

  // (b) mechanical derived closure: everything the colluders can compute by
  // applying their own keys and inverses, to a bounded depth
  std::vector<SecretKey> colluder_keys;
  for (const PartyId& colluder : colluders) {
    colluder_keys.push_back(need(record.keys, colluder, "key"));
    colluder_keys.push_back(key_inverse(params, colluder_keys.back()));
  }
  constexpr size_t kClosureCap = 200000;
  std::set<Bigint> closure = observed;
  std::vector<Bigint> frontier(observed.begin(), observed.end());
  for (size_t depth = 0; depth < closure_depth && !frontier.empty(); ++depth) {
    std::vector<Bigint> next;
    for (const Bigint& v : frontier) {
      for (const SecretKey& k : colluder_keys) {
        Bigint derived = mask(params, MaskedElement{v}, k).value;
        if (closure.insert(derived).second) next.push_back(derived);
        if (closure.size() >= kClosureCap) break;
      }
      if (closure.size() >= kClosureCap) break;
    }
    frontier.swap(next);
  }
  finding.closure_size = closure.size();

  std::set<std::string> colluder_items;
  for (const PartyId& colluder : colluders)
    for (const std::string& item : need(record.items, colluder, "item list"))
      colluder_items.insert(item);
  for (const std::string& item : need(record.items, target, "item list")) {
    if (colluder_items.count(item)) continue;
    ++finding.target_only_items;
    if (closure.count(encode_item(params, item).value)) finding.closure_hit = true;
  }

  // (c) the lists flowing into and out of the target: a predecessor knows
  // what it sent to the target, a successor what it received from it. Hops
  // preserve order, so matching (in, out) pairs differ by exactly the
  // target's exponent.
  size_t target_index = record.parties.size();
  for (size_t i = 0; i < record.parties.size(); ++i)
    if (record.parties[i] == target) target_index = i;
  if (target_index == record.parties.size())
    throw ConfigError("target not in session record: " + target);
  const size_t n = record.parties.size();
  const PartyId pred = record.parties[(target_index + n - 1) % n];
  const PartyId succ = record.parties[(target_index + 1) % n];
  bool have_pred = std::count(colluders.begin(), colluders.end(), pred) > 0;
  bool have_succ = std::count(colluders.begin(), colluders.end(), succ) > 0;
  if (have_pred && have_succ && pred != target && succ != target) {
    auto sent_in =
        linkage_lists(params, need(record.transcripts, pred, "transcript"), true,
                      kMsgRingPass);
    auto recv_out =
        linkage_lists(params, need(record.transcripts, succ, "transcript"), false,
                      kMsgRingPass);
    std::set<Bigint> seen_keys;
    for (const auto& in_list : sent_in) {
      for (const auto& out_list : recv_out) {
        if (in_list.empty() || in_list.size() != out_list.size()) continue;
        DlogResult dlog =
            brute_force_dlog(params, in_list.front(), out_list.front(), dlog_budget);
        finding.dlog_steps += dlog.steps;
        if (!dlog.exponent) continue;
        SecretKey candidate{*dlog.exponent};
        bool consistent = true;
        for (size_t i = 1; i < in_list.size() && consistent; ++i)
          consistent = mask(params, in_list[i], candidate) == out_list[i];
        if (consistent && seen_keys.insert(candidate.exponent).second) {
          finding.recovered_keys.push_back(candidate.exponent);
          if (candidate.exponent == need(record.keys, target, "key").exponent)
            finding.recovered_target_key = true;
        }
      }
    }
  }
  return finding;
}

FrequencyReport frequency_audit(std::span<const MaskedElement> session_a,
                                std::span<const MaskedElement> session_b, bool salted) {
  FrequencyReport report;
  report.salted_expectation = salted;
  std::set<Bigint> a, b;
  for (const MaskedElement& e : session_a) a.insert(e.value);
  for (const MaskedElement& e : session_b) b.insert(e.value);
  report.session_a_size = a.size();
  report.session_b_size = b.size();
  size_t united = a.size();
  for (const Bigint& v : b)
    if (a.count(v))
      ++report.common;
    else
      ++united;
  report.linkage_rate = united == 0 ? 0.0 : double(report.common) / double(united);
  report.matches_expectation =
      salted ? report.common == 0
             : (united > 0 && report.common == united);
  return report;
}

std::vector<MaskedElement> published_set(const SessionRecord& record) {
  std::set<Bigint> values;
  for (const auto& [id, transcript] : record.transcripts)
    for (const MaskedElement& e :
         linkage_elements(record.params, transcript, true, kMsgPublish))
      values.insert(e.value);
  std::vector<MaskedElement> out;
  out.reserve(values.size());
  for (const Bigint& v : values) out.push_back(MaskedElement{v});
  return out;
}

NegotiationWireAudit audit_negotiation_transcript(const GroupParams& params,
                                                  const Transcript& transcript,
                                                  std::span<const int64_t> secret_prices) {
  NegotiationWireAudit audit;
  std::vector<Bytes> price_bytes;
  for (int64_t price : secret_prices) {
    Bytes enc(8);
    uint64_t v = static_cast<uint64_t>(price);
    for (int i = 0; i < 8; ++i) enc[i] = static_cast<uint8_t>(v >> (8 * (7 - i)));
    price_bytes.push_back(std::move(enc));
  }
  for (const TranscriptRecord& rec : transcript.records()) {
    if (rec.msg.protocol_id != kProtoNegotiation) continue;
    ++audit.protocol_frames;
    audit.payload_bytes_scanned += rec.msg.payload.size();
    for (const Bytes& enc : price_bytes)
      if (contains_subsequence(rec.msg.payload, enc)) audit.price_bytes_found = true;

    PayloadReader r(rec.msg.payload);
    try {
      switch (rec.msg.msg_type) {
        case kMsgAliceMasked:
        case kMsgAliceReturn:
          audit.elements_checked += r.element_list(params).size();
          r.expect_end();
          break;
        case kMsgBobMaskedAndDouble:
          audit.elements_checked += r.element_list(params).size();
          audit.elements_checked += r.element_list(params).size();
          r.expect_end();
          break;
        case kMsgFeasibility:
          if (rec.msg.payload.size() != 1 || rec.msg.payload[0] > 1)
            audit.all_elements_residues = false;
          break;
        default:
          audit.all_elements_residues = false;
      }
    } catch (const ProtocolAbort&) {
      // element parsing enforces residue membership; a throw means violation
      audit.all_elements_residues = false;
    }
  }
  return audit;
}

namespace {

namespace fs = std::filesystem;

void write_file(const fs::path& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ConfigError("cannot write " + path.string());
  out << content;
}

std::string read_file(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("cannot read " + path.string());
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

}  // namespace

void save_session_record(const SessionRecord& record, const std::string& dir) {
  fs::create_directories(dir);
  std::string manifest = "params = \"" + record.params_name + "\"\nparties = [";
  for (size_t i = 0; i < record.parties.size(); ++i) {
    if (i) manifest += ", ";
    manifest += "\"" + record.parties[i] + "\"";
  }
  manifest += "]\n";
  write_file(fs::path(dir) / "session.toml", manifest);
  for (const PartyId& id : record.parties) {
    if (auto it = record.transcripts.find(id); it != record.transcripts.end())
      write_file(fs::path(dir) / ("party_" + id + ".transcript.jsonl"),
                 it->second.to_jsonl());
    if (auto it = record.keys.find(id); it != record.keys.end())
      write_file(fs::path(dir) / ("party_" + id + ".key"),
                 to_hex(it->second.exponent) + "\n");
    if (auto it = record.items.find(id); it != record.items.end()) {
      std::string items;
      for (const std::string& item : it->second) items += item + "\n";
      write_file(fs::path(dir) / ("party_" + id + ".items"), items);
    }
  }
}

SessionRecord load_session_record(const std::string& dir) {
  SessionRecord record;
  cfg::TomlDoc manifest = cfg::toml_load((fs::path(dir) / "session.toml").string());
  record.params_name = manifest.root.get_string("params");
  record.params = named_params(record.params_name);
  const cfg::TomlValue* parties = manifest.root.find("parties");
  if (!parties || parties->kind != cfg::TomlValue::Kind::string_array)
    throw ConfigError("session.toml needs a parties array");
  record.parties = parties->array;

  // Single-party runs write only their own files; load whatever exists and
  // let audits that need missing ground truth fail with a clear message.
  for (const PartyId& id : record.parties) {
    fs::path transcript_path = fs::path(dir) / ("party_" + id + ".transcript.jsonl");
    if (fs::exists(transcript_path))
      record.transcripts[id] = Transcript::from_jsonl(read_file(transcript_path));
    fs::path key_path = fs::path(dir) / ("party_" + id + ".key");
    if (fs::exists(key_path)) {
      std::string key_hex = read_file(key_path);
      while (!key_hex.empty() && (key_hex.back() == '\n' || key_hex.back() == '\r'))
        key_hex.pop_back();
      record.keys[id] = SecretKey{from_hex(key_hex)};
    }
    fs::path items_path = fs::path(dir) / ("party_" + id + ".items");
    if (fs::exists(items_path)) {
      std::string items = read_file(items_path);
      std::vector<std::string> list;
      std::string line;
      for (char c : items) {
        if (c == '\n') {
          if (!line.empty()) list.push_back(line);
          line.clear();
        } else if (c != '\r') {
          line.push_back(c);
        }
      }
      if (!line.empty()) list.push_back(line);
      record.items[id] = std::move(list);
    }
  }
  return record;
}

}  // namespace ppdeal::lab
