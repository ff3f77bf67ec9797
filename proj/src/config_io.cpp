#include "ppdeal/config_io.hpp"

#include <cctype>
#include <filesystem>
#include <fstream>
#include <set>
#include <sstream>

#include "ppdeal/errors.hpp"

namespace ppdeal::cfg {

namespace {

std::string trim(const std::string& s) {
  size_t start = s.find_first_not_of(" \t\r");
  if (start == std::string::npos) return "";
  size_t end = s.find_last_not_of(" \t\r");
  return s.substr(start, end - start + 1);
}

// strips a trailing comment that is not inside a string literal
std::string strip_comment(const std::string& line) {
  bool in_string = false;
  for (size_t i = 0; i < line.size(); ++i) {
    if (line[i] == '"') in_string = !in_string;
    if (line[i] == '#' && !in_string) return line.substr(0, i);
  }
  return line;
}

std::string parse_basic_string(const std::string& raw, int line_no) {
  if (raw.size() < 2 || raw.front() != '"' || raw.back() != '"')
    throw ConfigError("line " + std::to_string(line_no) + ": expected quoted string");
  std::string body = raw.substr(1, raw.size() - 2);
  if (body.find('"') != std::string::npos || body.find('\\') != std::string::npos)
    throw ConfigError("line " + std::to_string(line_no) +
                      ": escapes are outside the supported TOML subset");
  return body;
}

TomlValue parse_value(const std::string& raw, int line_no) {
  TomlValue v;
  if (raw.empty())
    throw ConfigError("line " + std::to_string(line_no) + ": missing value");
  if (raw.front() == '"') {
    v.kind = TomlValue::Kind::string;
    v.str = parse_basic_string(raw, line_no);
    return v;
  }
  if (raw.front() == '[') {
    if (raw.back() != ']')
      throw ConfigError("line " + std::to_string(line_no) + ": unterminated array");
    v.kind = TomlValue::Kind::string_array;
    std::string body = trim(raw.substr(1, raw.size() - 2));
    while (!body.empty()) {
      size_t comma = std::string::npos;
      bool in_string = false;
      for (size_t i = 0; i < body.size(); ++i) {
        if (body[i] == '"') in_string = !in_string;
        if (body[i] == ',' && !in_string) {
          comma = i;
          break;
        }
      }
      std::string entry = trim(comma == std::string::npos ? body : body.substr(0, comma));
      v.array.push_back(parse_basic_string(entry, line_no));
      body = comma == std::string::npos ? "" : trim(body.substr(comma + 1));
    }
    return v;
  }
  if (raw == "true" || raw == "false") {
    v.kind = TomlValue::Kind::boolean;
    v.boolean = raw == "true";
    return v;
  }
  v.kind = TomlValue::Kind::integer;
  try {
    size_t used = 0;
    v.integer = std::stoll(raw, &used, 10);
    if (used != raw.size()) throw std::invalid_argument(raw);
  } catch (const std::exception&) {
    throw ConfigError("line " + std::to_string(line_no) + ": bad value: " + raw);
  }
  return v;
}

bool valid_key(const std::string& key) {
  if (key.empty()) return false;
  for (char c : key)
    if (!std::isalnum(static_cast<unsigned char>(c)) && c != '_' && c != '-')
      return false;
  return true;
}

}  // namespace

const TomlValue* TomlTable::find(const std::string& key) const {
  auto it = values.find(key);
  return it == values.end() ? nullptr : &it->second;
}

std::string TomlTable::get_string(const std::string& key) const {
  const TomlValue* v = find(key);
  if (!v || v->kind != TomlValue::Kind::string)
    throw ConfigError("config is missing string key: " + key);
  return v->str;
}

int64_t TomlTable::get_integer(const std::string& key) const {
  const TomlValue* v = find(key);
  if (!v || v->kind != TomlValue::Kind::integer)
    throw ConfigError("config is missing integer key: " + key);
  return v->integer;
}

std::string TomlTable::get_string_or(const std::string& key,
                                     const std::string& fallback) const {
  const TomlValue* v = find(key);
  if (!v) return fallback;
  if (v->kind != TomlValue::Kind::string)
    throw ConfigError("config key is not a string: " + key);
  return v->str;
}

int64_t TomlTable::get_integer_or(const std::string& key, int64_t fallback) const {
  const TomlValue* v = find(key);
  if (!v) return fallback;
  if (v->kind != TomlValue::Kind::integer)
    throw ConfigError("config key is not an integer: " + key);
  return v->integer;
}

TomlDoc toml_parse(const std::string& text) {
  TomlDoc doc;
  TomlTable* current = &doc.root;
  std::istringstream in(text);
  std::string raw_line;
  int line_no = 0;
  while (std::getline(in, raw_line)) {
    ++line_no;
    std::string line = trim(strip_comment(raw_line));
    if (line.empty()) continue;

    if (line.front() == '[') {
      bool array = line.size() > 1 && line[1] == '[';
      std::string close = array ? "]]" : "]";
      if (line.substr(line.size() - close.size()) != close)
        throw ConfigError("line " + std::to_string(line_no) + ": bad table header");
      std::string name =
          trim(line.substr(array ? 2 : 1, line.size() - 2 * (array ? 2 : 1)));
      if (!valid_key(name))
        throw ConfigError("line " + std::to_string(line_no) + ": bad table name");
      if (array) {
        doc.table_arrays[name].emplace_back();
        current = &doc.table_arrays[name].back();
      } else {
        if (doc.tables.count(name))
          throw ConfigError("line " + std::to_string(line_no) +
                            ": duplicate table " + name);
        current = &doc.tables[name];
      }
      continue;
    }

    size_t eq = std::string::npos;
    bool in_string = false;
    for (size_t i = 0; i < line.size(); ++i) {
      if (line[i] == '"') in_string = !in_string;
      if (line[i] == '=' && !in_string) {
        eq = i;
        break;
      }
    }
    if (eq == std::string::npos)
      throw ConfigError("line " + std::to_string(line_no) + ": expected key = value");
    std::string key = trim(line.substr(0, eq));
    if (!valid_key(key))
      throw ConfigError("line " + std::to_string(line_no) + ": bad key: " + key);
    if (current->values.count(key))
      throw ConfigError("line " + std::to_string(line_no) + ": duplicate key: " + key);
    current->values[key] = parse_value(trim(line.substr(eq + 1)), line_no);
  }
  return doc;
}

std::string read_text_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("cannot read " + path);
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

void write_text_file(const std::string& path, const std::string& content, bool force) {
  if (!force && std::filesystem::exists(path))
    throw ConfigError(path + " exists; pass --force to overwrite");
  std::filesystem::path parent = std::filesystem::path(path).parent_path();
  if (!parent.empty()) std::filesystem::create_directories(parent);
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ConfigError("cannot write " + path);
  out << content;
}

TomlDoc toml_load(const std::string& path) { return toml_parse(read_text_file(path)); }

void save_params(const GroupParams& params, const std::string& name,
                 const std::string& path, bool force) {
  std::ostringstream out;
  out << "# ppdeal parameter set\n";
  out << "name = \"" << name << "\"\n";
  out << "bit_length = " << params.bit_length << "\n";
  out << "encoding = \"" << encoding_mode_name(params.encoding) << "\"\n";
  out << "p = \"" << to_hex(params.p) << "\"\n";
  out << "q = \"" << to_hex(params.q) << "\"\n";
  write_text_file(path, out.str(), force);
}

GroupParams load_params(const std::string& name_or_path) {
  for (const std::string& name : named_params_list())
    if (name == name_or_path) return named_params(name);
  TomlDoc doc = toml_load(name_or_path);
  GroupParams params;
  params.p = from_hex(doc.root.get_string("p"));
  params.q = from_hex(doc.root.get_string("q"));
  params.bit_length = static_cast<unsigned>(doc.root.get_integer("bit_length"));
  params.encoding = encoding_mode_from_name(doc.root.get_string("encoding"));
  params.validate();
  return params;
}

std::string params_display_name(const std::string& name_or_path) {
  for (const std::string& name : named_params_list())
    if (name == name_or_path) return name;
  return toml_load(name_or_path).root.get_string("name");
}

void save_key(const SecretKey& key, const std::string& params_name,
              const std::string& path, bool force) {
  std::ostringstream out;
  out << "# ppdeal secret key\n";
  out << "params = \"" << params_name << "\"\n";
  out << "exponent = \"" << to_hex(key.exponent) << "\"\n";
  write_text_file(path, out.str(), force);
}

SecretKey load_key(const std::string& path) {
  TomlDoc doc = toml_load(path);
  return SecretKey{from_hex(doc.root.get_string("exponent"))};
}

net::RingTopology load_ring_config(const std::string& path) {
  TomlDoc doc = toml_load(path);
  net::RingTopology topo;
  topo.params_name = doc.root.get_string_or("params", "toy64");
  topo.provider = provider_from_name(doc.root.get_string_or("provider", "null"));
  std::string psk_hex = doc.root.get_string_or("psk", "");
  if (!psk_hex.empty()) topo.psk = hex_to_bytes(psk_hex);
  if (topo.provider == Provider::psk && topo.psk.size() != PskChannel::kKeySize)
    throw ConfigError("psk provider needs a 64-hex-digit key in the ring config");

  auto it = doc.table_arrays.find("party");
  if (it == doc.table_arrays.end() || it->second.empty())
    throw ConfigError("ring config needs at least one [[party]]");
  for (const TomlTable& t : it->second)
    topo.parties.push_back({t.get_string("id"), t.get_string_or("addr", "")});

  auto med = doc.tables.find("mediator");
  if (med != doc.tables.end())
    topo.mediator = net::PartySpec{med->second.get_string("id"),
                                   med->second.get_string_or("addr", "")};

  auto sum = doc.tables.find("sum");
  if (sum != doc.tables.end()) {
    topo.sum_modulus = from_hex(sum->second.get_string("modulus"));
    topo.sum_value_bound = from_hex(sum->second.get_string("value_bound"));
  }

  std::set<std::string> ids;
  for (const net::PartySpec& p : topo.parties)
    if (!ids.insert(p.id).second) throw ConfigError("duplicate party id: " + p.id);
  if (topo.mediator && ids.count(topo.mediator->id))
    throw ConfigError("mediator id collides with a party id");
  return topo;
}

}  // namespace ppdeal::cfg
