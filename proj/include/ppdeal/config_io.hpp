#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "ppdeal/cipher.hpp"
#include "ppdeal/net.hpp"

namespace ppdeal::cfg {

// Strict TOML subset: comments, [table] and [[table-array]] headers, and
// string / integer / boolean / string-array scalars. Everything this suite's
// config files need, nothing more; anything else is rejected loudly.
struct TomlValue {
  enum class Kind { string, integer, boolean, string_array };
  Kind kind = Kind::string;
  std::string str;
  int64_t integer = 0;
  bool boolean = false;
  std::vector<std::string> array;
};

struct TomlTable {
  std::map<std::string, TomlValue> values;

  const TomlValue* find(const std::string& key) const;
  std::string get_string(const std::string& key) const;
  int64_t get_integer(const std::string& key) const;
  std::string get_string_or(const std::string& key, const std::string& fallback) const;
  int64_t get_integer_or(const std::string& key, int64_t fallback) const;
};

struct TomlDoc {
  TomlTable root;
  std::map<std::string, TomlTable> tables;
  std::map<std::string, std::vector<TomlTable>> table_arrays;
};

TomlDoc toml_parse(const std::string& text);
TomlDoc toml_load(const std::string& path);

// parameter-set and key files (hex-encoded big integers)

void save_params(const GroupParams& params, const std::string& name,
                 const std::string& path, bool force);
// Accepts a named set ("modp2048", ...) or a path to a params file; files
// are re-validated on load.
GroupParams load_params(const std::string& name_or_path);
std::string params_display_name(const std::string& name_or_path);

void save_key(const SecretKey& key, const std::string& params_name,
              const std::string& path, bool force);
SecretKey load_key(const std::string& path);

// ring configuration file (parties, addresses, parameter set, ring order)
net::RingTopology load_ring_config(const std::string& path);

std::string read_text_file(const std::string& path);
void write_text_file(const std::string& path, const std::string& content, bool force);

}  // namespace ppdeal::cfg
