#pragma once

#include <iosfwd>
#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace holelab {

// Plain "key = value" text; '#' starts a comment. Keys may repeat (the last
// occurrence wins for scalar lookups).
class Config {
 public:
  static Config parse(std::istream& in, const std::string& source = "<config>");
  static Config load(const std::string& path);

  void set(const std::string& key, const std::string& value);  // replaces every occurrence
  void erase(const std::string& key);
  bool has(const std::string& key) const;
  std::optional<std::string> get(const std::string& key) const;
  std::vector<std::string> get_all(const std::string& key) const;
  const std::vector<std::pair<std::string, std::string>>& entries() const { return entries_; }

 private:
  std::vector<std::pair<std::string, std::string>> entries_;
};

// Value parsers; all throw PlanInvalid naming `key` on malformed input.
double parse_number(const std::string& key, const std::string& text);
long parse_integer(const std::string& key, const std::string& text);
bool parse_bool(const std::string& key, const std::string& text);
std::vector<std::string> split_list(const std::string& text, char sep = ',');
std::vector<double> parse_numbers(const std::string& key, const std::string& text);
// "lo:hi:count", geometric, endpoints included, in the order written.
std::vector<double> parse_geometric_range(const std::string& key, const std::string& text);

}  // namespace holelab
