#include "holelab/config.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <istream>
#include <sstream>

#include "holelab/errors.hpp"

namespace holelab {

namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

}  // namespace

Config Config::parse(std::istream& in, const std::string& source) {
  Config c;
  std::string line;
  int number = 0;
  while (std::getline(in, line)) {
    ++number;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) {
      throw Error(ErrorKind::PlanInvalid, source + ":" + std::to_string(number) + ": expected key = value");
    }
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    if (key.empty()) throw Error(ErrorKind::PlanInvalid, source + ":" + std::to_string(number) + ": empty key");
    c.entries_.emplace_back(key, value);
  }
  return c;
}

Config Config::load(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorKind::PlanInvalid, "cannot open config file " + path);
  return parse(in, path);
}

void Config::set(const std::string& key, const std::string& value) {
  std::erase_if(entries_, [&](const auto& e) { return e.first == key; });
  entries_.emplace_back(key, value);
}

void Config::erase(const std::string& key) {
  std::erase_if(entries_, [&](const auto& e) { return e.first == key; });
}

bool Config::has(const std::string& key) const { return get(key).has_value(); }

std::optional<std::string> Config::get(const std::string& key) const {
  std::optional<std::string> out;
  for (const auto& [k, v] : entries_) {
    if (k == key) out = v;
  }
  return out;
}

std::vector<std::string> Config::get_all(const std::string& key) const {
  std::vector<std::string> out;
  for (const auto& [k, v] : entries_) {
    if (k == key) out.push_back(v);
  }
  return out;
}

double parse_number(const std::string& key, const std::string& text) {
  const std::string t = trim(text);
  double value = 0.0;
  const auto [ptr, ec] = std::from_chars(t.data(), t.data() + t.size(), value);
  if (ec != std::errc() || ptr != t.data() + t.size() || t.empty()) {
    throw Error(ErrorKind::PlanInvalid, key + ": '" + text + "' is not a number");
  }
  return value;
}

long parse_integer(const std::string& key, const std::string& text) {
  const std::string t = trim(text);
  long value = 0;
  const auto [ptr, ec] = std::from_chars(t.data(), t.data() + t.size(), value);
  if (ec != std::errc() || ptr != t.data() + t.size() || t.empty()) {
    throw Error(ErrorKind::PlanInvalid, key + ": '" + text + "' is not an integer");
  }
  return value;
}

bool parse_bool(const std::string& key, const std::string& text) {
  const std::string t = trim(text);
  if (t == "true" || t == "1" || t == "yes" || t == "on") return true;
  if (t == "false" || t == "0" || t == "no" || t == "off") return false;
  throw Error(ErrorKind::PlanInvalid, key + ": '" + text + "' is not a boolean");
}

std::vector<std::string> split_list(const std::string& text, char sep) {
  std::vector<std::string> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, sep)) {
    item = trim(item);
    if (!item.empty()) out.push_back(item);
  }
  return out;
}

std::vector<double> parse_numbers(const std::string& key, const std::string& text) {
  std::vector<double> out;
  for (const auto& item : split_list(text)) out.push_back(parse_number(key, item));
  if (out.empty()) throw Error(ErrorKind::PlanInvalid, key + ": empty list");
  return out;
}

std::vector<double> parse_geometric_range(const std::string& key, const std::string& text) {
  const auto parts = split_list(text, ':');
  if (parts.size() != 3) throw Error(ErrorKind::PlanInvalid, key + ": expected lo:hi:count");
  const double lo = parse_number(key, parts[0]);
  const double hi = parse_number(key, parts[1]);
  const long count = parse_integer(key, parts[2]);
  if (!(lo > 0.0) || !(hi > 0.0) || count < 1) {
    throw Error(ErrorKind::PlanInvalid, key + ": endpoints must be positive and count >= 1");
  }
  if (count == 1) return {lo};
  std::vector<double> out;
  const double ratio = std::log(hi / lo) / static_cast<double>(count - 1);
  for (long i = 0; i < count; ++i) out.push_back(i == count - 1 ? hi : lo * std::exp(ratio * i));
  return out;
}

}  // namespace holelab
