#include "tpnsi/ns_profile.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <system_error>

namespace tpnsi {

AlphaValue::AlphaValue(double value) : infinite_(false), value_(value) {
  if (!std::isfinite(value) || value < 0.0) {
    throw std::invalid_argument(
        "AlphaValue: finite construction requires a finite value >= 0");
  }
}

AlphaValue AlphaValue::infinity() { return AlphaValue(); }

double AlphaValue::value() const {
  if (infinite_) {
    throw std::logic_error("AlphaValue: value() called on the symbol inf");
  }
  return value_;
}

AlphaValue operator+(const AlphaValue& a, const AlphaValue& b) {
  if (a.infinite_ || b.infinite_) return AlphaValue::infinity();
  return AlphaValue(a.value_ + b.value_);
}

bool operator==(const AlphaValue& a, const AlphaValue& b) {
  if (a.infinite_ || b.infinite_) return a.infinite_ == b.infinite_;
  return a.value_ == b.value_;
}

bool operator<(const AlphaValue& a, const AlphaValue& b) {
  if (a.is_infinite()) return false;
  if (b.is_infinite()) return true;
  return a.value() < b.value();
}

AlphaValue scale_alpha(double c, const AlphaValue& a) {
  if (!std::isfinite(c) || c < 0.0) {
    throw std::invalid_argument("scale_alpha: requires a finite scalar >= 0");
  }
  if (a.is_infinite()) return AlphaValue::infinity();
  return AlphaValue(c * a.value());
}

AlphaValue min_alpha(const AlphaValue& a, const AlphaValue& b) {
  return b < a ? b : a;
}

std::string to_string(const AlphaValue& a) {
  if (a.is_infinite()) return "inf";
  std::ostringstream os;
  os.precision(17);
  os << a.value();
  return os.str();
}

std::ostream& operator<<(std::ostream& os, const AlphaValue& a) {
  return os << to_string(a);
}

AlphaValue NSProfile::alpha_at(int k) const {
  if (k < 0 || k >= top_degree) return AlphaValue::infinity();
  auto it = alpha.find(k);
  if (it == alpha.end()) return AlphaValue::infinity();
  return it->second;
}

double NSProfile::betti_at(int k) const {
  auto it = betti.find(k);
  return it == betti.end() ? 0.0 : it->second;
}

bool NSProfile::betti_all_zero() const {
  return std::all_of(betti.begin(), betti.end(),
                     [](const auto& kv) { return kv.second == 0.0; });
}

void NSProfile::validate() const {
  if (top_degree < 0) {
    throw std::invalid_argument("NSProfile: top_degree must be >= 0");
  }
  for (const auto& [k, a] : alpha) {
    if (k < 0 || k >= top_degree) {
      throw std::invalid_argument(
          "NSProfile: alpha entry at degree " + std::to_string(k) +
          " lies outside 0.." + std::to_string(top_degree - 1));
    }
    if (!a.is_infinite() && !(a.value() > 0.0)) {
      throw std::invalid_argument(
          "NSProfile: finite alpha at degree " + std::to_string(k) +
          " must be > 0");
    }
  }
  for (const auto& [k, b] : betti) {
    if (k < 0) {
      throw std::invalid_argument("NSProfile: betti degree must be >= 0");
    }
    if (!std::isfinite(b) || b < 0.0) {
      throw std::invalid_argument(
          "NSProfile: betti at degree " + std::to_string(k) +
          " must be finite and >= 0");
    }
  }
}

std::string serialize_ns_profile(const NSProfile& profile) {
  profile.validate();
  std::ostringstream os;
  os.precision(17);
  os << "top_degree = " << profile.top_degree << "\n";
  for (int k = 0; k < profile.top_degree; ++k) {
    os << "degree." << k << ".alpha = " << to_string(profile.alpha_at(k))
       << "\n";
  }
  for (int k = 0; k <= profile.top_degree; ++k) {
    os << "degree." << k << ".betti = " << profile.betti_at(k) << "\n";
  }
  return os.str();
}

namespace {

std::string trim(const std::string& s) {
  std::size_t b = s.find_first_not_of(" \t\r\n");
  if (b == std::string::npos) return "";
  std::size_t e = s.find_last_not_of(" \t\r\n");
  return s.substr(b, e - b + 1);
}

std::string lowercase(std::string s) {
  std::transform(s.begin(), s.end(), s.begin(),
                 [](unsigned char c) { return std::tolower(c); });
  return s;
}

[[noreturn]] void parse_fail(std::size_t line_no, const std::string& why) {
  throw std::invalid_argument("parse_ns_profile: line " +
                              std::to_string(line_no) + ": " + why);
}

double parse_number(const std::string& tok, std::size_t line_no) {
  try {
    std::size_t pos = 0;
    double v = std::stod(tok, &pos);
    if (pos != tok.size()) parse_fail(line_no, "trailing characters in number");
    return v;
  } catch (const std::invalid_argument&) {
    parse_fail(line_no, "expected a number, got '" + tok + "'");
  } catch (const std::out_of_range&) {
    parse_fail(line_no, "number out of range: '" + tok + "'");
  }
}

int parse_degree_index(const std::string& tok, std::size_t line_no) {
  int k = 0;
  auto [p, ec] = std::from_chars(tok.data(), tok.data() + tok.size(), k);
  if (ec != std::errc{} || p != tok.data() + tok.size() || k < 0) {
    parse_fail(line_no, "bad degree index '" + tok + "'");
  }
  return k;
}

}  // namespace

NSProfile parse_ns_profile(const std::string& text) {
  NSProfile profile;
  bool saw_top_degree = false;
  int max_degree_seen = -1;

  std::istringstream in(text);
  std::string raw;
  std::size_t line_no = 0;
  while (std::getline(in, raw)) {
    ++line_no;
    std::string line = raw;
    if (auto hash = line.find('#'); hash != std::string::npos) {
      line = line.substr(0, hash);
    }
    line = trim(line);
    if (line.empty()) continue;

    auto eq = line.find('=');
    if (eq == std::string::npos) parse_fail(line_no, "expected 'key = value'");
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    if (key.empty() || value.empty()) parse_fail(line_no, "empty key or value");

    if (key == "top_degree") {
      if (saw_top_degree) parse_fail(line_no, "duplicate top_degree");
      profile.top_degree = parse_degree_index(value, line_no);
      saw_top_degree = true;
      continue;
    }

    if (key.rfind("degree.", 0) != 0) {
      parse_fail(line_no, "unknown key '" + key + "'");
    }
    const std::string rest = key.substr(7);
    auto dot = rest.find('.');
    if (dot == std::string::npos) {
      parse_fail(line_no, "expected degree.<k>.<field>");
    }
    const int k = parse_degree_index(rest.substr(0, dot), line_no);
    const std::string field = rest.substr(dot + 1);
    max_degree_seen = std::max(max_degree_seen, k);

    if (field == "alpha") {
      if (profile.alpha.count(k)) {
        parse_fail(line_no, "duplicate alpha for degree " + std::to_string(k));
      }
      if (lowercase(value) == "inf") {
        profile.alpha.emplace(k, AlphaValue::infinity());
      } else {
        profile.alpha.emplace(k, AlphaValue(parse_number(value, line_no)));
      }
    } else if (field == "betti") {
      if (profile.betti.count(k)) {
        parse_fail(line_no, "duplicate betti for degree " + std::to_string(k));
      }
      profile.betti.emplace(k, parse_number(value, line_no));
    } else {
      parse_fail(line_no, "unknown field '" + field + "'");
    }
  }

  if (!saw_top_degree) {
    // Infer: alpha entries live below top_degree, betti entries at or below.
    int inferred = 0;
    for (const auto& [k, a] : profile.alpha) {
      (void)a;
      inferred = std::max(inferred, k + 1);
    }
    for (const auto& [k, b] : profile.betti) {
      (void)b;
      inferred = std::max(inferred, k);
    }
    profile.top_degree = inferred;
  }

  profile.validate();
  return profile;
}

}  // namespace tpnsi
