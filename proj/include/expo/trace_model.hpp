#pragma once

#include <array>
#include <compare>
#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace expo {

// Two-letter country token. Opaque beyond equality/ordering; "EU" and
// synthetic test codes are ordinary values.
class CountryCode {
 public:
  CountryCode() : code_{'A', 'A'} {}  // containers need a default; "AA" is valid

  explicit CountryCode(std::string_view token) {
    auto parsed = parse(token);
    if (!parsed) throw std::invalid_argument("bad country code: '" + std::string(token) + "'");
    code_ = parsed->code_;
  }

  static std::optional<CountryCode> parse(std::string_view token) {
    if (token.size() != 2) return std::nullopt;
    for (char c : token)
      if (c < 'A' || c > 'Z') return std::nullopt;
    CountryCode cc;
    cc.code_ = {token[0], token[1]};
    return cc;
  }

  std::string_view view() const { return {code_.data(), 2}; }
  std::string str() const { return std::string(view()); }

  auto operator<=>(const CountryCode&) const = default;

 private:
  std::array<char, 2> code_{};
};

enum class DatasetKind { kGeolocation, kRegistration };

inline std::string_view dataset_label(DatasetKind kind) {
  return kind == DatasetKind::kGeolocation ? "geo" : "reg";
}

inline std::optional<DatasetKind> dataset_from_label(std::string_view label) {
  if (label == "geo") return DatasetKind::kGeolocation;
  if (label == "reg") return DatasetKind::kRegistration;
  return std::nullopt;
}

// Opaque vantage-point token: non-empty, no whitespace.
class MonitorId {
 public:
  explicit MonitorId(std::string id) : id_(std::move(id)) {
    if (!valid(id_)) throw std::invalid_argument("bad monitor id: '" + id_ + "'");
  }

  static std::optional<MonitorId> parse(std::string_view token) {
    if (!valid(token)) return std::nullopt;
    MonitorId m;
    m.id_ = std::string(token);
    return m;
  }

  const std::string& str() const { return id_; }

  auto operator<=>(const MonitorId&) const = default;

 private:
  MonitorId() = default;
  static bool valid(std::string_view s) {
    if (s.empty()) return false;
    for (char c : s)
      if (c == ' ' || c == '\t' || c == '\n' || c == '\r' || c == '\v' || c == '\f') return false;
    return true;
  }
  std::string id_;
};

struct EmptyPathError : std::invalid_argument {
  EmptyPathError() : std::invalid_argument("country path must contain at least one hop") {}
};

// Ordered country sequence with consecutive duplicates collapsed. Loops that
// revisit a country non-consecutively are kept verbatim.
class CountryPath {
 public:
  static CountryPath normalized(std::span<const CountryCode> raw) {
    if (raw.empty()) throw EmptyPathError{};
    std::vector<CountryCode> hops;
    hops.reserve(raw.size());
    for (const CountryCode& c : raw)
      if (hops.empty() || hops.back() != c) hops.push_back(c);
    return CountryPath(std::move(hops));
  }

  static CountryPath normalized(std::initializer_list<CountryCode> raw) {
    return normalized(std::span<const CountryCode>(raw.begin(), raw.size()));
  }

  // Canonical text form: codes joined by '>', e.g. "US>DE>FR".
  static std::optional<CountryPath> parse(std::string_view text) {
    std::vector<CountryCode> hops;
    std::size_t pos = 0;
    while (pos <= text.size()) {
      const std::size_t sep = text.find('>', pos);
      const std::string_view tok =
          text.substr(pos, sep == std::string_view::npos ? std::string_view::npos : sep - pos);
      auto code = CountryCode::parse(tok);
      if (!code) return std::nullopt;
      if (!hops.empty() && hops.back() == *code) return std::nullopt;  // not compressed
      hops.push_back(*code);
      if (sep == std::string_view::npos) break;
      pos = sep + 1;
    }
    if (hops.empty()) return std::nullopt;
    return CountryPath(std::move(hops));
  }

  const std::vector<CountryCode>& hops() const { return hops_; }
  std::size_t hop_count() const { return hops_.size(); }
  CountryCode source() const { return hops_.front(); }
  CountryCode destination() const { return hops_.back(); }

  std::string str() const {
    std::string out;
    out.reserve(hops_.size() * 3);
    for (std::size_t i = 0; i < hops_.size(); ++i) {
      if (i) out.push_back('>');
      out.append(hops_[i].view());
    }
    return out;
  }

  auto operator<=>(const CountryPath&) const = default;

 private:
  explicit CountryPath(std::vector<CountryCode> hops) : hops_(std::move(hops)) {}
  std::vector<CountryCode> hops_;
};

inline CountryPath normalize_country_path(std::span<const CountryCode> raw) {
  return CountryPath::normalized(raw);
}

}  // namespace expo

template <>
struct std::hash<expo::CountryCode> {
  std::size_t operator()(const expo::CountryCode& c) const noexcept {
    const auto v = c.view();
    return static_cast<std::size_t>(v[0]) * 131 + static_cast<std::size_t>(v[1]);
  }
};

template <>
struct std::hash<expo::MonitorId> {
  std::size_t operator()(const expo::MonitorId& m) const noexcept {
    return std::hash<std::string>{}(m.str());
  }
};
