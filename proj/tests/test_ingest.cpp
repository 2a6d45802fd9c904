#include "expo/ingest.hpp"

#include <gtest/gtest.h>

#include <set>
#include <string>
#include <utility>
#include <vector>

#include "expo/rng.hpp"
#include "expo/trace_model.hpp"

using expo::AsPathRecord;
using expo::CountryPath;
using expo::MonitorId;
using expo::TraceRecord;

namespace {

TEST(ParseTraceLine, BasicRecord) {
  const TraceRecord rec = expo::parse_trace_line("m1\t10.0.0.1,10.1.2.3,192.0.2.9");
  EXPECT_EQ(rec.monitor.str(), "m1");
  ASSERT_EQ(rec.hops.size(), 3u);
  EXPECT_EQ(rec.hops[0].str(), "10.0.0.1");
  EXPECT_EQ(rec.hops[1].str(), "10.1.2.3");
  EXPECT_EQ(rec.hops[2].str(), "192.0.2.9");
}

TEST(ParseTraceLine, UnresolvedMarkerPassesThrough) {
  const TraceRecord rec = expo::parse_trace_line("m1\t10.0.0.1,*,10.0.9.9");
  ASSERT_EQ(rec.hops.size(), 3u);
  EXPECT_TRUE(rec.hops[1].is_star());
  EXPECT_FALSE(rec.hops[0].is_star());
}

TEST(ParseTraceLine, EmptyHopListFails) {
  try {
    expo::parse_trace_line("m1\t", 17);
    FAIL() << "expected ParseError";
  } catch (const expo::ParseError& e) {
    EXPECT_EQ(e.line_no, 17u);
    EXPECT_EQ(e.reason, "empty hop list");
  }
}

TEST(ParseTraceLine, RejectsBadAddresses) {
  EXPECT_THROW(expo::parse_trace_line("m1\t10.0.0"), expo::ParseError);
  EXPECT_THROW(expo::parse_trace_line("m1\t10.0.0.256"), expo::ParseError);
  EXPECT_THROW(expo::parse_trace_line("m1\t10.0.0.01"), expo::ParseError);
  EXPECT_THROW(expo::parse_trace_line("m1\t1.2.3.4.5"), expo::ParseError);
  EXPECT_THROW(expo::parse_trace_line("no-tabs-here"), expo::ParseError);
  EXPECT_THROW(expo::parse_trace_line("m1\t1.2.3.4\textra"), expo::ParseError);
}

TEST(ParseBgpLine, CollapsesPrepending) {
  const AsPathRecord rec = expo::parse_bgp_line("r1\t192.0.2.0/24\t701 701 3356 15169");
  EXPECT_EQ(rec.monitor.str(), "r1");
  EXPECT_EQ(rec.prefix, "192.0.2.0/24");
  EXPECT_EQ(rec.asns, (std::vector<std::uint32_t>{701, 3356, 15169}));
}

TEST(ParseBgpLine, SingleHop) {
  const AsPathRecord rec = expo::parse_bgp_line("r1\t192.0.2.0/24\t701");
  EXPECT_EQ(rec.asns, (std::vector<std::uint32_t>{701}));
}

TEST(ParseBgpLine, AsSetRejected) {
  EXPECT_THROW(expo::parse_bgp_line("r1\t192.0.2.0/24\t701 {3356,1299}"),
               expo::AsSetUnsupportedError);
}

TEST(ParseBgpLine, AsnRange) {
  EXPECT_EQ(expo::parse_bgp_line("r1\tp\t4294967295").asns[0], 4294967295u);
  EXPECT_THROW(expo::parse_bgp_line("r1\tp\t0"), expo::ParseError);
  EXPECT_THROW(expo::parse_bgp_line("r1\tp\t4294967296"), expo::ParseError);
  EXPECT_THROW(expo::parse_bgp_line("r1\tp\tAS701"), expo::ParseError);
  EXPECT_THROW(expo::parse_bgp_line("r1\tp\t701 "), expo::ParseError);
}

TEST(ParseFormat, TraceIdentityOnRandomRecords) {
  expo::SplitMix64 rng(99);
  for (int trial = 0; trial < 300; ++trial) {
    std::string line = "mon" + std::to_string(trial);
    line.push_back('\t');
    const std::size_t hops = 1 + rng.bounded(8);
    for (std::size_t i = 0; i < hops; ++i) {
      if (i) line.push_back(',');
      if (rng.bounded(5) == 0) {
        line += "*";
      } else {
        line += std::to_string(rng.bounded(256)) + "." + std::to_string(rng.bounded(256)) + "." +
                std::to_string(rng.bounded(256)) + "." + std::to_string(rng.bounded(256));
      }
    }
    const TraceRecord rec = expo::parse_trace_line(line);
    EXPECT_EQ(expo::format_trace_line(rec), line);
    EXPECT_EQ(expo::parse_trace_line(expo::format_trace_line(rec)), rec);
  }
}

TEST(ParseFormat, BgpIdentityOnRandomRecords) {
  expo::SplitMix64 rng(100);
  for (int trial = 0; trial < 300; ++trial) {
    AsPathRecord rec{MonitorId("r" + std::to_string(trial)), "203.0.113.0/24", {}};
    const std::size_t len = 1 + rng.bounded(6);
    for (std::size_t i = 0; i < len; ++i) {
      const std::uint32_t asn = 1 + static_cast<std::uint32_t>(rng.bounded(1 << 20));
      if (rec.asns.empty() || rec.asns.back() != asn) rec.asns.push_back(asn);
    }
    const std::string line = expo::format_bgp_line(rec);
    EXPECT_EQ(expo::parse_bgp_line(line), rec);
  }
}

TEST(MonitorTableParse, BasicAndConflicts) {
  const auto table = expo::parse_monitor_table("# comment\nm1\tUS\nm2\tDE\n\nm3\tUS\n");
  EXPECT_EQ(table.size(), 3u);
  EXPECT_EQ(table.find(MonitorId("m2"))->str(), "DE");
  EXPECT_THROW(expo::parse_monitor_table("m1\tUS\nm1\tDE\n"), expo::ParseError);
  EXPECT_THROW(expo::parse_monitor_table("m1 US\n"), expo::ParseError);
}

TEST(Dedup, SetSemanticsAndOrder) {
  const auto us_de = *CountryPath::parse("US>DE");
  const MonitorId m1("m1"), m2("m2");
  const std::vector<std::pair<MonitorId, CountryPath>> stream{
      {m1, us_de}, {m1, us_de}, {m2, us_de}};
  const auto out = expo::dedup_paths(stream);
  ASSERT_EQ(out.size(), 2u);
  EXPECT_EQ(out[0].first, m1);
  EXPECT_EQ(out[1].first, m2);

  EXPECT_TRUE(expo::dedup_paths({}).empty());
}

// 1e5 random pairs at roughly 50% duplication against an independent
// ordered-set oracle.
TEST(Dedup, MatchesSetOracle) {
  expo::SplitMix64 rng(0xded);
  std::vector<std::pair<MonitorId, CountryPath>> stream;
  const char* countries[] = {"AA", "AB", "AC", "AD", "AE"};
  for (int i = 0; i < 100000; ++i) {
    const MonitorId m("m" + std::to_string(rng.bounded(40)));
    std::vector<expo::CountryCode> raw;
    const std::size_t len = 1 + rng.bounded(3);
    for (std::size_t k = 0; k < len; ++k)
      raw.push_back(expo::CountryCode(countries[rng.bounded(5)]));
    stream.emplace_back(m, expo::normalize_country_path(raw));
  }

  std::set<std::pair<std::string, std::string>> oracle;
  for (const auto& [m, p] : stream) oracle.insert({m.str(), p.str()});

  const auto dedupped = expo::dedup_paths(stream);
  EXPECT_EQ(dedupped.size(), oracle.size());
  EXPECT_EQ(expo::dedup_paths(dedupped).size(), dedupped.size());  // idempotent
}

}  // namespace
