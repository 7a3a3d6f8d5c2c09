#include "arbminer/error.hpp"
#include "arbminer/ledger_io.hpp"
#include "support.hpp"

#include <gtest/gtest.h>

#include <sstream>

using namespace arbtest;

namespace {

std::vector<Leg> sample_legs() {
  auto a = leg("1303302180123456", "2011-04-20 12:23:00", 12, Side::Buy, Currency::USD, "1.5", "1.20", "98.1");
  a.money_fee = dec("0.0065");
  a.japan = JapanFlag::NJP;
  auto b = leg("1303302180123456", "2011-04-20 12:23:00", 99, Side::Sell, Currency::USD, "1.5", "1.20", "98.1");
  b.bitcoin_fee = dec("0.00975");
  b.japan = JapanFlag::JP;
  return {a, b};
}

} // namespace

TEST(LedgerIo, FamilyCalendar) {
  EXPECT_EQ(family_for_month(2011, 4), FormatFamily::April2011);
  EXPECT_EQ(family_for_month(2011, 5), FormatFamily::May11ToOct12);
  EXPECT_EQ(family_for_month(2012, 7), FormatFamily::July2012Exception);
  EXPECT_EQ(family_for_month(2012, 10), FormatFamily::May11ToOct12);
  EXPECT_EQ(family_for_month(2012, 11), FormatFamily::Nov12ToNov13);
  EXPECT_FALSE(family_for_month(2013, 12));
  EXPECT_EQ(family_for_path("leaked/2013-01_part2.csv"), FormatFamily::Nov12ToNov13);
  EXPECT_FALSE(family_for_path("trades.csv"));
  EXPECT_EQ(scheme_of(FormatFamily::April2011), McKind::Standard);
  EXPECT_EQ(scheme_of(FormatFamily::May11ToOct12), McKind::Tibanne);
  EXPECT_EQ(scheme_of(FormatFamily::July2012Exception), McKind::THK);
  EXPECT_EQ(leaked_columns(FormatFamily::Nov12ToNov13).size(), 19u);
  EXPECT_EQ(leaked_columns(FormatFamily::April2011).size(), 15u);
}

TEST(LedgerIo, TradeIdTime) {
  auto t = decode_trade_id_time("1303302180123456");
  ASSERT_TRUE(t);
  EXPECT_EQ(std::chrono::floor<std::chrono::seconds>(*t).time_since_epoch().count(), 1303302180);
  EXPECT_EQ(t->time_since_epoch().count() % 1000000, 123456);
  EXPECT_FALSE(decode_trade_id_time("35837"));
  EXPECT_FALSE(decode_trade_id_time("13033021801234x6"));
}

TEST(LedgerIo, RoundTripPreservesText) {
  for (auto fam : {FormatFamily::April2011, FormatFamily::Nov12ToNov13}) {
    auto legs = sample_legs();
    std::ostringstream out;
    write_leaked_file(out, legs, fam);
    std::istringstream in(out.str());
    auto parsed = parse_leaked_file(in, fam);
    ASSERT_TRUE(parsed.errors.empty());
    ASSERT_EQ(parsed.records.size(), 2u);
    EXPECT_TRUE(same_leg(parsed.records[0], legs[0]));
    EXPECT_EQ(parsed.records[0].money.to_string(), "1.20");
    EXPECT_EQ(parsed.records[1].japan, JapanFlag::JP);
    std::ostringstream again;
    write_leaked_file(again, parsed.records, fam);
    EXPECT_EQ(again.str(), out.str());
  }
}

TEST(LedgerIo, WrongHeaderIsFatal) {
  std::istringstream in("Trade_Id,Date\n1,2\n");
  try {
    parse_leaked_file(in, FormatFamily::April2011);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), "UnknownColumnSet");
    EXPECT_EQ(e.kind(), ErrorKind::InputFormat);
  }
  std::ostringstream wide;
  write_leaked_file(wide, sample_legs(), FormatFamily::Nov12ToNov13);
  std::istringstream narrow_read(wide.str());
  EXPECT_THROW(parse_leaked_file(narrow_read, FormatFamily::April2011), Error);
}

TEST(LedgerIo, RowErrorsAreCollected) {
  std::ostringstream out;
  write_leaked_file(out, sample_legs(), FormatFamily::April2011);
  std::string text = out.str();
  text += "x,2011-04-31 00:00:00,5,NJP,buy,USD,1,1,1,1,0,1,0,0,0\n";
  text += "y,2011-04-20 00:00:00,5,NJP,hold,USD,1,1,1,1,0,1,0,0,0\n";
  text += "z,2011-04-20 00:00:00,5,NJP,buy,USD,1\n";
  std::istringstream in(text);
  auto parsed = parse_leaked_file(in, FormatFamily::April2011);
  EXPECT_EQ(parsed.records.size(), 2u);
  ASSERT_EQ(parsed.errors.size(), 3u);
  EXPECT_EQ(parsed.errors[0].line, 4u);
  EXPECT_EQ(parsed.errors[0].code, "BadDate");
  EXPECT_EQ(parsed.errors[1].code, "BadEnumValue");
  EXPECT_EQ(parsed.errors[2].code, "BadRow");
}

TEST(LedgerIo, IntermediaryMustMatchScheme) {
  auto legs = sample_legs();
  legs[1].user_id = kThkUser;
  std::ostringstream out;
  write_leaked_file(out, legs, FormatFamily::April2011);
  std::istringstream in(out.str());
  auto parsed = parse_leaked_file(in, FormatFamily::April2011);
  ASSERT_EQ(parsed.errors.size(), 1u);
  EXPECT_EQ(parsed.errors[0].code, "UnexpectedIntermediary");

  std::ostringstream thk;
  write_leaked_file(thk, legs, FormatFamily::Nov12ToNov13);
  std::istringstream in2(thk.str());
  auto ok = parse_leaked_file(in2, FormatFamily::Nov12ToNov13);
  ASSERT_EQ(ok.records.size(), 2u);
  EXPECT_EQ(ok.records[0].mc_kind, McKind::THK);
  EXPECT_EQ(ok.records[1].user_id, kThkUser);
}

TEST(LedgerIo, PublicRoundTrip) {
  PublicTradeRecord r{"1303302180123456", make_instant(2011, 4, 20, 12, 23), Currency::JPY, dec("1.5"),
                      dec("98.1"), OrderKind::Market, Initiator::Ask};
  std::vector<PublicTradeRecord> recs{r};
  std::ostringstream out;
  write_public_file(out, recs);
  std::istringstream in(out.str());
  auto parsed = parse_public_file(in);
  ASSERT_TRUE(parsed.errors.empty());
  ASSERT_EQ(parsed.records.size(), 1u);
  EXPECT_EQ(parsed.records[0].order_kind, OrderKind::Market);
  EXPECT_EQ(parsed.records[0].initiator, Initiator::Ask);
  EXPECT_EQ(parsed.records[0].price, dec("98.1"));
}

TEST(LedgerIo, RateFiles) {
  std::istringstream iso("Time,Open,High,Low,Close\n2012-05-01 10:00:00,1.3,1,1,1\n2012-05-01 11:00:00,1.31,1,1,1\n");
  auto bars = parse_rate_file(iso, Currency::EUR, Currency::USD);
  ASSERT_EQ(bars.size(), 2u);
  EXPECT_DOUBLE_EQ(bars[1].open, 1.31);
  std::istringstream hist("20120501 100000;1.3;1;1;1\n");
  EXPECT_EQ(parse_rate_file(hist, Currency::EUR, Currency::USD)[0].hour, make_instant(2012, 5, 1, 10));

  std::istringstream dup("2012-05-01 10:00:00,1.3\n2012-05-01 10:30:00,1.3\n");
  try {
    parse_rate_file(dup, Currency::EUR, Currency::USD);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), "DuplicateHour");
  }
  std::istringstream neg("2012-05-01 10:00:00,0\n");
  EXPECT_THROW(parse_rate_file(neg, Currency::EUR, Currency::USD), Error);

  auto d = dyad_for_rate_path("rates/GBPUSD.csv");
  ASSERT_TRUE(d);
  EXPECT_EQ(d->first, Currency::GBP);
  EXPECT_EQ(d->second, Currency::USD);
}

TEST(LedgerIo, DailyVolumeRoundTrip) {
  std::vector<DailyVolume> rows{{make_day(2012, 1, 1), 12.5}, {make_day(2012, 1, 2), 7.0}};
  std::ostringstream out;
  write_daily_volume_file(out, rows);
  std::istringstream in(out.str());
  auto back = parse_daily_volume_file(in);
  ASSERT_EQ(back.size(), 2u);
  EXPECT_DOUBLE_EQ(back[0].volume, 12.5);
  EXPECT_EQ(back[1].day, make_day(2012, 1, 2));
}
