#include "arbminer/cli.hpp"

#include "arbminer/csv.hpp"
#include "arbminer/error.hpp"
#include "arbminer/fee_model.hpp"
#include "arbminer/ledger_io.hpp"
#include "arbminer/matcher.hpp"
#include "arbminer/regression.hpp"
#include "arbminer/robustness.hpp"
#include "arbminer/stage_io.hpp"
#include "arbminer/stats.hpp"
#include "arbminer/synth.hpp"

#include <CLI11.hpp>

#include <algorithm>
#include <cmath>
#include <fstream>
#include <map>
#include <set>
#include <sstream>

namespace fs = std::filesystem;

namespace arbminer {

std::vector<UserId> parse_id_list(const std::string& text) {
  std::vector<UserId> out;
  std::string item;
  std::istringstream in(text);
  while (std::getline(in, item, ',')) {
    auto b = item.find_first_not_of(" \t");
    if (b == std::string::npos) continue;
    auto e = item.find_last_not_of(" \t");
    auto id = parse_user_id(std::string_view(item).substr(b, e - b + 1));
    if (!id) throw usage_error("InvalidSpec", "bad user id in list: " + item);
    out.push_back(*id);
  }
  return out;
}

namespace {

constexpr const char* kRawLedger = "ledger_raw.csv";
constexpr const char* kRawPublic = "public_raw.csv";
constexpr const char* kCleanLedger = "ledger_clean.csv";
constexpr const char* kCleanPublic = "public_clean.csv";
constexpr const char* kFeeLedger = "ledger_fees.csv";
constexpr const char* kMatchedLedger = "ledger_matched.csv";
constexpr const char* kActions = "actions.csv";
constexpr const char* kPriced = "priced.csv";
constexpr const char* kProfiles = "profiles.csv";
constexpr const char* kMetaorders = "metaorders.csv";

struct Stage {
  const PipelineConfig& cfg;
  std::ostream& out;

  fs::path at(const std::string& name) const { return cfg.out_dir / name; }

  fs::path require(const std::string& name) const {
    fs::path p = at(name);
    if (!fs::exists(p)) throw usage_error("MissingStageInput", p.string() + " not found; run the earlier stage first");
    return p;
  }

  void write(const std::string& name, const std::string& content) const {
    write_file_atomic(at(name), content);
    out << "wrote " << at(name).string() << "\n";
  }
};

template <class T>
T parse_enum(std::optional<T> v, const std::string& text, const char* what) {
  if (!v) throw usage_error("InvalidSpec", std::string("unknown ") + what + ": " + text);
  return *v;
}

Decimal parse_threshold(const std::string& text) {
  auto d = Decimal::parse(text);
  if (!d || d->sign() < 0) throw usage_error("InvalidSpec", "dq must be a non-negative number: " + text);
  return *d;
}

Instant parse_cutoff(const std::string& text) {
  if (auto t = parse_datetime(text)) return *t;
  if (auto d = parse_date(text)) return Instant{*d};
  throw usage_error("InvalidSpec", "bad cutoff date: " + text);
}

std::vector<fs::path> expand_inputs(const std::vector<std::string>& inputs) {
  std::vector<fs::path> files;
  for (const auto& s : inputs) {
    fs::path p(s);
    if (fs::is_directory(p)) {
      std::vector<fs::path> inner;
      for (const auto& e : fs::directory_iterator(p))
        if (e.is_regular_file() && e.path().extension() == ".csv") inner.push_back(e.path());
      std::sort(inner.begin(), inner.end());
      files.insert(files.end(), inner.begin(), inner.end());
    } else if (fs::exists(p)) {
      files.push_back(p);
    } else {
      throw usage_error("MissingInput", s + " does not exist");
    }
  }
  return files;
}

std::vector<PublicTradeRecord> read_public(const fs::path& p, std::vector<RowError>* errors = nullptr) {
  std::ifstream in(p);
  if (!in) throw usage_error("MissingInput", "cannot open " + p.string());
  auto parsed = parse_public_file(in);
  if (errors) errors->insert(errors->end(), parsed.errors.begin(), parsed.errors.end());
  else if (!parsed.errors.empty())
    throw format_error(parsed.errors.front().code, p.string() + " line " + std::to_string(parsed.errors.front().line) +
                                                       ": " + parsed.errors.front().detail);
  return std::move(parsed.records);
}

std::string public_text(std::span<const PublicTradeRecord> records) {
  std::ostringstream os;
  write_public_file(os, records);
  return os.str();
}

// ---------------------------------------------------------------- ingest

void cmd_ingest(const Stage& st) {
  const auto& cfg = st.cfg;
  if (cfg.leaked.empty()) throw usage_error("InvalidSpec", "ingest needs --leaked files or directories");
  std::vector<Leg> legs;
  std::ostringstream errs;
  errs << "file,line,code,detail\n";
  std::size_t n_errors = 0;
  for (const auto& file : expand_inputs(cfg.leaked)) {
    std::optional<FormatFamily> fam = cfg.family.empty() ? family_for_path(file) : parse_family(cfg.family);
    if (!fam) throw usage_error("InvalidSpec", "cannot infer the format family of " + file.string());
    std::ifstream in(file);
    if (!in) throw usage_error("MissingInput", "cannot open " + file.string());
    auto parsed = parse_leaked_file(in, *fam);
    for (const auto& e : parsed.errors)
      errs << join_csv({file.filename().string(), std::to_string(e.line), e.code, e.detail}) << "\n";
    n_errors += parsed.errors.size();
    for (auto& l : parsed.records) legs.push_back(std::move(l));
  }
  if (!cfg.public_file.empty()) {
    std::vector<RowError> perr;
    auto pub = read_public(cfg.public_file, &perr);
    for (const auto& e : perr)
      errs << join_csv({fs::path(cfg.public_file).filename().string(), std::to_string(e.line), e.code, e.detail})
           << "\n";
    n_errors += perr.size();
    st.write(kRawPublic, public_text(pub));
  }
  st.write(kRawLedger, ledger_to_csv(legs));
  st.write("ingest_errors.csv", errs.str());
  st.out << "legs=" << legs.size() << " row_errors=" << n_errors << "\n";
  if (cfg.strict && n_errors > 0)
    throw format_error("BadRow", std::to_string(n_errors) + " malformed rows (see ingest_errors.csv)");
}

// ----------------------------------------------------------------- dedup

void cmd_dedup(const Stage& st) {
  const auto& cfg = st.cfg;
  auto method = parse_enum(parse_dedup_method(cfg.dedup_method), cfg.dedup_method, "dedup method");
  auto raw = ledger_from_csv(st.require(kRawLedger));
  std::vector<PublicTradeRecord> pub;
  if (fs::exists(st.at(kRawPublic))) pub = read_public(st.at(kRawPublic));

  auto d = dedup(raw, method);
  SanityOptions opt;
  opt.drop_last_day = !cfg.keep_last_day;
  opt.include_thk_primaries = cfg.include_thk_primaries;
  opt.willy_ids = parse_id_list(cfg.willy_ids);
  auto s = sanity_filter(std::move(d.legs), std::move(pub), opt);

  std::vector<Leg> legs = std::move(s.legs);
  if (cfg.anonymize) {
    auto a = anonymize_users(std::move(legs));
    legs = std::move(a.legs);
    std::ostringstream map;
    map << stage_preamble("user_map", kStageVersion) << "original_id,user_id\n";
    for (const auto& [from, to] : a.mapping) map << from << "," << to << "\n";
    st.write("user_map.csv", map.str());
  }
  auto merged = merge_public(std::move(legs), s.public_records);

  std::ostringstream report;
  report << "[dedup]\nmethod=" << to_string(method) << "\n"
         << d.report.to_text() << "[sanity]\n"
         << s.report.to_text() << "[merge]\npublic_misses=" << merged.misses << "\n";
  st.write("clean_report.txt", report.str());
  std::ostringstream unc;
  unc << "trade_id\n";
  for (const auto& id : s.uncorrectable_trades) unc << id << "\n";
  st.write("uncorrectable.csv", unc.str());

  if (!cfg.volume_file.empty()) {
    std::ifstream in(cfg.volume_file);
    if (!in) throw usage_error("MissingInput", "cannot open " + cfg.volume_file);
    auto ext = parse_daily_volume_file(in);
    std::ostringstream os;
    os << "date,leaked_usd,external_usd,normalized_diff,moving_average\n";
    for (const auto& c : compare_daily_volumes(merged.legs, ext))
      os << join_csv({format_date(c.day), format_double(c.leaked), format_double(c.external),
                      format_double(c.normalized_diff), format_double(c.moving_average)})
         << "\n";
    st.write("volume_check.csv", os.str());
  }

  st.write(kCleanPublic, public_text(s.public_records));
  st.write(kCleanLedger, ledger_to_csv(merged.legs));
  st.out << "input=" << raw.size() << " after_dedup=" << d.report.output_rows << " clean=" << merged.legs.size()
         << "\n";
}

// ------------------------------------------------------------------ fees

std::set<UserId> mapped_ids(const Stage& st, const std::string& list) {
  auto ids = parse_id_list(list);
  std::set<UserId> out(ids.begin(), ids.end());
  if (!fs::exists(st.at("user_map.csv"))) return out;
  auto t = read_stage_file(st.at("user_map.csv"), "user_map");
  std::map<UserId, UserId> m;
  for (const auto& r : t.rows)
    m[parse_int(r.at(t.header.at("original_id")), "original_id")] = parse_int(r.at(t.header.at("user_id")), "user_id");
  std::set<UserId> mapped;
  for (UserId id : out)
    if (auto it = m.find(id); it != m.end()) mapped.insert(it->second);
  return mapped;
}

void cmd_fees(const Stage& st) {
  const auto& cfg = st.cfg;
  auto legs = ledger_from_csv(st.require(kCleanLedger));
  VolumeScale scale;
  if (cfg.volume_scale == "log") scale = VolumeScale::Log;
  else if (cfg.volume_scale == "linear") scale = VolumeScale::Linear;
  else throw usage_error("InvalidSpec", "volume scale must be log or linear");

  auto obs = fee_observations(legs);
  FittedModel ols = fit_fee_ols(obs, cfg.fee_spec, scale);
  st.write("fee_model.txt", ols.to_text());
  // Expected fees always come from the log-volume spec-5 schedule.
  FittedModel schedule = cfg.fee_spec == 5 && scale == VolumeScale::Log ? ols : fit_fee_ols(obs, 5, VolumeScale::Log);
  annotate_expected_fees(legs, schedule);
  st.write(kFeeLedger, ledger_to_csv(legs));
  st.out << "fee_observations=" << obs.size() << " r2=" << format_double(ols.fit) << "\n";

  if (cfg.skip_logit) return;
  ZeroFeeConfig zc = ZeroFeeConfig::defaults();
  zc.anomalous_users = mapped_ids(st, cfg.anomalous_users);
  zc.markus_ids = mapped_ids(st, cfg.markus_ids);
  zc.willy_ids = mapped_ids(st, "1000000");
  auto zobs = zero_fee_observations(legs, zc);
  FittedModel logit = fit_zero_fee_logit(zobs, cfg.logit_spec);
  st.write("zero_fee_model.txt", logit.to_text());
  st.out << "zero_fee_observations=" << zobs.size() << " pseudo_r2=" << format_double(logit.fit) << "\n";
}

// ----------------------------------------------------------------- match

MatchConfig match_config(const PipelineConfig& cfg) {
  if (cfg.dt < 0) throw usage_error("InvalidSpec", "dt must be non-negative");
  return {cfg.dt, parse_threshold(cfg.dq)};
}

void cmd_match(const Stage& st) {
  const auto& cfg = st.cfg;
  fs::path src = fs::exists(st.at(kFeeLedger)) ? st.at(kFeeLedger) : st.require(kCleanLedger);
  auto legs = ledger_from_csv(src);
  auto sample = restrict_sample(legs, parse_cutoff(cfg.sample_cutoff));
  auto agg = aggregate_same_second(sample);
  auto actions = match_ledger(agg, match_config(cfg));
  st.write(kMatchedLedger, ledger_to_csv(agg));
  st.write(kActions, actions_to_csv(agg, actions));
  std::set<UserId> users;
  for (const auto& a : actions) users.insert(a.user);
  st.out << "actions=" << actions.size() << " users=" << users.size() << "\n";
}

// ----------------------------------------------------------------- price

RateTable load_rates(const PipelineConfig& cfg) {
  if (cfg.rates_dir.empty()) throw usage_error("InvalidSpec", "--rates directory is required");
  return RateTable::load_directory(cfg.rates_dir);
}

FeeSign fee_sign(const PipelineConfig& cfg) {
  if (cfg.fee_sign == "economic") return FeeSign::Economic;
  if (cfg.fee_sign == "as_printed") return FeeSign::AsPrinted;
  throw usage_error("InvalidSpec", "fee sign must be economic or as_printed");
}

void cmd_price(const Stage& st) {
  auto legs = ledger_from_csv(st.require(kMatchedLedger));
  auto actions = actions_from_csv(st.require(kActions), legs);
  auto priced = price_actions(legs, actions, load_rates(st.cfg), fee_sign(st.cfg));
  std::size_t excluded = 0, degenerate = 0;
  for (const auto& p : priced) {
    excluded += p.excluded_missing_rate;
    degenerate += p.degenerate;
  }
  st.write(kPriced, priced_to_csv(legs, priced));
  st.out << "priced=" << priced.size() << " missing_rate=" << excluded << " degenerate=" << degenerate << "\n";
}

// --------------------------------------------------------------- profile

void cmd_profile(const Stage& st) {
  auto legs = ledger_from_csv(st.require(kMatchedLedger));
  auto actions = actions_from_csv(st.require(kActions), legs);
  std::vector<std::optional<double>> usd(actions.size());
  if (fs::exists(st.at(kPriced))) {
    auto priced = priced_from_csv(st.at(kPriced), legs);
    if (priced.size() == actions.size())
      for (std::size_t i = 0; i < priced.size(); ++i) usd[i] = priced[i].usd;
  }
  MetaorderOptions mo{st.cfg.min_length, st.cfg.max_gap};
  auto metas = detect_metaorders(legs, actions, usd, mo);
  auto aggr = classify_aggressive(legs, actions);
  auto profiles = build_profiles(legs, actions, metas, aggr);

  std::ostringstream pca;
  pca << "component,d_currencies,log_actions,d_metaorder,d_aggressive,explained_pct\n";
  try {
    auto r = pca_scores(profiles);
    pca << "PC1";
    for (Eigen::Index j = 0; j < r.loading.size(); ++j) pca << "," << format_double(r.loading(j));
    pca << "," << format_double(100.0 * r.explained) << "\n";
  } catch (const Error& e) {
    if (e.code() != "DegenerateCovariance") throw;
    st.out << "pca skipped: " << e.what() << "\n";
  }
  st.write(kMetaorders, metaorders_to_csv(actions, metas));
  st.write(kProfiles, profiles_to_csv(profiles));
  st.write("pca.csv", pca.str());
  st.out << "users=" << profiles.size() << " metaorders=" << metas.size() << " aggressive=" << aggr.aggressive << "\n";
}

// --------------------------------------------------------------- regress

struct Analysis {
  std::vector<Leg> legs;
  std::vector<ArbitrageAction> actions;
  std::vector<PricedAction> priced;
  std::vector<UserProfile> profiles;
};

Analysis load_analysis(const Stage& st) {
  Analysis a;
  a.legs = ledger_from_csv(st.require(kMatchedLedger));
  a.actions = actions_from_csv(st.require(kActions), a.legs);
  a.priced = priced_from_csv(st.require(kPriced), a.legs);
  a.profiles = profiles_from_csv(st.require(kProfiles));
  return a;
}

void cmd_regress(const Stage& st) {
  const auto& cfg = st.cfg;
  auto regime = parse_enum(parse_fee_regime(cfg.regime), cfg.regime, "fee regime");
  auto a = load_analysis(st);
  std::vector<PricedAction> priced = a.priced;
  if (cfg.learning_max_days > 0) {
    AnalysisRun run;
    run.actions = a.actions;
    run.priced = a.priced;
    run.profiles = a.profiles;
    priced = apply_learning_filter(run, cfg.learning_max_days);
  }
  const std::string suffix = "_" + std::string(to_string(regime)) + ".csv";
  auto emit = [&](const std::string& name, const std::vector<TableColumn>& cols) {
    std::ostringstream os;
    write_regression_table(os, cols);
    st.write(name + suffix, os.str());
  };
  const std::set<std::string> known = {"all", "eq1_fe", "eq1_proxy", "eq2"};
  if (!known.count(cfg.table)) throw usage_error("InvalidSpec", "unknown table: " + cfg.table);
  if (cfg.table == "all" || cfg.table == "eq1_fe") emit("table_eq1_fe", table_eq1_fe_layout(priced, a.profiles, regime));
  if (cfg.table == "all" || cfg.table == "eq1_proxy")
    emit("table_eq1_proxy", table_eq1_proxy_layout(priced, a.profiles, regime));
  if (cfg.table == "all" || cfg.table == "eq2") emit("table_eq2", table_eq2_layout(priced, a.profiles, regime));
}

// ----------------------------------------------------------------- sweep

void cmd_sweep(const Stage& st) {
  const auto& cfg = st.cfg;
  if (cfg.grid != "default") throw usage_error("InvalidSpec", "only the default grid is available");
  auto legs = ledger_from_csv(st.require(kMatchedLedger));
  RateTable rates = load_rates(cfg);
  RobustnessGrid grid = RobustnessGrid::defaults();
  grid.spec.proxy = parse_enum(parse_proxy(cfg.proxy), cfg.proxy, "proxy");
  if (cfg.learning_max_days > 0) grid.learning_max_days = cfg.learning_max_days;

  std::vector<std::int64_t> dts;
  std::vector<Decimal> dqs;
  for (const auto& m : grid.thresholds) {
    dts.push_back(m.max_delta_t);
    dqs.push_back(m.max_delta_q);
  }
  std::ostringstream counts;
  counts << "dt,dq,candidates,actions,users\n";
  for (const auto& c : sweep_thresholds(legs, dts, dqs))
    counts << c.max_delta_t << "," << c.max_delta_q.to_string() << "," << c.candidates << "," << c.actions << ","
           << c.users << "\n";
  st.write("sweep_counts.csv", counts.str());

  auto cells = robustness_suite(legs, rates, grid);
  std::ostringstream table;
  write_robustness_table(table, cells, proxy_label(grid.spec.proxy));
  st.write("robustness.csv", table.str());
  std::size_t failed = 0;
  for (const auto& c : cells) failed += !c.result.has_value();
  st.out << "cells=" << cells.size() << " failed=" << failed << "\n";
}

// ----------------------------------------------------------------- synth

void cmd_synth(const Stage& st) {
  const auto& cfg = st.cfg;
  SynthConfig sc;
  sc.seed = cfg.seed;
  sc.n_noise_trades = cfg.noise_trades;
  sc.n_planted_actions = cfg.planted;
  sc.planted_slot_pool = cfg.slot_pool;
  sc.metaorder_bursts = cfg.bursts;
  sc.duplicate_rate = cfg.duplicate_rate;
  auto s = gen_ledger(sc);

  fs::create_directories(st.at("leaked"));
  fs::create_directories(st.at("rates"));
  std::map<std::string, std::vector<Leg>> months;
  for (const auto& l : s.legs) months[format_date(day_of(l.timestamp)).substr(0, 7)].push_back(l);
  for (const auto& [month, legs] : months) {
    auto fam = family_for_path(month + ".csv");
    if (!fam) throw usage_error("InfeasibleConfig", "no format family for " + month);
    std::ostringstream os;
    write_leaked_file(os, legs, *fam);
    st.write("leaked/" + month + ".csv", os.str());
  }
  st.write("public_trades.csv", public_text(s.public_records));

  std::map<std::string, std::vector<RateBar>> series;
  for (const auto& b : s.rates) series[std::string(to_string(b.base)) + std::string(to_string(b.quote))].push_back(b);
  for (const auto& [name, bars] : series) {
    std::ostringstream os;
    write_rate_file(os, bars);
    st.write("rates/" + name + ".csv", os.str());
  }

  std::ostringstream planted;
  planted << "user_id,buy_trade_id,sell_trade_id\n";
  for (const auto& p : s.truth.planted) planted << p.user << "," << p.buy_trade_id << "," << p.sell_trade_id << "\n";
  st.write("truth_planted.csv", planted.str());
  std::ostringstream dups;
  dups << "row\n";
  for (auto r : s.truth.duplicate_rows) dups << r << "\n";
  st.write("truth_duplicates.csv", dups.str());
  st.out << "legs=" << s.legs.size() << " planted=" << s.truth.planted.size()
         << " duplicates=" << s.truth.duplicate_rows.size() << "\n";
}

// ---------------------------------------------------------------- report

void summary_row(std::ostream& os, const std::string& panel, const std::string& name, std::vector<double> v) {
  std::erase_if(v, [](double x) { return !std::isfinite(x); });
  os << csv_field(panel) << "," << csv_field(name) << "," << v.size();
  if (v.empty()) {
    os << ",,,,,,,\n";
    return;
  }
  Summary s = describe(v);
  for (double x : {s.mean, s.sd, s.min, s.p25, s.p50, s.p75, s.max}) os << "," << format_double(x);
  os << "\n";
}

void cmd_report(const Stage& st) {
  auto a = load_analysis(st);
  std::map<UserId, const UserProfile*> prof;
  for (const auto& p : a.profiles) prof[p.user] = &p;
  auto profile_of = [&](UserId u) -> const UserProfile& {
    auto it = prof.find(u);
    if (it == prof.end()) throw format_error("BadStageFile", "profile missing for user " + std::to_string(u));
    return *it->second;
  };

  // Actions priced under all regimes with an official rate.
  std::ostringstream t1;
  t1 << "panel,variable,n,mean,sd,min,p25,p50,p75,max\n";
  for (const std::string panel : {"A_all", "B_single_market", "C_multiple_markets"}) {
    std::vector<double> sa, se, sn, btc, usd, dt, dq;
    for (const auto& p : a.priced) {
      const auto& pr = profile_of(p.action.user);
      if (panel[0] == 'B' && pr.n_markets != 1) continue;
      if (panel[0] == 'C' && pr.n_markets < 2) continue;
      auto val = [](const std::optional<double>& x) { return x ? *x : std::nan(""); };
      sa.push_back(val(p.spread[static_cast<int>(FeeRegime::Actual)]));
      se.push_back(val(p.spread[static_cast<int>(FeeRegime::Expected)]));
      sn.push_back(val(p.spread[static_cast<int>(FeeRegime::None)]));
      btc.push_back(a.legs[p.action.buy].bitcoins.to_double());
      usd.push_back(val(p.usd));
      dt.push_back(static_cast<double>(p.action.delta_t));
      dq.push_back(p.action.delta_q);
    }
    summary_row(t1, panel, "spread_actual_pct", sa);
    summary_row(t1, panel, "spread_expected_pct", se);
    summary_row(t1, panel, "spread_no_fees_pct", sn);
    summary_row(t1, panel, "bitcoins", btc);
    summary_row(t1, panel, "equiv_usd", usd);
    summary_row(t1, panel, "delta_t_s", dt);
    summary_row(t1, panel, "delta_q_pct", dq);
  }
  st.write("report_table1.csv", t1.str());

  std::ostringstream t2;
  t2 << "group,n_users,mean,sd,min,p25,p50,p75,p90,p95,max\n";
  std::size_t n_single = 0, n_multiple = 0;
  for (bool multiple : {false, true}) {
    std::vector<double> counts;
    for (const auto& p : a.profiles)
      if ((p.n_markets >= 2) == multiple) counts.push_back(static_cast<double>(p.n_actions));
    (multiple ? n_multiple : n_single) = counts.size();
    t2 << (multiple ? "multiple" : "single") << "," << counts.size();
    if (counts.empty()) t2 << ",,,,,,,,,";
    else {
      Summary s = describe(counts);
      for (double x : {s.mean, s.sd, s.min, s.p25, s.p50, s.p75, s.p90, s.p95, s.max}) t2 << "," << format_double(x);
    }
    t2 << "\n";
  }
  st.write("report_table2.csv", t2.str());

  // Metaorders per user, read back from the stage file.
  auto mt = read_stage_file(st.require(kMetaorders), "metaorders");
  struct MetaAgg {
    std::size_t count = 0, actions = 0;
    double delay = 0, btc = 0, usd = 0;
    std::size_t usd_n = 0;
  };
  std::map<UserId, MetaAgg> meta;
  for (const auto& r : mt.rows) {
    auto& m = meta[parse_int(r.at(mt.header.at("user_id")), "user_id")];
    ++m.count;
    m.actions += static_cast<std::size_t>(parse_int(r.at(mt.header.at("length")), "length"));
    m.delay += parse_double(r.at(mt.header.at("mean_delay")), "mean_delay");
    m.btc += parse_double(r.at(mt.header.at("total_bitcoins")), "total_bitcoins");
    const auto& u = r.at(mt.header.at("total_usd"));
    if (!u.empty()) {
      m.usd += parse_double(u, "total_usd");
      ++m.usd_n;
    }
  }
  std::ostringstream t3;
  t3 << "user_id,percentage,n_metaorders,avg_length,avg_delay_s,avg_bitcoins,avg_equiv_usd\n";
  for (const auto& [u, m] : meta) {
    const double n = static_cast<double>(m.count);
    t3 << u << "," << format_double(100.0 * static_cast<double>(m.actions) / static_cast<double>(profile_of(u).n_actions))
       << "," << m.count << "," << format_double(static_cast<double>(m.actions) / n) << ","
       << format_double(m.delay / n) << "," << format_double(m.btc / n) << ","
       << (m.usd_n ? format_double(m.usd / static_cast<double>(m.usd_n)) : "") << "\n";
  }
  st.write("report_table3.csv", t3.str());

  auto aggr = classify_aggressive(a.legs, a.actions);
  std::map<std::pair<std::string, std::string>, std::size_t> action_index;
  for (std::size_t i = 0; i < a.actions.size(); ++i)
    action_index[{a.legs[a.actions[i].buy].trade_id, a.legs[a.actions[i].sell].trade_id}] = i;
  std::vector<double> ag_n, ag_spread, ag_dcur;
  for (const auto& p : a.priced) {
    auto it = action_index.find({a.legs[p.action.buy].trade_id, a.legs[p.action.sell].trade_id});
    if (it == action_index.end() || !aggr.per_action[it->second].value_or(false)) continue;
    const auto& pr = profile_of(p.action.user);
    ag_n.push_back(static_cast<double>(pr.n_actions));
    ag_spread.push_back(p.spread[static_cast<int>(FeeRegime::Actual)].value_or(std::nan("")));
    ag_dcur.push_back(pr.d_currencies);
  }
  std::ostringstream t4;
  t4 << "panel,variable,n,mean,sd,min,p25,p50,p75,max\n";
  summary_row(t4, "aggressive", "user_actions", ag_n);
  summary_row(t4, "aggressive", "spread_actual_pct", ag_spread);
  summary_row(t4, "aggressive", "d_currencies", ag_dcur);
  st.write("report_table4.csv", t4.str());

  std::ostringstream f1;
  f1 << "panel,variable,n,mean,sd,min,p25,p50,p75,max\n";
  {
    std::vector<double> sa, usd, dr;
    std::map<AbilityProxy, std::vector<double>> proxies;
    for (const auto& p : a.priced) {
      sa.push_back(p.spread[static_cast<int>(FeeRegime::Actual)].value_or(std::nan("")));
      usd.push_back(p.usd.value_or(std::nan("")));
      dr.push_back(p.delta_r.value_or(std::nan("")));
      for (AbilityProxy x : all_proxies()) proxies[x].push_back(proxy_value(profile_of(p.action.user), x));
    }
    summary_row(f1, "actions", "spread_actual_pct", sa);
    summary_row(f1, "actions", "equiv_usd", usd);
    summary_row(f1, "actions", "delta_r_abs", dr);
    for (AbilityProxy x : all_proxies()) summary_row(f1, "actions", proxy_label(x), proxies[x]);
  }
  st.write("report_table_f1.csv", f1.str());

  std::size_t excluded = 0;
  for (const auto& p : a.priced) excluded += p.excluded_missing_rate;
  std::ostringstream sum;
  sum << "actions=" << a.actions.size() << "\n"
      << "priced_with_rate=" << a.priced.size() - excluded << "\n"
      << "excluded_missing_rate=" << excluded << "\n"
      << "arbitrageurs=" << a.profiles.size() << "\n"
      << "single_market_users=" << n_single << "\n"
      << "multiple_market_users=" << n_multiple << "\n"
      << "aggressive_actions=" << aggr.aggressive << "\n"
      << "metaorders=" << mt.rows.size() << "\n";
  st.write("report_summary.txt", sum.str());
}

void emit_error(std::ostream& err, const std::string& code, const std::string& message) {
  std::string m;
  for (char c : message) {
    if (c == '"' || c == '\\') m += '\\';
    m += c == '\n' ? ' ' : c;
  }
  err << "error code=" << code << " message=\"" << m << "\"\n";
}

} // namespace

int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  PipelineConfig cfg;
  CLI::App app{"Triangular arbitrage mining pipeline over exchange trade ledgers", "arbminer"};
  app.set_config("--config", "", "key=value file; flags given on the command line win");
  app.fallthrough();
  app.require_subcommand(1, 1);

  std::string out_dir;
  app.add_option("--out", out_dir, "Stage directory")->envname("ARBMINER_OUTPUT_DIR");
  app.add_option("--leaked", cfg.leaked, "Leaked monthly files or directories")->delimiter(',');
  app.add_option("--family", cfg.family, "Force a format family for all leaked files");
  app.add_option("--public", cfg.public_file, "Public trade file");
  app.add_option("--rates", cfg.rates_dir, "Directory of hourly rate files (EURUSD.csv, ...)");
  app.add_option("--volume", cfg.volume_file, "External daily volume file");
  app.add_option("--method", cfg.dedup_method, "conservative | aggressive | trade_id | pairs");
  app.add_flag("--include-thk-primaries", cfg.include_thk_primaries);
  app.add_flag("--keep-last-day", cfg.keep_last_day);
  app.add_flag("!--no-anonymize", cfg.anonymize);
  app.add_option("--willy-ids", cfg.willy_ids, "Comma-separated original ids merged into 1000000");
  app.add_option("--anomalous-users", cfg.anomalous_users, "Comma-separated original ids");
  app.add_option("--markus-ids", cfg.markus_ids, "Comma-separated original ids");
  app.add_option("--cutoff", cfg.sample_cutoff, "Legs at or after this instant are excluded");
  app.add_option("--fee-spec", cfg.fee_spec)->check(CLI::Range(1, 5));
  app.add_option("--volume-scale", cfg.volume_scale, "log | linear");
  app.add_option("--logit-spec", cfg.logit_spec)->check(CLI::Range(1, 5));
  app.add_flag("--skip-logit", cfg.skip_logit);
  app.add_option("--dt", cfg.dt, "Maximum leg distance in seconds");
  app.add_option("--dq", cfg.dq, "Maximum volume gap in percent");
  app.add_option("--regime", cfg.regime, "actual | none | expected");
  app.add_option("--fee-sign", cfg.fee_sign, "economic | as_printed");
  app.add_option("--min-length", cfg.min_length);
  app.add_option("--max-gap", cfg.max_gap);
  app.add_option("--learning-max-days", cfg.learning_max_days, "0 disables the learning filter");
  app.add_option("--table", cfg.table, "all | eq1_fe | eq1_proxy | eq2");
  app.add_option("--proxy", cfg.proxy);
  app.add_option("--grid", cfg.grid);
  app.add_option("--seed", cfg.seed);
  app.add_option("--noise", cfg.noise_trades);
  app.add_option("--planted", cfg.planted);
  app.add_option("--bursts", cfg.bursts, "Planted metaorders of five actions each");
  app.add_option("--slot-pool", cfg.slot_pool, "Shared time slots for planted actions (0: any)");
  app.add_option("--duplicate-rate", cfg.duplicate_rate);
  app.add_flag("--strict", cfg.strict, "Fail when any input row is malformed");

  using Handler = void (*)(const Stage&);
  const std::vector<std::tuple<const char*, const char*, Handler>> commands = {
      {"ingest", "Parse leaked and public files into the raw ledger", cmd_ingest},
      {"dedup", "Deduplicate, run sanity filters, anonymize and merge public data", cmd_dedup},
      {"fees", "Fit the fee schedule and the zero-fee logit; annotate expected fees", cmd_fees},
      {"match", "Restrict the sample, aggregate same-second legs and match actions", cmd_match},
      {"price", "Price actions against official rates under all fee regimes", cmd_price},
      {"profile", "Metaorders, aggressive actions, user profiles and PC1", cmd_profile},
      {"regress", "Regression tables", cmd_regress},
      {"sweep", "Threshold sweep and robustness grid", cmd_sweep},
      {"synth", "Write a synthetic ledger, public file and rates", cmd_synth},
      {"report", "Summary tables from the stage files", cmd_report},
  };
  std::vector<CLI::App*> subs;
  for (const auto& [name, help, fn] : commands) subs.push_back(app.add_subcommand(name, help));

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    out << app.help();
    return 0;
  } catch (const CLI::CallForAllHelp& e) {
    out << app.help("", CLI::AppFormatMode::All);
    return 0;
  } catch (const CLI::ParseError& e) {
    emit_error(err, "Usage", e.what());
    return static_cast<int>(ErrorKind::Usage);
  }

  try {
    if (!out_dir.empty()) cfg.out_dir = out_dir;
    fs::create_directories(cfg.out_dir);
    Stage st{cfg, out};
    for (std::size_t i = 0; i < subs.size(); ++i)
      if (subs[i]->parsed()) std::get<2>(commands[i])(st);
    return 0;
  } catch (const Error& e) {
    emit_error(err, e.code(), e.what());
    return static_cast<int>(e.kind());
  } catch (const fs::filesystem_error& e) {
    emit_error(err, "Io", e.what());
    return static_cast<int>(ErrorKind::Usage);
  } catch (const std::exception& e) {
    emit_error(err, "Internal", e.what());
    return static_cast<int>(ErrorKind::Numerical);
  }
}

} // namespace arbminer
