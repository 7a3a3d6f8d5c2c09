#include "arbminer/fee_model.hpp"

#include "arbminer/csv.hpp"
#include "arbminer/error.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <sstream>
#include <unordered_map>

namespace arbminer {

double actual_fee_pct(const Leg& leg) {
  if (leg.bitcoins.sign() <= 0 || leg.money.sign() <= 0)
    throw numerical_error("DegenerateLeg", "zero amount on trade " + leg.trade_id);
  return (leg.bitcoin_fee.to_double() / leg.bitcoins.to_double() + leg.money_fee.to_double() / leg.money.to_double()) *
         100.0;
}

double rolling_volume_at(std::span<const Instant> times, std::span<const double> volumes, Instant t) {
  const Instant from = t - std::chrono::seconds{kFeeWindowSeconds};
  auto lo = std::upper_bound(times.begin(), times.end(), from);
  auto hi = std::lower_bound(times.begin(), times.end(), t);
  double sum = 0;
  for (auto it = lo; it < hi; ++it) sum += volumes[static_cast<std::size_t>(it - times.begin())];
  return sum;
}

std::vector<double> rolling_volume_720h(std::span<const Leg> legs) {
  std::unordered_map<UserId, std::vector<std::size_t>> by_user;
  for (std::size_t i = 0; i < legs.size(); ++i) by_user[legs[i].user_id].push_back(i);
  std::vector<double> out(legs.size(), 0.0);
  const auto window = std::chrono::seconds{kFeeWindowSeconds};
  for (auto& [user, idx] : by_user) {
    std::stable_sort(idx.begin(), idx.end(),
                     [&](std::size_t a, std::size_t b) { return legs[a].timestamp < legs[b].timestamp; });
    std::vector<long double> prefix(idx.size() + 1, 0.0L);
    for (std::size_t k = 0; k < idx.size(); ++k) prefix[k + 1] = prefix[k] + legs[idx[k]].bitcoins.to_long_double();
    std::size_t lo = 0, hi = 0;
    for (std::size_t k = 0; k < idx.size(); ++k) {
      Instant t = legs[idx[k]].timestamp;
      while (lo < idx.size() && legs[idx[lo]].timestamp <= t - window) ++lo;
      while (hi < idx.size() && legs[idx[hi]].timestamp < t) ++hi;
      out[idx[k]] = hi > lo ? static_cast<double>(prefix[hi] - prefix[lo]) : 0.0;
    }
  }
  return out;
}

bool in_t0(Day d) { return d >= make_day(2011, 4, 1) && d <= make_day(2011, 6, 23); }
bool in_t1(Day d) { return d >= make_day(2011, 6, 24) && d <= make_day(2011, 8, 18); }
bool in_holidays(Day d) {
  return (d >= make_day(2011, 12, 26) && d <= make_day(2012, 1, 1)) ||
         (d >= make_day(2012, 4, 2) && d <= make_day(2012, 4, 7)) ||
         (d >= make_day(2012, 11, 9) && d <= make_day(2012, 11, 10));
}

FeeFeatures FeeFeatures::make(double volume, Day day) {
  FeeFeatures f;
  f.volume = volume;
  f.log_vol = std::log(std::max(volume, 1.0));
  f.vol_small = volume >= 100.0 && volume < 10000.0 ? 1.0 : 0.0;
  f.vol_big = volume >= 10000.0 ? 1.0 : 0.0;
  f.t0 = in_t0(day) ? 1.0 : 0.0;
  f.t1 = in_t1(day) ? 1.0 : 0.0;
  f.t_holid = in_holidays(day) ? 1.0 : 0.0;
  return f;
}

std::vector<std::string> fee_design_names(int spec, VolumeScale scale) {
  const std::string v = scale == VolumeScale::Log ? "LogVol" : "LinVol";
  switch (spec) {
  case 1: return {"Intercept", v};
  case 2: return {"Intercept", v, "T0", "T1", "Tholid"};
  case 3: return {"Intercept", "VolSmall", "VolBig"};
  case 4: return {"Intercept", v, "VolSmall", "VolBig", v + "*VolSmall", v + "*VolBig"};
  case 5: return {"Intercept", v, "VolSmall", "VolBig", v + "*VolSmall", v + "*VolBig", "T0", "T1", "Tholid"};
  default: throw usage_error("BadSpec", "fee specification must be 1..5");
  }
}

std::vector<double> fee_design_row(const FeeFeatures& f, int spec, VolumeScale scale) {
  const double v = scale == VolumeScale::Log ? f.log_vol : f.volume;
  switch (spec) {
  case 1: return {1.0, v};
  case 2: return {1.0, v, f.t0, f.t1, f.t_holid};
  case 3: return {1.0, f.vol_small, f.vol_big};
  case 4: return {1.0, v, f.vol_small, f.vol_big, v * f.vol_small, v * f.vol_big};
  case 5: return {1.0, v, f.vol_small, f.vol_big, v * f.vol_small, v * f.vol_big, f.t0, f.t1, f.t_holid};
  default: throw usage_error("BadSpec", "fee specification must be 1..5");
  }
}

std::vector<FeeObservation> fee_observations(std::span<const Leg> legs) {
  auto vol = rolling_volume_720h(legs);
  std::vector<FeeObservation> out;
  for (std::size_t i = 0; i < legs.size(); ++i) {
    if (legs[i].bitcoins.sign() <= 0 || legs[i].money.sign() <= 0) continue;
    double fee = actual_fee_pct(legs[i]);
    if (!(fee > 0.0 && fee < 1.0)) continue;
    out.push_back({FeeFeatures::make(vol[i], day_of(legs[i].timestamp)), fee});
  }
  return out;
}

FittedModel fit_fee_ols(std::span<const FeeObservation> obs, int spec, VolumeScale scale) {
  auto names = fee_design_names(spec, scale);
  const auto n = static_cast<Eigen::Index>(obs.size());
  const auto k = static_cast<Eigen::Index>(names.size());
  if (n <= k) throw numerical_error("RankDeficientDesign", "fewer observations than coefficients");
  Eigen::MatrixXd X(n, k);
  Eigen::VectorXd y(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    auto row = fee_design_row(obs[static_cast<std::size_t>(i)].features, spec, scale);
    for (Eigen::Index j = 0; j < k; ++j) X(i, j) = row[static_cast<std::size_t>(j)];
    y(i) = obs[static_cast<std::size_t>(i)].fee_pct;
  }
  Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(X);
  qr.setThreshold(1e-10);
  if (qr.rank() < k) throw numerical_error("RankDeficientDesign", "fee design has rank " + std::to_string(qr.rank()));
  Eigen::VectorXd beta = qr.solve(y);
  Eigen::VectorXd resid = y - X * beta;
  const double ssr = resid.squaredNorm();
  const double sst = (y.array() - y.mean()).square().sum();
  Eigen::MatrixXd xtx_inv = (X.transpose() * X).inverse();
  const double sigma2 = ssr / static_cast<double>(n - k);

  FittedModel m;
  m.kind = "fee_ols";
  m.spec = spec;
  m.scale = scale;
  m.names = names;
  m.n_obs = obs.size();
  m.fit = sst > 0 ? 1.0 - ssr / sst : 0.0;
  for (Eigen::Index j = 0; j < k; ++j) {
    m.coefficients.push_back(beta(j));
    m.std_errors.push_back(std::sqrt(sigma2 * xtx_inv(j, j)));
  }
  return m;
}

double predict_expected_fee(const FeeFeatures& f, const FittedModel& model) {
  auto row = fee_design_row(f, model.spec, model.scale);
  if (row.size() != model.coefficients.size())
    throw usage_error("ModelMismatch", "coefficient count does not match specification");
  double v = 0;
  for (std::size_t j = 0; j < row.size(); ++j) v += row[j] * model.coefficients[j];
  return std::max(v, 0.0);
}

void annotate_expected_fees(std::vector<Leg>& legs, const FittedModel& model) {
  auto vol = rolling_volume_720h(legs);
  for (std::size_t i = 0; i < legs.size(); ++i)
    legs[i].expected_fee_pct = predict_expected_fee(FeeFeatures::make(vol[i], day_of(legs[i].timestamp)), model);
}

double FittedModel::coef(std::string_view name) const {
  for (std::size_t j = 0; j < names.size(); ++j)
    if (names[j] == name) return coefficients[j];
  throw usage_error("UnknownCoefficient", std::string(name));
}

std::string FittedModel::to_text() const {
  std::ostringstream os;
  os << "# arbminer model v1\n";
  os << "kind=" << kind << "\nspec=" << spec << "\nscale=" << (scale == VolumeScale::Log ? "log" : "linear")
     << "\nn_obs=" << n_obs << "\nfit=" << format_double(fit) << "\nlog_likelihood=" << format_double(log_likelihood)
     << "\niterations=" << iterations << "\n";
  os << "variable,coefficient,std_error\n";
  for (std::size_t j = 0; j < names.size(); ++j)
    os << names[j] << "," << format_double(coefficients[j]) << ","
       << format_double(j < std_errors.size() ? std_errors[j] : std::nan("")) << "\n";
  return os.str();
}

FittedModel FittedModel::from_text(const std::string& text) {
  std::istringstream in(text);
  std::string line;
  FittedModel m;
  if (!read_line(in, line) || line != "# arbminer model v1") throw format_error("BadStageFile", "not a model file");
  bool table = false;
  while (read_line(in, line)) {
    if (line.empty()) continue;
    if (!table) {
      if (line == "variable,coefficient,std_error") {
        table = true;
        continue;
      }
      auto eq = line.find('=');
      if (eq == std::string::npos) throw format_error("BadStageFile", "bad model line: " + line);
      std::string key = line.substr(0, eq), val = line.substr(eq + 1);
      if (key == "kind") m.kind = val;
      else if (key == "spec") m.spec = static_cast<int>(parse_int(val, "spec"));
      else if (key == "scale") m.scale = val == "linear" ? VolumeScale::Linear : VolumeScale::Log;
      else if (key == "n_obs") m.n_obs = static_cast<std::size_t>(parse_int(val, "n_obs"));
      else if (key == "fit") m.fit = parse_double(val, "fit");
      else if (key == "log_likelihood") m.log_likelihood = parse_double(val, "log_likelihood");
      else if (key == "iterations") m.iterations = static_cast<int>(parse_int(val, "iterations"));
      continue;
    }
    auto f = split_csv_line(line);
    if (f.size() != 3) throw format_error("BadStageFile", "bad coefficient row: " + line);
    m.names.push_back(f[0]);
    m.coefficients.push_back(parse_double(f[1], "coefficient"));
    m.std_errors.push_back(parse_double(f[2], "std_error"));
  }
  return m;
}

namespace {

// log(1 + exp(x)) without overflow.
double softplus(double x) { return x > 0 ? x + std::log1p(std::exp(-x)) : std::log1p(std::exp(x)); }
double sigmoid(double x) {
  if (x >= 0) return 1.0 / (1.0 + std::exp(-x));
  double e = std::exp(x);
  return e / (1.0 + e);
}

} // namespace

double logit_log_likelihood(const Eigen::MatrixXd& X, const Eigen::VectorXd& y, const Eigen::VectorXd& beta) {
  Eigen::VectorXd eta = X * beta;
  double ll = 0;
  for (Eigen::Index i = 0; i < eta.size(); ++i) ll += y(i) * eta(i) - softplus(eta(i));
  return ll;
}

Eigen::VectorXd logit_gradient(const Eigen::MatrixXd& X, const Eigen::VectorXd& y, const Eigen::VectorXd& beta) {
  Eigen::VectorXd eta = X * beta;
  Eigen::VectorXd r(eta.size());
  for (Eigen::Index i = 0; i < eta.size(); ++i) r(i) = y(i) - sigmoid(eta(i));
  return X.transpose() * r;
}

FittedModel fit_logit(const Eigen::MatrixXd& X, const Eigen::VectorXd& y, std::vector<std::string> names,
                      const LogitOptions& opt) {
  const Eigen::Index n = X.rows(), k = X.cols();
  if (n <= k) throw numerical_error("RankDeficientDesign", "fewer observations than coefficients");
  {
    Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(X);
    qr.setThreshold(1e-10);
    if (qr.rank() < k) throw numerical_error("RankDeficientDesign", "logit design is rank deficient");
  }
  Eigen::VectorXd beta = Eigen::VectorXd::Zero(k);
  double ll = logit_log_likelihood(X, y, beta);
  Eigen::MatrixXd info(k, k);
  int iter = 0;
  bool converged = false;
  auto information = [&](const Eigen::VectorXd& b) {
    Eigen::VectorXd eta = X * b;
    Eigen::VectorXd w(n);
    for (Eigen::Index i = 0; i < n; ++i) {
      double p = sigmoid(eta(i));
      w(i) = p * (1.0 - p);
    }
    return Eigen::MatrixXd(X.transpose() * w.asDiagonal() * X);
  };
  while (iter < opt.max_iterations) {
    ++iter;
    info = information(beta);
    Eigen::VectorXd step = info.ldlt().solve(logit_gradient(X, y, beta));
    Eigen::VectorXd next = beta + step;
    double ll_next = logit_log_likelihood(X, y, next);
    for (int halve = 0; halve < 30 && ll_next < ll; ++halve) {
      step *= 0.5;
      next = beta + step;
      ll_next = logit_log_likelihood(X, y, next);
    }
    double gain = ll_next - ll;
    beta = next;
    ll = ll_next;
    if (beta.cwiseAbs().maxCoeff() > opt.separation_bound)
      throw numerical_error("Separation", "coefficient magnitude exceeded " + format_double(opt.separation_bound));
    if (std::fabs(gain) < opt.tolerance) {
      converged = true;
      break;
    }
  }
  if (!converged) throw numerical_error("NonConvergence", "logit did not converge in " + std::to_string(iter) + " iterations");
  info = information(beta);
  Eigen::MatrixXd cov = info.inverse();

  const double ybar = y.mean();
  double ll0 = 0;
  if (ybar > 0 && ybar < 1) ll0 = static_cast<double>(n) * (ybar * std::log(ybar) + (1 - ybar) * std::log(1 - ybar));

  FittedModel m;
  m.kind = "logit";
  m.names = std::move(names);
  m.n_obs = static_cast<std::size_t>(n);
  m.log_likelihood = ll;
  m.iterations = iter;
  m.fit = ll0 != 0 ? 1.0 - ll / ll0 : 0.0;
  for (Eigen::Index j = 0; j < k; ++j) {
    m.coefficients.push_back(beta(j));
    m.std_errors.push_back(std::sqrt(cov(j, j)));
  }
  return m;
}

ZeroFeeConfig ZeroFeeConfig::defaults() {
  ZeroFeeConfig c;
  c.anomalous_days = {make_day(2011, 12, 19), make_day(2011, 12, 20), make_day(2011, 12, 21),
                      make_day(2013, 4, 12),  make_day(2013, 4, 13),  make_day(2013, 4, 14),
                      make_day(2013, 11, 28), make_day(2013, 11, 29)};
  c.markus_ids = {634};
  c.willy_ids = {1000000};
  return c;
}

std::vector<std::string> zero_fee_design_names(int spec) {
  switch (spec) {
  case 1: return {"Intercept", "LogVol"};
  case 2: return {"Intercept", "LogVol", "Bitcoins", "Date"};
  case 3: return {"Intercept", "Date", "AnomalousDays"};
  case 4: return {"Intercept", "EarlyAdopters", "AnomalousUsers", "Matchers", "Markus", "Willy"};
  case 5:
    return {"Intercept",     "LogVol",         "Bitcoins", "Date",   "AnomalousDays",
            "EarlyAdopters", "AnomalousUsers", "Matchers", "Markus", "Willy"};
  default: throw usage_error("BadSpec", "logit specification must be 1..5");
  }
}

std::vector<double> zero_fee_design_row(const ZeroFeeObservation& o, int spec) {
  switch (spec) {
  case 1: return {1.0, o.log_vol};
  case 2: return {1.0, o.log_vol, o.bitcoins, o.date};
  case 3: return {1.0, o.date, o.anomalous_days};
  case 4: return {1.0, o.early_adopters, o.anomalous_users, o.matchers, o.markus, o.willy};
  case 5:
    return {1.0, o.log_vol, o.bitcoins, o.date, o.anomalous_days, o.early_adopters, o.anomalous_users, o.matchers,
            o.markus, o.willy};
  default: throw usage_error("BadSpec", "logit specification must be 1..5");
  }
}

std::vector<ZeroFeeObservation> zero_fee_observations(std::span<const Leg> legs, const ZeroFeeConfig& cfg) {
  auto vol = rolling_volume_720h(legs);
  std::vector<std::optional<UserId>> counterparty(legs.size());
  for (const auto& t : group_trades(legs).trades) {
    counterparty[t.buy] = legs[t.sell].user_id;
    counterparty[t.sell] = legs[t.buy].user_id;
  }
  std::vector<ZeroFeeObservation> out;
  for (std::size_t i = 0; i < legs.size(); ++i) {
    const Leg& l = legs[i];
    if (l.bitcoins.sign() <= 0 || l.money.sign() <= 0) continue;
    ZeroFeeObservation o;
    Day d = day_of(l.timestamp);
    o.log_vol = std::log(std::max(vol[i], 1.0));
    o.bitcoins = l.bitcoins.to_double();
    o.date = static_cast<double>((d - cfg.date_origin).count());
    o.anomalous_days = cfg.anomalous_days.count(d) ? 1.0 : 0.0;
    o.early_adopters = l.user_id >= 0 && l.user_id <= cfg.early_adopter_max_id ? 1.0 : 0.0;
    o.anomalous_users = cfg.anomalous_users.count(l.user_id) ? 1.0 : 0.0;
    o.matchers = counterparty[i] && cfg.anomalous_users.count(*counterparty[i]) ? 1.0 : 0.0;
    o.markus = cfg.markus_ids.count(l.user_id) ? 1.0 : 0.0;
    o.willy = cfg.willy_ids.count(l.user_id) ? 1.0 : 0.0;
    o.pays_fee = actual_fee_pct(l) > 0.0 ? 1 : 0;
    out.push_back(o);
  }
  return out;
}

FittedModel fit_zero_fee_logit(std::span<const ZeroFeeObservation> obs, int spec, const LogitOptions& opt) {
  auto names = zero_fee_design_names(spec);
  const auto n = static_cast<Eigen::Index>(obs.size());
  const auto k = static_cast<Eigen::Index>(names.size());
  Eigen::MatrixXd X(n, k);
  Eigen::VectorXd y(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    auto row = zero_fee_design_row(obs[static_cast<std::size_t>(i)], spec);
    for (Eigen::Index j = 0; j < k; ++j) X(i, j) = row[static_cast<std::size_t>(j)];
    y(i) = obs[static_cast<std::size_t>(i)].pays_fee;
  }
  FittedModel m = fit_logit(X, y, names, opt);
  m.kind = "zero_fee_logit";
  m.spec = spec;
  return m;
}

} // namespace arbminer
