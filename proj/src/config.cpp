#include "ark/config.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>
#include <vector>

namespace ark {

namespace {

[[noreturn]] void config_error(const std::string& msg) {
  throw Error(ErrorKind::ConfigError, msg);
}

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

std::string format_double(double v) {
  char buf[32];
  const auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

template <class T>
T parse_number(const std::string& key, const std::string& value) {
  T out{};
  const char* first = value.data();
  const char* last = first + value.size();
  const auto [ptr, ec] = std::from_chars(first, last, out);
  if (ec != std::errc() || ptr != last) config_error("key '" + key + "': cannot parse '" + value + "'");
  return out;
}

bool parse_bool(const std::string& key, const std::string& value) {
  if (value == "true") return true;
  if (value == "false") return false;
  config_error("key '" + key + "': expected true or false, got '" + value + "'");
}

template <class F>
auto wrap_enum(const std::string& key, const std::string& value, F&& parse) {
  try {
    return parse(value);
  } catch (const Error& e) {
    config_error("key '" + key + "': " + e.what());
  }
}

}  // namespace

std::string to_string(Setting s) {
  switch (s) {
    case Setting::linear_gauss_estimated: return "linear_gauss_estimated";
    case Setting::logistic_gauss_estimated: return "logistic_gauss_estimated";
    case Setting::linear_t_misspec: return "linear_t_misspec";
    case Setting::logistic_t_misspec: return "logistic_t_misspec";
    case Setting::custom: return "custom";
  }
  return "unknown";
}

Setting setting_from_string(const std::string& s) {
  for (Setting v : {Setting::linear_gauss_estimated, Setting::logistic_gauss_estimated,
                    Setting::linear_t_misspec, Setting::logistic_t_misspec, Setting::custom}) {
    if (to_string(v) == s) return v;
  }
  throw Error(ErrorKind::ConfigError, "unknown setting '" + s + "'");
}

std::string to_string(FeatureModel f) {
  switch (f) {
    case FeatureModel::banded: return "banded";
    case FeatureModel::ar: return "ar";
    case FeatureModel::t_ar: return "t_ar";
  }
  return "unknown";
}

FeatureModel feature_model_from_string(const std::string& s) {
  for (FeatureModel v : {FeatureModel::banded, FeatureModel::ar, FeatureModel::t_ar}) {
    if (to_string(v) == s) return v;
  }
  throw Error(ErrorKind::ConfigError, "unknown feature model '" + s + "'");
}

std::string to_string(Estimation e) {
  switch (e) {
    case Estimation::shrinkage: return "shrinkage";
    case Estimation::oracle: return "oracle";
    case Estimation::moment_matched: return "moment_matched";
  }
  return "unknown";
}

Estimation estimation_from_string(const std::string& s) {
  for (Estimation v : {Estimation::shrinkage, Estimation::oracle, Estimation::moment_matched}) {
    if (to_string(v) == s) return v;
  }
  throw Error(ErrorKind::ConfigError, "unknown estimation '" + s + "'");
}

void SimConfig::validate() const {
  if (n < 2) config_error("n must be at least 2");
  if (p < 1) config_error("p must be at least 1");
  if (replications < 1) config_error("replications must be at least 1");
  if (!(q > 0.0 && q < 1.0)) config_error("q must lie in (0, 1)");
  if (k_nonzero < 0 || k_nonzero > p) config_error("k_nonzero must lie in [0, p]");
  if (!std::isfinite(magnitude)) config_error("magnitude must be finite");
  if (offset != 0 && offset != 1) config_error("offset must be 0 or 1");
  if (threads < 1) config_error("threads must be at least 1");
  if (kfwer && (kfwer->k < 1 || !(kfwer->q > 0.0 && kfwer->q < 1.0))) {
    config_error("kfwer needs k >= 1 and q in (0, 1)");
  }
  if (features == FeatureModel::ar || features == FeatureModel::t_ar) {
    if (!(std::abs(ar_rho) < 1.0)) config_error("ar_rho must lie in (-1, 1)");
  }
  if (features == FeatureModel::t_ar) {
    if (!nu) config_error("t features need nu");
    if (!(*nu > 2.0)) config_error("nu must exceed 2");
  } else if (estimation == Estimation::moment_matched) {
    config_error("moment_matched estimation needs t features");
  }
}

SimConfig preset(Setting s) {
  SimConfig c;
  c.setting = s;
  switch (s) {
    case Setting::linear_gauss_estimated:
    case Setting::custom:
      break;
    case Setting::logistic_gauss_estimated:
      c.family = Family::logistic;
      c.k_nonzero = 30;
      c.n = 500;
      break;
    case Setting::linear_t_misspec:
    case Setting::logistic_t_misspec:
      c.family = s == Setting::linear_t_misspec ? Family::linear : Family::logistic;
      c.k_nonzero = c.family == Family::linear ? 50 : 30;
      c.features = FeatureModel::t_ar;
      c.estimation = Estimation::moment_matched;
      c.n = 300;
      c.nu = 50.0;
      break;
  }
  return c;
}

SimConfig parse_config(const std::string& text) {
  std::vector<std::pair<std::string, std::string>> entries;
  std::istringstream in(text);
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) {
      config_error("line " + std::to_string(lineno) + ": expected key = value");
    }
    const std::string key = trim(line.substr(0, eq));
    std::string value = trim(line.substr(eq + 1));
    if (value.size() >= 2 && value.front() == '"' && value.back() == '"') {
      value = value.substr(1, value.size() - 2);
    }
    if (key.empty()) config_error("line " + std::to_string(lineno) + ": empty key");
    entries.emplace_back(key, value);
  }

  SimConfig c;
  for (const auto& [key, value] : entries) {
    if (key == "setting") c = preset(wrap_enum(key, value, setting_from_string));
  }
  std::optional<int> kfwer_k;
  std::optional<double> kfwer_q;
  for (const auto& [key, value] : entries) {
    if (key == "setting") continue;
    if (key == "family") c.family = wrap_enum(key, value, family_from_string);
    else if (key == "features") c.features = wrap_enum(key, value, feature_model_from_string);
    else if (key == "estimation") c.estimation = wrap_enum(key, value, estimation_from_string);
    else if (key == "statistic") c.statistic = wrap_enum(key, value, stat_method_from_string);
    else if (key == "n") c.n = parse_number<long>(key, value);
    else if (key == "p") c.p = parse_number<long>(key, value);
    else if (key == "replications") c.replications = parse_number<long>(key, value);
    else if (key == "k_nonzero") c.k_nonzero = parse_number<long>(key, value);
    else if (key == "magnitude") c.magnitude = parse_number<double>(key, value);
    else if (key == "q") c.q = parse_number<double>(key, value);
    else if (key == "ar_rho") c.ar_rho = parse_number<double>(key, value);
    else if (key == "nu") c.nu = parse_number<double>(key, value);
    else if (key == "seed") c.seed = parse_number<std::uint64_t>(key, value);
    else if (key == "fixed_beta") c.fixed_beta = parse_bool(key, value);
    else if (key == "offset") c.offset = parse_number<int>(key, value);
    else if (key == "kfwer_k") kfwer_k = parse_number<int>(key, value);
    else if (key == "kfwer_q") kfwer_q = parse_number<double>(key, value);
    else if (key == "lambda_linear") c.lambda.linear_const = parse_number<double>(key, value);
    else if (key == "lambda_logistic") c.lambda.logistic_const = parse_number<double>(key, value);
    else if (key == "lambda_nodewise") c.lambda.nodewise_const = parse_number<double>(key, value);
    else if (key == "threads") c.threads = parse_number<int>(key, value);
    else config_error("unknown key '" + key + "'");
  }
  if (kfwer_k.has_value() != kfwer_q.has_value()) {
    config_error("kfwer_k and kfwer_q must be given together");
  }
  if (kfwer_k) c.kfwer = KfwerSpec{*kfwer_k, *kfwer_q};
  c.validate();
  return c;
}

SimConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) config_error("cannot open config file '" + path + "'");
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_config(buf.str());
}

std::map<std::string, std::string> config_entries(const SimConfig& c) {
  std::map<std::string, std::string> m;
  m["setting"] = to_string(c.setting);
  m["family"] = to_string(c.family);
  m["features"] = to_string(c.features);
  m["estimation"] = to_string(c.estimation);
  m["statistic"] = to_string(c.statistic);
  m["n"] = std::to_string(c.n);
  m["p"] = std::to_string(c.p);
  m["replications"] = std::to_string(c.replications);
  m["k_nonzero"] = std::to_string(c.k_nonzero);
  m["magnitude"] = format_double(c.magnitude);
  m["q"] = format_double(c.q);
  m["ar_rho"] = format_double(c.ar_rho);
  if (c.nu) m["nu"] = format_double(*c.nu);
  m["seed"] = std::to_string(c.seed);
  m["fixed_beta"] = c.fixed_beta ? "true" : "false";
  m["offset"] = std::to_string(c.offset);
  if (c.kfwer) {
    m["kfwer_k"] = std::to_string(c.kfwer->k);
    m["kfwer_q"] = format_double(c.kfwer->q);
  }
  m["lambda_linear"] = format_double(c.lambda.linear_const);
  m["lambda_logistic"] = format_double(c.lambda.logistic_const);
  m["lambda_nodewise"] = format_double(c.lambda.nodewise_const);
  m["threads"] = std::to_string(c.threads);
  return m;
}

std::string render_config(const SimConfig& c) {
  std::ostringstream os;
  os << "setting = " << to_string(c.setting) << "\n";
  for (const auto& [key, value] : config_entries(c)) {
    if (key != "setting") os << key << " = " << value << "\n";
  }
  return os.str();
}

}  // namespace ark
