// Copyright 2026 The arollout Authors
// SPDX-License-Identifier: Apache-2.0

#include "run_config.hpp"

#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>
#include <charconv>
#include <fstream>
#include <map>
#include <set>
#include <sstream>

#include "arollout/error.hpp"

namespace arollout::cli {

namespace pt = boost::property_tree;

namespace {

const std::map<std::string, std::set<std::string>>& known_keys() {
  static const std::map<std::string, std::set<std::string>> keys{
      {"dataset",
       {"source", "length", "variates", "periods", "amplitude", "noise_std", "coeffs", "seed", "path", "has_header",
        "time_column", "train_ratio", "val_ratio"}},
      {"model", {"kind", "context_length", "block_length", "overlap", "hidden"}},
      {"rollout", {"steps", "gamma", "beta"}},
      {"train",
       {"objective", "lr", "adam_beta1", "adam_beta2", "adam_eps", "batch_size", "max_epochs", "patience", "seed"}},
      {"output", {"directory"}},
  };
  return keys;
}

std::string trimmed(const std::string& s) {
  const auto first = s.find_first_not_of(" \t");
  if (first == std::string::npos) return "";
  return s.substr(first, s.find_last_not_of(" \t") - first + 1);
}

class Reader {
 public:
  explicit Reader(const pt::ptree& tree) : tree_(tree) {}

  std::optional<std::string> raw(const std::string& section, const std::string& key) const {
    auto node = tree_.get_child_optional(pt::ptree::path_type(section + "." + key, '.'));
    if (!node) return std::nullopt;
    return trimmed(node->data());
  }

  template <typename T>
  T number(const std::string& section, const std::string& key, T fallback) const {
    auto text = raw(section, key);
    if (!text) return fallback;
    T value{};
    auto [ptr, ec] = std::from_chars(text->data(), text->data() + text->size(), value);
    if (text->empty() || ec != std::errc() || ptr != text->data() + text->size()) {
      throw ConfigError(section + "." + key + ": '" + *text + "' is not a valid number");
    }
    return value;
  }

  std::string text(const std::string& section, const std::string& key, std::string fallback) const {
    return raw(section, key).value_or(std::move(fallback));
  }

  bool boolean(const std::string& section, const std::string& key, bool fallback) const {
    auto text = raw(section, key);
    if (!text) return fallback;
    if (*text == "true" || *text == "1" || *text == "yes") return true;
    if (*text == "false" || *text == "0" || *text == "no") return false;
    throw ConfigError(section + "." + key + ": '" + *text + "' is not a boolean");
  }

  std::vector<double> list(const std::string& section, const std::string& key, std::vector<double> fallback) const {
    auto text = raw(section, key);
    if (!text) return fallback;
    std::vector<double> out;
    std::istringstream in(*text);
    std::string item;
    while (std::getline(in, item, ',')) {
      item = trimmed(item);
      double v = 0.0;
      auto [ptr, ec] = std::from_chars(item.data(), item.data() + item.size(), v);
      if (item.empty() || ec != std::errc() || ptr != item.data() + item.size()) {
        throw ConfigError(section + "." + key + ": '" + item + "' is not a valid number");
      }
      out.push_back(v);
    }
    if (out.empty()) throw ConfigError(section + "." + key + ": list is empty");
    return out;
  }

 private:
  const pt::ptree& tree_;
};

void check_keys(const pt::ptree& tree) {
  for (const auto& [section, body] : tree) {
    auto it = known_keys().find(section);
    if (it == known_keys().end()) throw ConfigError("unknown config section [" + section + "]");
    for (const auto& [key, value] : body) {
      if (!it->second.contains(key)) throw ConfigError("unknown config key " + section + "." + key);
    }
  }
}

// Runs a validator and rethrows its InvalidInput as ConfigError with the
// config key prefixed.
template <typename Fn>
void expect(const std::string& key, Fn&& fn) {
  try {
    fn();
  } catch (const InvalidInput& e) {
    throw ConfigError(key + ": " + e.what());
  }
}

std::string fmt(double x) {
  char buf[32];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, x);
  return std::string(buf, ptr);
}

std::string fmt_list(const std::vector<double>& xs) {
  std::string out;
  for (std::size_t i = 0; i < xs.size(); ++i) out += (i ? "," : "") + fmt(xs[i]);
  return out;
}

std::string source_name(DataSource s) {
  switch (s) {
    case DataSource::kSinusoid: return "sinusoid";
    case DataSource::kAr: return "ar";
    case DataSource::kCsv: return "csv";
  }
  return "unknown";
}

}  // namespace

RolloutConfig RunConfig::rollout() const {
  RolloutConfig r;
  r.context = model.context_length;
  r.block = model.block_length;
  r.overlap = model.overlap;
  r.steps = steps;
  r.gamma = gamma;
  r.beta = beta;
  return r;
}

ForecasterDims RunConfig::dims(std::size_t variates) const {
  return {model.context_length, model.overlap, model.block_length, variates,
          model.kind == ModelKind::kLinear ? 0 : model.hidden};
}

RunConfig parse_run_config(const std::string& text, const std::filesystem::path& base_dir) {
  pt::ptree tree;
  try {
    std::istringstream in(text);
    pt::read_ini(in, tree);
  } catch (const pt::ini_parser_error& e) {
    throw ConfigError(std::string("malformed config: ") + e.what());
  }
  check_keys(tree);
  const Reader r(tree);
  RunConfig c;

  DatasetSection& d = c.dataset;
  const std::string source = r.text("dataset", "source", "sinusoid");
  if (source == "sinusoid") {
    d.source = DataSource::kSinusoid;
  } else if (source == "ar") {
    d.source = DataSource::kAr;
  } else if (source == "csv") {
    d.source = DataSource::kCsv;
  } else {
    throw ConfigError("dataset.source: '" + source + "' is not one of sinusoid, ar, csv");
  }
  d.length = r.number<std::size_t>("dataset", "length", d.length);
  d.variates = r.number<std::size_t>("dataset", "variates", d.variates);
  d.periods = r.list("dataset", "periods", d.periods);
  d.amplitude = r.number<double>("dataset", "amplitude", d.amplitude);
  d.noise_std = r.number<double>("dataset", "noise_std", d.noise_std);
  d.coeffs = r.list("dataset", "coeffs", d.coeffs);
  d.seed = r.number<std::uint64_t>("dataset", "seed", d.seed);
  d.has_header = r.boolean("dataset", "has_header", d.has_header);
  d.time_column = r.text("dataset", "time_column", "");
  d.ratios.train = r.number<double>("dataset", "train_ratio", d.ratios.train);
  d.ratios.val = r.number<double>("dataset", "val_ratio", d.ratios.val);
  if (auto path = r.raw("dataset", "path"); path && !path->empty()) {
    std::filesystem::path p(*path);
    d.path = p.is_absolute() ? p : base_dir / p;
  }

  if (d.source != DataSource::kCsv) {
    if (d.length == 0) throw ConfigError("dataset.length must be > 0");
    if (d.variates == 0) throw ConfigError("dataset.variates must be > 0");
  }
  if (d.noise_std < 0.0) throw ConfigError("dataset.noise_std must be >= 0");
  for (double p : d.periods) {
    if (!(p > 0.0)) throw ConfigError("dataset.periods must all be > 0");
  }
  if (!(d.ratios.train > 0.0) || d.ratios.val < 0.0 || d.ratios.train + d.ratios.val >= 1.0) {
    throw ConfigError("dataset.train_ratio/val_ratio must satisfy train > 0, val >= 0, train + val < 1");
  }
  if (d.source == DataSource::kAr) {
    expect("dataset.coeffs", [&] {
      if (!(ar_spectral_radius(d.coeffs) < 1.0)) throw InvalidInput("coefficients are not stationary");
    });
  }
  if (d.source == DataSource::kCsv) {
    if (d.path.empty()) throw ConfigError("dataset.path is required when dataset.source = csv");
    if (!std::filesystem::exists(d.path)) throw ConfigError("dataset.path: file '" + d.path.string() + "' does not exist");
  }

  ModelSection& m = c.model;
  expect("model.kind", [&] { m.kind = parse_model_kind(r.text("model", "kind", "linear")); });
  m.context_length = r.number<std::size_t>("model", "context_length", m.context_length);
  m.block_length = r.number<std::size_t>("model", "block_length", m.block_length);
  m.overlap = r.number<std::size_t>("model", "overlap", m.overlap);
  m.hidden = r.number<std::size_t>("model", "hidden", m.hidden);
  if (m.context_length < 1) throw ConfigError("model.context_length must be >= 1");
  if (m.block_length < 1) throw ConfigError("model.block_length must be >= 1");
  if (m.overlap >= m.context_length) throw ConfigError("model.overlap must be < model.context_length");
  if (m.kind != ModelKind::kLinear && m.hidden < 1) throw ConfigError("model.hidden must be >= 1");

  c.steps = r.number<std::size_t>("rollout", "steps", c.steps);
  c.gamma = r.number<double>("rollout", "gamma", c.gamma);
  c.beta = r.number<double>("rollout", "beta", c.beta);
  if (c.steps < 1) throw ConfigError("rollout.steps must be >= 1");
  if (!(c.gamma > 0.0 && c.gamma < 1.0)) throw ConfigError("rollout.gamma must lie in (0, 1), got " + fmt(c.gamma));
  if (!(c.beta > 0.0 && c.beta < 0.5)) throw ConfigError("rollout.beta must lie in (0, 0.5), got " + fmt(c.beta));

  TrainConfig& t = c.train;
  expect("train.objective", [&] { t.objective = parse_objective(r.text("train", "objective", "ar")); });
  t.adam.lr = r.number<double>("train", "lr", t.adam.lr);
  t.adam.beta1 = r.number<double>("train", "adam_beta1", t.adam.beta1);
  t.adam.beta2 = r.number<double>("train", "adam_beta2", t.adam.beta2);
  t.adam.eps = r.number<double>("train", "adam_eps", t.adam.eps);
  t.batch_size = r.number<std::size_t>("train", "batch_size", t.batch_size);
  t.max_epochs = r.number<std::size_t>("train", "max_epochs", t.max_epochs);
  t.patience = r.number<std::size_t>("train", "patience", t.patience);
  t.seed = r.number<std::uint64_t>("train", "seed", t.seed);
  try {
    t.validate();
  } catch (const InvalidInput& e) {
    throw ConfigError(e.what());
  }

  c.output_dir = r.text("output", "directory", c.output_dir.string());
  return c;
}

RunConfig load_run_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot read config file '" + path.string() + "'");
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_run_config(buf.str(), path.parent_path().empty() ? std::filesystem::path(".") : path.parent_path());
}

std::string resolved_config_text(const RunConfig& c) {
  const DatasetSection& d = c.dataset;
  std::ostringstream out;
  out << "[dataset]\n"
      << "source = " << source_name(d.source) << "\n"
      << "length = " << d.length << "\n"
      << "variates = " << d.variates << "\n"
      << "periods = " << fmt_list(d.periods) << "\n"
      << "amplitude = " << fmt(d.amplitude) << "\n"
      << "noise_std = " << fmt(d.noise_std) << "\n"
      << "coeffs = " << fmt_list(d.coeffs) << "\n"
      << "seed = " << d.seed << "\n"
      << "path = " << d.path.string() << "\n"
      << "has_header = " << (d.has_header ? "true" : "false") << "\n"
      << "time_column = " << d.time_column << "\n"
      << "train_ratio = " << fmt(d.ratios.train) << "\n"
      << "val_ratio = " << fmt(d.ratios.val) << "\n\n"
      << "[model]\n"
      << "kind = " << to_string(c.model.kind) << "\n"
      << "context_length = " << c.model.context_length << "\n"
      << "block_length = " << c.model.block_length << "\n"
      << "overlap = " << c.model.overlap << "\n"
      << "hidden = " << c.model.hidden << "\n\n"
      << "[rollout]\n"
      << "steps = " << c.steps << "\n"
      << "gamma = " << fmt(c.gamma) << "\n"
      << "beta = " << fmt(c.beta) << "\n\n"
      << "[train]\n"
      << "objective = " << to_string(c.train.objective) << "\n"
      << "lr = " << fmt(c.train.adam.lr) << "\n"
      << "adam_beta1 = " << fmt(c.train.adam.beta1) << "\n"
      << "adam_beta2 = " << fmt(c.train.adam.beta2) << "\n"
      << "adam_eps = " << fmt(c.train.adam.eps) << "\n"
      << "batch_size = " << c.train.batch_size << "\n"
      << "max_epochs = " << c.train.max_epochs << "\n"
      << "patience = " << c.train.patience << "\n"
      << "seed = " << c.train.seed << "\n\n"
      << "[output]\n"
      << "directory = " << c.output_dir.string() << "\n";
  return out.str();
}

SeriesDataset build_dataset(const RunConfig& config) {
  const DatasetSection& d = config.dataset;
  switch (d.source) {
    case DataSource::kSinusoid:
      return gen_sinusoid(d.length, d.variates, d.periods, d.amplitude, d.noise_std, d.seed, d.ratios);
    case DataSource::kAr:
      return gen_ar_process(d.length, d.variates, d.coeffs, d.noise_std, d.seed, d.ratios);
    case DataSource::kCsv: {
      CsvOptions opts;
      opts.has_header = d.has_header;
      if (!d.time_column.empty()) opts.time_column = d.time_column;
      opts.ratios = d.ratios;
      return load_csv(d.path, opts);
    }
  }
  throw ConfigError("dataset.source is not set");
}

}  // namespace arollout::cli
